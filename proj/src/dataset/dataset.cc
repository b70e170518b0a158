// Copyright 2026 The aeclab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeclab/dataset/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aeclab/dataset/speechlike.h"
#include "aeclab/error.h"
#include "aeclab/random.h"
#include "aeclab/signal/dsp.h"
#include "aeclab/signal/wav_io.h"

namespace aeclab {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string JoinDoubles(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    std::ostringstream ss;
    ss << v[i];
    out += (i ? "," : "") + ss.str();
  }
  return out;
}

std::string JoinStrings(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::vector<std::string> ListWavs(const std::string& dir) {
  std::vector<std::string> files;
  if (dir.empty()) return files;
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(fs::absolute(entry.path()).string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no .wav files in " + dir);
  return files;
}

std::string RecordId(const std::string& split, size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", split.c_str(), index);
  return buf;
}

std::string MetaPath(const std::string& manifest_path) {
  std::string base = manifest_path;
  const std::string ext = ".jsonl";
  if (base.size() > ext.size() &&
      base.compare(base.size() - ext.size(), ext.size(), ext) == 0) {
    base.resize(base.size() - ext.size());
  }
  return base + ".meta.json";
}

void ValidateConfig(const DatasetConfig& c) {
  if (c.split != "train" && c.split != "test") {
    throw UsageError("split must be train or test, got " + c.split);
  }
  if (c.count <= 0) throw UsageError("count must be positive");
  if (c.sample_rate <= 0) throw UsageError("sample_rate must be positive");
  if (!(c.clip_seconds > 0.0)) throw UsageError("clip_seconds must be positive");
  if (c.d_max < 0) throw UsageError("d_max must be >= 0");
  if (c.Sers().empty()) throw UsageError("SER set is empty");
  if (c.rirs.empty()) throw UsageError("rirs list is empty");
  if (!(c.near_min_fraction > 0.0 && c.near_min_fraction <= 1.0)) {
    throw UsageError("near_min_fraction must be in (0, 1]");
  }
}

}  // namespace

std::vector<double> DatasetConfig::Sers() const {
  return split == "train" ? train_sers : test_sers;
}

std::vector<NamedRir> DatasetConfig::Catalog() const {
  std::vector<NamedRir> catalog = DefaultRirCatalog();
  if (!rir_extra.empty()) catalog.push_back(ParseRirSlot(rir_extra));
  return catalog;
}

size_t DatasetConfig::ClipSamples() const {
  return static_cast<size_t>(std::llround(clip_seconds * sample_rate));
}

void ReadDatasetKeys(KeyReader& r, DatasetConfig* c) {
  r.Read("split", &c->split);
  r.Read("count", &c->count);
  r.Read("seed", &c->seed);
  r.Read("sample_rate", &c->sample_rate);
  r.Read("clip_seconds", &c->clip_seconds);
  r.Read("delays", &c->delays);
  r.Read("d_max", &c->d_max);
  r.Read("train_sers", &c->train_sers);
  r.Read("test_sers", &c->test_sers);
  r.Read("rirs", &c->rirs);
  r.Read("rir_extra", &c->rir_extra);
  r.Read("far_per_near", &c->far_per_near);
  r.Read("num_far_sources", &c->num_far_sources);
  r.Read("near_min_fraction", &c->near_min_fraction);
  r.Read("near_dir", &c->near_dir);
  r.Read("far_dir", &c->far_dir);
  r.Read("write_wavs", &c->write_wavs);
  r.Read("near_active", &c->near_active);
}

DatasetConfig DatasetConfigFromKeys(const KeyValues& kv) {
  KeyReader reader(kv);
  DatasetConfig c;
  ReadDatasetKeys(reader, &c);
  reader.Finish();
  return c;
}

KeyValues DatasetConfigToKeys(const DatasetConfig& c) {
  std::ostringstream clip;
  clip << c.clip_seconds;
  std::ostringstream near_frac;
  near_frac << c.near_min_fraction;
  return {{"split", c.split},
          {"count", std::to_string(c.count)},
          {"seed", std::to_string(c.seed)},
          {"sample_rate", std::to_string(c.sample_rate)},
          {"clip_seconds", clip.str()},
          {"delays", c.delays ? "true" : "false"},
          {"d_max", std::to_string(c.d_max)},
          {"train_sers", JoinDoubles(c.train_sers)},
          {"test_sers", JoinDoubles(c.test_sers)},
          {"rirs", JoinStrings(c.rirs)},
          {"rir_extra", c.rir_extra},
          {"far_per_near", std::to_string(c.far_per_near)},
          {"num_far_sources", std::to_string(c.num_far_sources)},
          {"near_min_fraction", near_frac.str()},
          {"near_dir", c.near_dir},
          {"far_dir", c.far_dir},
          {"write_wavs", c.write_wavs ? "true" : "false"},
          {"near_active", c.near_active ? "true" : "false"}};
}

std::string SynthSourceId(uint64_t seed, size_t samples) {
  return "synth:" + std::to_string(seed) + ":" + std::to_string(samples);
}

Waveform ResolveSource(const std::string& id, int sample_rate) {
  if (id.rfind("synth:", 0) == 0) {
    const auto parts = SplitList(id, ':');
    if (parts.size() != 3) throw Error("bad synthetic source id: " + id);
    try {
      return SynthSpeechlikeSamples(std::stoull(parts[2]), std::stoull(parts[1]),
                                    sample_rate);
    } catch (const std::invalid_argument&) {
      throw Error("bad synthetic source id: " + id);
    }
  }
  if (id.rfind("wav:", 0) == 0) {
    Waveform w = ReadWav(id.substr(4));
    if (w.sample_rate != sample_rate) {
      throw Error("sample rate mismatch in " + id);
    }
    return w;
  }
  throw Error("unresolvable source id: " + id);
}

Manifest BuildManifest(const DatasetConfig& config) {
  ValidateConfig(config);
  const std::vector<NamedRir> catalog = config.Catalog();
  for (const auto& name : config.rirs) {
    if (name == kDiracRir) continue;
    const bool known = std::any_of(catalog.begin(), catalog.end(),
                                   [&](const NamedRir& r) { return r.name == name; });
    if (!known) throw UsageError("unknown rir in rirs list: " + name);
  }
  const bool train = config.split == "train";
  const int far_per_near =
      config.far_per_near > 0 ? config.far_per_near : (train ? 5 : 1);
  const int num_far = config.num_far_sources > 0 ? config.num_far_sources
                                                 : std::max(1, config.count / 5);
  const size_t clip = config.ClipSamples();
  const std::vector<std::string> near_files = ListWavs(config.near_dir);
  const std::vector<std::string> far_files = ListWavs(config.far_dir);
  const std::vector<double> sers = config.Sers();

  Manifest m;
  m.split = config.split;
  m.seed = config.seed;
  m.config = config;
  for (int i = 0; i < config.count; ++i) {
    MixtureRecord r;
    r.id = RecordId(config.split, i);
    r.seed = DeriveSeed(config.seed, r.id);

    const uint64_t near_index = static_cast<uint64_t>(i / far_per_near);
    if (!near_files.empty()) {
      r.near = "wav:" + near_files[near_index % near_files.size()];
    } else {
      const uint64_t near_seed =
          DeriveSeed(config.seed, config.split + "/near", near_index);
      Rng len_rng(DeriveSeed(near_seed, "length"));
      const auto samples = static_cast<size_t>(
          clip * len_rng.Uniform(config.near_min_fraction, 1.0));
      r.near = SynthSourceId(near_seed, std::max<size_t>(samples, 1));
    }

    Rng far_rng(DeriveSeed(r.seed, "far"));
    const auto far_index = static_cast<uint64_t>(far_rng.UniformInt(0, num_far - 1));
    if (!far_files.empty()) {
      r.far = "wav:" + far_files[far_index % far_files.size()];
    } else {
      r.far = SynthSourceId(
          DeriveSeed(config.seed, config.split + "/far", far_index), clip);
    }

    Rng ser_rng(DeriveSeed(r.seed, "ser"));
    r.ser_db = sers[ser_rng.UniformInt(0, static_cast<int64_t>(sers.size()) - 1)];
    Rng rir_rng(DeriveSeed(r.seed, "rir"));
    r.rir = config.rirs[rir_rng.UniformInt(
        0, static_cast<int64_t>(config.rirs.size()) - 1)];
    if (config.delays) {
      Rng delay_rng(DeriveSeed(r.seed, "delay"));
      r.delay_samples = static_cast<int>(delay_rng.UniformInt(0, config.d_max));
    }
    r.delay_class = DelayClass(r.delay_samples);
    m.records.push_back(std::move(r));
  }
  return m;
}

MixtureSignals RenderRecord(const MixtureRecord& record,
                            const DatasetConfig& config) {
  try {
    Waveform far = ResolveSource(record.far, config.sample_rate);
    Waveform near = ResolveSource(record.near, config.sample_rate);
    if (near.size() > far.size()) near = FitLength(near, far.size());
    const Waveform rir = RenderRir(record.rir, config.Catalog(), config.sample_rate);
    MixtureSignals s = BuildMixture(near, far, rir, record.ser_db, record.delay_samples);
    if (!config.near_active) {
      s.mic = s.ScaledEcho();
      std::fill(s.near.samples.begin(), s.near.samples.end(), 0.0);
    }
    return s;
  } catch (const Error& e) {
    throw Error("record " + record.id + ": " + e.what());
  }
}

Manifest BuildDataset(const DatasetConfig& config, const std::string& out_dir) {
  Manifest m = BuildManifest(config);
  if (out_dir.empty()) return m;
  fs::create_directories(out_dir);
  WriteManifest((fs::path(out_dir) / "manifest.jsonl").string(), m);
  if (config.write_wavs) {
    const fs::path wav_dir = fs::path(out_dir) / "wav";
    fs::create_directories(wav_dir);
    for (const MixtureRecord& r : m.records) {
      const MixtureSignals s = RenderRecord(r, config);
      WriteWav((wav_dir / (r.id + "_mic.wav")).string(), s.mic);
      WriteWav((wav_dir / (r.id + "_ref.wav")).string(), s.ref);
      WriteWav((wav_dir / (r.id + "_near.wav")).string(), s.near);
      WriteWav((wav_dir / (r.id + "_echo.wav")).string(), s.ScaledEcho());
    }
  }
  return m;
}

Manifest AugmentPortion(const Manifest& base, double portion, uint64_t seed) {
  if (!(portion >= 0.0 && portion <= 1.0)) {
    throw Error("portion must be in [0, 1]");
  }
  for (const MixtureRecord& r : base.records) {
    if (r.delay_samples != 0) {
      throw Error("augment_portion expects a zero-delay base; record " + r.id +
                  " has delay " + std::to_string(r.delay_samples));
    }
  }
  Manifest out = base;
  const size_t n = base.records.size();
  const auto k = static_cast<size_t>(std::llround(portion * static_cast<double>(n)));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng pick(DeriveSeed(seed, "augment/pick"));
  for (size_t i = 0; i < k; ++i) {
    const auto j = static_cast<size_t>(pick.UniformInt(
        static_cast<int64_t>(i), static_cast<int64_t>(n) - 1));
    std::swap(order[i], order[j]);
  }
  const int d_max = std::max(1, base.config.d_max);
  for (size_t i = 0; i < k; ++i) {
    MixtureRecord& r = out.records[order[i]];
    Rng delay_rng(DeriveSeed(seed, "augment/delay/" + r.id));
    r.delay_samples = static_cast<int>(delay_rng.UniformInt(1, d_max));
    r.delay_class = DelayClass(r.delay_samples);
  }
  std::ostringstream p;
  p << portion;
  out.notes["augment_portion"] = p.str();
  out.notes["augment_seed"] = std::to_string(seed);
  return out;
}

std::string ManifestRecordsToJsonl(const Manifest& manifest) {
  std::string out;
  for (const MixtureRecord& r : manifest.records) {
    ordered_json j;
    j["id"] = r.id;
    j["near"] = r.near;
    j["far"] = r.far;
    j["rir"] = r.rir;
    j["ser_db"] = r.ser_db;
    j["delay_samples"] = r.delay_samples;
    j["delay_class"] = r.delay_class;
    j["seed"] = r.seed;
    out += j.dump() + "\n";
  }
  return out;
}

void WriteManifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest " + path);
  out << ManifestRecordsToJsonl(manifest);

  ordered_json meta;
  meta["split"] = manifest.split;
  meta["seed"] = manifest.seed;
  meta["config"] = ordered_json::object();
  for (const auto& [k, v] : DatasetConfigToKeys(manifest.config)) {
    meta["config"][k] = v;
  }
  meta["notes"] = ordered_json::object();
  for (const auto& [k, v] : manifest.notes) meta["notes"][k] = v;
  std::ofstream meta_out(MetaPath(path), std::ios::binary);
  if (!meta_out) throw Error("cannot write manifest metadata for " + path);
  meta_out << meta.dump(2) << "\n";
}

Manifest ReadManifest(const std::string& path) {
  std::ifstream meta_in(MetaPath(path));
  if (!meta_in) throw Error("missing manifest metadata " + MetaPath(path));
  Manifest m;
  try {
    const auto meta = nlohmann::json::parse(meta_in);
    m.split = meta.at("split").get<std::string>();
    m.seed = meta.at("seed").get<uint64_t>();
    KeyValues kv;
    for (const auto& [k, v] : meta.at("config").items()) kv[k] = v.get<std::string>();
    m.config = DatasetConfigFromKeys(kv);
    if (meta.contains("notes")) {
      for (const auto& [k, v] : meta.at("notes").items()) {
        m.notes[k] = v.get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad manifest metadata " + MetaPath(path) + ": " + e.what());
  }

  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MixtureRecord r;
      r.id = j.at("id").get<std::string>();
      r.near = j.at("near").get<std::string>();
      r.far = j.at("far").get<std::string>();
      r.rir = j.at("rir").get<std::string>();
      r.ser_db = j.at("ser_db").get<double>();
      r.delay_samples = j.at("delay_samples").get<int>();
      r.delay_class = j.at("delay_class").get<int>();
      r.seed = j.at("seed").get<uint64_t>();
      if (j.size() != 8) throw Error("unexpected keys");
      if (r.delay_class != DelayClass(r.delay_samples)) {
        throw Error("delay_class inconsistent with delay_samples");
      }
      m.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

}  // namespace aeclab

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

// aeclab command-line tool: dataset synthesis, training, experiments and
// single-file delay estimation, cancellation and scoring.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "aeclab/classical/nlms.h"
#include "aeclab/dataset/dataset.h"
#include "aeclab/error.h"
#include "aeclab/harness/config.h"
#include "aeclab/harness/experiments.h"
#include "aeclab/harness/report.h"
#include "aeclab/models/train.h"
#include "aeclab/signal/metrics.h"
#include "aeclab/signal/wav_io.h"

namespace aeclab {
namespace {

void Log(const std::string& message) { std::cerr << "[aeclab] " << message << std::endl; }

// Config file (optional) followed by --set key=value overrides.
KeyValues LoadKeys(const std::string& path, const std::vector<std::string>& sets) {
  KeyValues kv = path.empty() ? KeyValues{} : ReadKeyValuesFile(path);
  for (const std::string& s : sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--set expects key=value, got '" + s + "'");
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return kv;
}

Waveform Trimmed(const Waveform& w, double start_sec) {
  const size_t from = std::min(w.size(), size_t(start_sec * w.sample_rate + 0.5));
  return Waveform(std::vector<double>(w.samples.begin() + from, w.samples.end()), w.sample_rate);
}

void CheckPair(const Waveform& a, const Waveform& b, const std::string& what) {
  if (a.sample_rate != b.sample_rate || a.size() != b.size()) {
    throw Error(what + ": files differ in sample rate or length");
  }
}

struct SynthArgs {
  std::string config, out;
  std::vector<std::string> sets;
};

int RunSynth(const SynthArgs& a) {
  const DatasetConfig c = DatasetConfigFromKeys(LoadKeys(a.config, a.sets));
  const Manifest m = BuildDataset(c, a.out);
  Log("wrote " + std::to_string(m.records.size()) + " records to " + a.out);
  return 0;
}

struct TrainArgs {
  std::string manifest, model, preset = "desk", config, out, resume;
  std::vector<std::string> sets;
};

int RunTrain(const TrainArgs& a) {
  KeyValues kv = LoadKeys(a.config, a.sets);
  kv["model"] = a.model;
  kv["preset"] = a.preset;
  const Manifest manifest = ReadManifest(a.manifest);
  if (!kv.count("sample_rate")) kv["sample_rate"] = std::to_string(manifest.config.sample_rate);
  ModelConfig model = PresetByName(a.preset, ParseModelKind(a.model));
  TrainSchedule schedule;
  KeyReader r(kv);
  ReadModelKeys(r, &model);
  ReadScheduleKeys(r, &schedule);
  r.Finish();
  if (model.sample_rate != manifest.config.sample_rate) {
    throw Error("model sample_rate differs from the manifest's");
  }
  std::filesystem::create_directories(a.out);
  TrainPaths paths;
  paths.checkpoint = (std::filesystem::path(a.out) / "model.ckpt").string();
  paths.log = (std::filesystem::path(a.out) / "train_log.csv").string();
  paths.resume = a.resume;
  TrainRun(manifest, model, schedule, paths,
           [](const EpochMetrics& m) { Log("epoch " + FormatEpochRow(m)); });
  Log("checkpoint " + paths.checkpoint);
  return 0;
}

struct EvalArgs {
  std::string experiment, config, out, models;
  std::vector<std::string> sets;
  bool no_train = false;
};

int RunEval(const EvalArgs& a) {
  const HarnessConfig config = HarnessConfigFromKeys(LoadKeys(a.config, a.sets));
  const std::string models =
      a.models.empty() ? (std::filesystem::path(a.out) / "models").string() : a.models;
  ModelStore store(models, !a.no_train, Log);
  const std::vector<std::string> names =
      a.experiment == "all" ? std::vector<std::string>{"delay", "match_mismatch", "augmentation"}
                            : std::vector<std::string>{a.experiment};
  for (const std::string& name : names) {
    Log("running " + name);
    for (const ExperimentReport& report : RunExperiment(name, config, store).reports) {
      for (const std::string& path : WriteReport(report, a.out)) Log("wrote " + path);
    }
  }
  return 0;
}

struct DelayArgs {
  std::string mic, ref, checkpoint;
  int d_max = kMaxDelaySamples;
};

int RunEstimateDelay(const DelayArgs& a) {
  const Waveform mic = ReadWav(a.mic), ref = ReadWav(a.ref);
  CheckPair(mic, ref, "estimate-delay");
  std::printf("classical %d\n", XcorrDelayEstimate(mic, ref, a.d_max));
  if (!a.checkpoint.empty()) {
    const auto model = LoadModel(a.checkpoint);
    if (model->config().kind == ModelKind::kCrnn) {
      throw Error("checkpoint " + a.checkpoint + " has no delay branch (crnn)");
    }
    std::printf("learned %d\n", model->EstimateDelay(mic, ref));
  }
  return 0;
}

struct CancelArgs {
  std::string mic, ref, method, out, checkpoint, config;
  std::vector<std::string> sets;
};

int RunCancel(const CancelArgs& a) {
  const Waveform mic = ReadWav(a.mic), ref = ReadWav(a.ref);
  CheckPair(mic, ref, "cancel");
  Waveform enhanced;
  if (a.method == "ecde") {
    if (!a.checkpoint.empty()) throw UsageError("--checkpoint is not used by --method ecde");
    EcdeConfig c;
    KeyReader r(LoadKeys(a.config, a.sets));
    ReadEcdeKeys(r, &c);
    r.Finish();
    const EcdeResult res = EcdePipeline(mic, ref, c);
    Log("ecde delay estimate " + std::to_string(res.delay));
    enhanced = res.residual;
  } else {
    if (a.checkpoint.empty()) throw UsageError("--method multitask needs --checkpoint");
    if (!a.config.empty() || !a.sets.empty()) {
      throw UsageError("--config/--set only apply to --method ecde");
    }
    const auto model = LoadModel(a.checkpoint);
    if (model->config().kind != ModelKind::kMultitask) {
      throw Error("checkpoint " + a.checkpoint + " is a " +
                  ModelKindName(model->config().kind) + " model, not multitask");
    }
    enhanced = model->Run(mic, ref).enhanced;
  }
  WriteWav(a.out, enhanced);
  Log("wrote " + a.out);
  return 0;
}

struct ReportArgs {
  std::string mic, residual, near;
  double start_sec = 0.0;
};

int RunReport(const ReportArgs& a) {
  const Waveform mic = ReadWav(a.mic), residual = ReadWav(a.residual);
  CheckPair(mic, residual, "report");
  std::printf("erle_db %.4f\n", Erle(Trimmed(mic, a.start_sec), Trimmed(residual, a.start_sec)));
  if (!a.near.empty()) {
    const Waveform near = ReadWav(a.near);
    CheckPair(near, residual, "report");
    std::printf("si_sdr_db %.4f\n",
                SiSdr(Trimmed(near, a.start_sec), Trimmed(residual, a.start_sec)));
  }
  return 0;
}

// Names unknown subcommands and flags before CLI11 parses, which would
// otherwise report a missing required option first.
void CheckTokens(CLI::App& app, int argc, char** argv) {
  if (argc < 2 || argv[1][0] == '-') return;
  const std::string name = argv[1];
  CLI::App* sub = nullptr;
  for (CLI::App* candidate : app.get_subcommands({})) {
    if (candidate->get_name() == name) sub = candidate;
  }
  if (sub == nullptr) throw UsageError("unknown subcommand '" + name + "'");
  for (int i = 2; i < argc; ++i) {
    std::string token = argv[i];
    if (token.rfind("--", 0) != 0 || token == "--") continue;
    token = token.substr(0, token.find('='));
    if (token != "--help" && sub->get_option_no_throw(token) == nullptr) {
      throw UsageError("unknown option '" + token + "' for " + name);
    }
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Acoustic echo cancellation with delay estimation"};
  app.require_subcommand(1);
  int rc = 0;

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Build a dataset manifest and WAVs");
  s->add_option("--config", synth.config, "Key file with dataset keys")->check(CLI::ExistingFile);
  s->add_option("--set", synth.sets, "Override one key, key=value");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->callback([&] { rc = RunSynth(synth); });

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a model on a manifest");
  t->add_option("--manifest", train.manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
  t->add_option("--model", train.model, "Model kind")
      ->required()
      ->check(CLI::IsMember({"multitask", "crnn", "delaynet"}));
  t->add_option("--preset", train.preset, "Model preset")
      ->check(CLI::IsMember({"paper", "desk"}))
      ->capture_default_str();
  t->add_option("--config", train.config, "Key file with model and schedule keys")
      ->check(CLI::ExistingFile);
  t->add_option("--set", train.sets, "Override one key, key=value");
  t->add_option("--resume", train.resume, "Checkpoint to continue from")->check(CLI::ExistingFile);
  t->add_option("--out", train.out, "Directory for model.ckpt and train_log.csv")->required();
  t->callback([&] { rc = RunTrain(train); });

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Run experiments and write CSV/JSON reports");
  e->add_option("--experiment", eval.experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember({"delay", "match_mismatch", "augmentation", "all"}));
  e->add_option("--config", eval.config, "Harness key file")->check(CLI::ExistingFile);
  e->add_option("--set", eval.sets, "Override one key, key=value");
  e->add_option("--out", eval.out, "Report directory")->required();
  e->add_option("--models", eval.models, "Checkpoint cache (default <out>/models)");
  e->add_flag("--no-train", eval.no_train, "Fail instead of training missing models");
  e->callback([&] { rc = RunEval(eval); });

  DelayArgs delay;
  auto* d = app.add_subcommand("estimate-delay", "Print the echo delay in samples");
  d->add_option("--mic", delay.mic, "Microphone WAV")->required()->check(CLI::ExistingFile);
  d->add_option("--ref", delay.ref, "Reference WAV")->required()->check(CLI::ExistingFile);
  d->add_option("--checkpoint", delay.checkpoint, "Model for a learned estimate")
      ->check(CLI::ExistingFile);
  d->add_option("--d-max", delay.d_max, "Largest lag searched")
      ->check(CLI::Range(0, 1 << 20))
      ->capture_default_str();
  d->callback([&] { rc = RunEstimateDelay(delay); });

  CancelArgs cancel;
  auto* c = app.add_subcommand("cancel", "Remove the echo and write the enhanced WAV");
  c->add_option("--mic", cancel.mic, "Microphone WAV")->required()->check(CLI::ExistingFile);
  c->add_option("--ref", cancel.ref, "Reference WAV")->required()->check(CLI::ExistingFile);
  c->add_option("--method", cancel.method, "Canceller")
      ->required()
      ->check(CLI::IsMember({"ecde", "multitask"}));
  c->add_option("--checkpoint", cancel.checkpoint, "Multitask checkpoint")
      ->check(CLI::ExistingFile);
  c->add_option("--config", cancel.config, "Key file with EC-DE keys")->check(CLI::ExistingFile);
  c->add_option("--set", cancel.sets, "Override one key, key=value");
  c->add_option("--out", cancel.out, "Output WAV")->required();
  c->callback([&] { rc = RunCancel(cancel); });

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Print ERLE (and SI-SDR with --near)");
  r->add_option("--mic", report.mic, "Microphone WAV")->required()->check(CLI::ExistingFile);
  r->add_option("--residual", report.residual, "Enhanced WAV")->required()->check(CLI::ExistingFile);
  r->add_option("--near", report.near, "Clean near-end WAV")->check(CLI::ExistingFile);
  r->add_option("--start-sec", report.start_sec, "Skip this much audio before scoring")
      ->check(CLI::NonNegativeNumber);
  r->callback([&] { rc = RunReport(report); });

  try {
    CheckTokens(app, argc, argv);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 1;
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << std::endl;
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << std::endl;
    return 2;
  }
  return rc;
}

}  // namespace
}  // namespace aeclab

int main(int argc, char** argv) { return aeclab::Main(argc, argv); }

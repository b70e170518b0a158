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

#include "aeclab/harness/config.h"

#include <sstream>

#include "aeclab/error.h"
#include "aeclab/random.h"

namespace aeclab {
namespace {

// Preset fields a harness config may override for every trained method.
const char* const kModelOverrideKeys[] = {
    "win_len", "hop",   "crnn_maps", "blstm_hidden",  "blstm_layers", "chunk_frames",
    "corr_samples", "num_lags", "pool", "dense", "classes", "dropout",
    "feature_power", "echo_uses_ref", "loss_weights", "aux_weight"};

std::string Num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string JoinText(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::string JoinNum(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + Num(v[i]);
  return out;
}

void CheckMembers(const std::string& key, const std::vector<std::string>& values,
                  const std::vector<std::string>& allowed) {
  for (const auto& v : values) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || v == a;
    if (!ok) throw UsageError("config key '" + key + "': unknown entry '" + v + "'");
  }
}

}  // namespace

ModelConfig HarnessConfig::Model(ModelKind kind) const {
  ModelConfig c = PresetByName(preset, kind);
  KeyReader r(model_overrides);
  ReadModelKeys(r, &c);
  r.Finish();
  c.sample_rate = data.sample_rate;
  c.Validate();
  return c;
}

TrainSchedule HarnessConfig::ScheduleFor(ModelKind kind) const {
  TrainSchedule s = schedule;
  if (kind == ModelKind::kDelayNet) {
    s.lr = delay_lr;
    s.epochs = delay_epochs;
  } else if (kind == ModelKind::kCrnn) {
    s.delay_loss = "ce";  // no delay branch; keeps cache keys independent of it
  }
  return s;
}

DatasetConfig HarnessConfig::TrainSet(bool delayed) const {
  DatasetConfig c = data;
  c.split = "train";
  c.seed = DeriveSeed(data.seed, "train");
  c.delays = delayed;
  c.write_wavs = false;
  return c;
}

DatasetConfig HarnessConfig::TestSet(bool delayed) const {
  DatasetConfig c = data;
  c.split = "test";
  c.count = test_count;
  c.seed = DeriveSeed(data.seed, "test");
  c.delays = delayed;
  c.write_wavs = false;
  return c;
}

DatasetConfig HarnessConfig::DelayTrainSet(bool rir) const {
  DatasetConfig c = data;
  c.split = "train";
  c.count = delay_train_count;
  c.seed = DeriveSeed(data.seed, rir ? "delay-train-rir" : "delay-train-simple");
  c.delays = true;
  c.near_active = false;
  if (!rir) {
    c.rirs = {"dirac"};
    c.rir_extra.clear();
  }
  c.write_wavs = false;
  return c;
}

DatasetConfig HarnessConfig::DelayTestSet(bool rir) const {
  DatasetConfig c = DelayTrainSet(rir);
  c.split = "test";
  c.count = delay_test_count;
  c.seed = DeriveSeed(data.seed, rir ? "delay-test-rir" : "delay-test-simple");
  return c;
}

HarnessConfig HarnessConfigFromKeys(const KeyValues& kv) {
  HarnessConfig h;
  KeyValues rest;
  for (const auto& [k, v] : kv) {
    bool model_key = false;
    for (const char* m : kModelOverrideKeys) model_key = model_key || k == m;
    if (model_key) {
      h.model_overrides[k] = v;
    } else {
      rest[k] = v;
    }
  }
  KeyReader r(rest);
  ReadDatasetKeys(r, &h.data);
  ReadScheduleKeys(r, &h.schedule);
  ReadEcdeKeys(r, &h.ecde);
  r.Read("test_count", &h.test_count);
  r.Read("preset", &h.preset);
  r.Read("methods", &h.methods);
  r.Read("portions", &h.portions);
  r.Read("delay_estimators", &h.delay_estimators);
  r.Read("delay_train_count", &h.delay_train_count);
  r.Read("delay_test_count", &h.delay_test_count);
  r.Read("delay_epochs", &h.delay_epochs);
  r.Read("delay_lr", &h.delay_lr);
  r.Read("workers", &h.workers);
  r.Finish();

  if (h.preset != "paper" && h.preset != "desk") {
    throw UsageError("unknown preset '" + h.preset + "' (expected paper or desk)");
  }
  CheckMembers("methods", h.methods, {"ecde", "crnn", "multitask"});
  CheckMembers("delay_estimators", h.delay_estimators, {"classical", "learned", "multitask"});
  for (double p : h.portions) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("portions must lie in [0, 1]");
  }
  if (h.test_count <= 0 || h.delay_train_count <= 0 || h.delay_test_count <= 0) {
    throw UsageError("test_count, delay_train_count and delay_test_count must be positive");
  }
  if (h.delay_epochs < 0) throw UsageError("delay_epochs must be nonnegative");
  if (!(h.delay_lr > 0.0)) throw UsageError("delay_lr must be positive");
  if (h.workers < 0) throw UsageError("workers must be nonnegative");
  // Surface bad overrides now rather than mid-experiment.
  h.Model(ModelKind::kMultitask);
  return h;
}

KeyValues HarnessConfigToKeys(const HarnessConfig& h) {
  KeyValues kv = DatasetConfigToKeys(h.data);
  for (const auto& [k, v] : ScheduleToKeys(h.schedule)) kv[k] = v;
  for (const auto& [k, v] : EcdeConfigToKeys(h.ecde)) kv[k] = v;
  for (const auto& [k, v] : h.model_overrides) kv[k] = v;
  kv["d_max"] = std::to_string(h.data.d_max);
  kv["test_count"] = std::to_string(h.test_count);
  kv["preset"] = h.preset;
  kv["methods"] = JoinText(h.methods);
  kv["portions"] = JoinNum(h.portions);
  kv["delay_estimators"] = JoinText(h.delay_estimators);
  kv["delay_train_count"] = std::to_string(h.delay_train_count);
  kv["delay_test_count"] = std::to_string(h.delay_test_count);
  kv["delay_epochs"] = std::to_string(h.delay_epochs);
  kv["delay_lr"] = Num(h.delay_lr);
  kv["workers"] = std::to_string(h.workers);
  return kv;
}

}  // namespace aeclab

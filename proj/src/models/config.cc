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

#include "aeclab/models/config.h"

#include <sstream>

#include "aeclab/error.h"

namespace aeclab {
namespace {

std::string Num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

template <typename V>
std::string Join(const std::vector<V>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + Num(double(v[i]));
  return out;
}

}  // namespace

std::string ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMultitask:
      return "multitask";
    case ModelKind::kCrnn:
      return "crnn";
    case ModelKind::kDelayNet:
      return "delaynet";
  }
  return "?";
}

ModelKind ParseModelKind(const std::string& name) {
  if (name == "multitask") return ModelKind::kMultitask;
  if (name == "crnn") return ModelKind::kCrnn;
  if (name == "delaynet") return ModelKind::kDelayNet;
  throw UsageError("unknown model '" + name + "' (expected multitask, crnn or delaynet)");
}

void ModelConfig::Validate() const {
  if (crnn.feature_maps.size() != 3) throw Error("crnn needs exactly three feature maps");
  for (int m : crnn.feature_maps) {
    if (m <= 0) throw Error("crnn feature maps must be positive");
  }
  if (crnn.blstm_hidden <= 0 || crnn.blstm_layers <= 0 || crnn.chunk_frames <= 0) {
    throw Error("blstm sizes and chunk length must be positive");
  }
  if (win_len <= 0 || win_len % 2 != 0 || hop <= 0 || hop > win_len) {
    throw Error("invalid STFT geometry");
  }
  if (delay.pool <= 0 || delay.num_lags % delay.pool != 0 ||
      delay.num_lags / delay.pool != delay.classes) {
    throw Error("delay grid mismatch: " + std::to_string(delay.num_lags) + " lags / pool " +
                std::to_string(delay.pool) + " != " + std::to_string(delay.classes) +
                " classes");
  }
  if (delay.corr_samples <= delay.num_lags) {
    throw Error("correlation window must exceed the lag count");
  }
  if (!(delay.dropout >= 0.0 && delay.dropout < 1.0)) throw Error("dropout must be in [0, 1)");
  if (!(delay.feature_power >= 1.0)) throw Error("feature_power must be >= 1");
  if (delay.dense.size() != 3) throw Error("delay net needs three hidden layers");
  if (loss_weights.size() != 2) throw Error("loss_weights needs two entries");
  if (aux_weight < 0.0) throw Error("aux_weight must be nonnegative");
}

ModelConfig PaperPreset(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.preset = "paper";
  return c;
}

ModelConfig DeskPreset(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.preset = "desk";
  c.crnn.feature_maps = {4, 8, 16};
  c.crnn.blstm_hidden = 32;
  c.delay.dense = {64, 32, 32};
  c.delay.corr_samples = 10000;
  c.delay.feature_power = 8.0;
  return c;
}

ModelConfig PresetByName(const std::string& preset, ModelKind kind) {
  if (preset == "paper") return PaperPreset(kind);
  if (preset == "desk") return DeskPreset(kind);
  throw UsageError("unknown preset '" + preset + "' (expected paper or desk)");
}

void ReadModelKeys(KeyReader& r, ModelConfig* c) {
  std::string kind = ModelKindName(c->kind);
  r.Read("model", &kind);
  std::string preset = c->preset;
  r.Read("preset", &preset);
  if (kind != ModelKindName(c->kind) || preset != c->preset) {
    *c = PresetByName(preset, ParseModelKind(kind));
  }
  r.Read("sample_rate", &c->sample_rate);
  r.Read("win_len", &c->win_len);
  r.Read("hop", &c->hop);
  r.Read("crnn_maps", &c->crnn.feature_maps);
  r.Read("blstm_hidden", &c->crnn.blstm_hidden);
  r.Read("blstm_layers", &c->crnn.blstm_layers);
  r.Read("chunk_frames", &c->crnn.chunk_frames);
  r.Read("corr_samples", &c->delay.corr_samples);
  r.Read("num_lags", &c->delay.num_lags);
  r.Read("pool", &c->delay.pool);
  r.Read("dense", &c->delay.dense);
  r.Read("classes", &c->delay.classes);
  r.Read("dropout", &c->delay.dropout);
  r.Read("feature_power", &c->delay.feature_power);
  r.Read("echo_uses_ref", &c->echo_uses_ref);
  r.Read("loss_weights", &c->loss_weights);
  r.Read("aux_weight", &c->aux_weight);
  c->Validate();
}

KeyValues ModelConfigToKeys(const ModelConfig& c) {
  return {{"model", ModelKindName(c.kind)},
          {"preset", c.preset},
          {"sample_rate", std::to_string(c.sample_rate)},
          {"win_len", std::to_string(c.win_len)},
          {"hop", std::to_string(c.hop)},
          {"crnn_maps", Join(c.crnn.feature_maps)},
          {"blstm_hidden", std::to_string(c.crnn.blstm_hidden)},
          {"blstm_layers", std::to_string(c.crnn.blstm_layers)},
          {"chunk_frames", std::to_string(c.crnn.chunk_frames)},
          {"corr_samples", std::to_string(c.delay.corr_samples)},
          {"num_lags", std::to_string(c.delay.num_lags)},
          {"pool", std::to_string(c.delay.pool)},
          {"dense", Join(c.delay.dense)},
          {"classes", std::to_string(c.delay.classes)},
          {"dropout", Num(c.delay.dropout)},
          {"feature_power", Num(c.delay.feature_power)},
          {"echo_uses_ref", c.echo_uses_ref ? "true" : "false"},
          {"loss_weights", Join(c.loss_weights)},
          {"aux_weight", Num(c.aux_weight)}};
}

ModelConfig ModelConfigFromKeys(const KeyValues& kv) {
  KeyReader r(kv);
  ModelConfig c;
  ReadModelKeys(r, &c);
  r.Finish();
  return c;
}

void ReadScheduleKeys(KeyReader& r, TrainSchedule* s) {
  r.Read("epochs", &s->epochs);
  r.Read("lr", &s->lr);
  r.Read("beta1", &s->beta1);
  r.Read("beta2", &s->beta2);
  r.Read("adam_eps", &s->adam_eps);
  r.Read("train_seed", &s->seed);
  r.Read("delay_loss", &s->delay_loss);
  r.Read("focal_gamma", &s->focal_gamma);
  r.Read("compensation", &s->compensation);
  r.Read("max_records", &s->max_records);
  if (s->epochs < 0) throw UsageError("epochs must be nonnegative");
  if (s->delay_loss != "ce" && s->delay_loss != "focal") {
    throw UsageError("unknown delay_loss '" + s->delay_loss + "' (expected ce or focal)");
  }
  if (s->compensation != "predicted" && s->compensation != "oracle") {
    throw UsageError("unknown compensation '" + s->compensation +
                     "' (expected predicted or oracle)");
  }
}

KeyValues ScheduleToKeys(const TrainSchedule& s) {
  return {{"epochs", std::to_string(s.epochs)},
          {"lr", Num(s.lr)},
          {"beta1", Num(s.beta1)},
          {"beta2", Num(s.beta2)},
          {"adam_eps", Num(s.adam_eps)},
          {"train_seed", std::to_string(s.seed)},
          {"delay_loss", s.delay_loss},
          {"focal_gamma", Num(s.focal_gamma)},
          {"compensation", s.compensation},
          {"max_records", std::to_string(s.max_records)}};
}

}  // namespace aeclab

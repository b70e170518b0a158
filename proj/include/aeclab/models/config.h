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

#ifndef AECLAB_MODELS_CONFIG_H_
#define AECLAB_MODELS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/key_values.h"

namespace aeclab {

struct CrnnConfig {
  std::vector<int> feature_maps = {16, 32, 64};
  int first_kernel_t = 1;
  int kernel_t = 2;
  int kernel_f = 3;
  int stride_f = 2;
  int blstm_hidden = 1024;
  int blstm_layers = 2;
  int chunk_frames = 100;
};

struct DelayNetConfig {
  int corr_samples = 16000;
  int num_lags = 410;
  int pool = 10;
  std::vector<int> dense = {512, 256, 128};
  int classes = 41;
  double dropout = 0.2;
  // Features pass through max(x, 0)^p before the first dense layer; 1 keeps
  // them unchanged.
  double feature_power = 1.0;
};

enum class ModelKind { kMultitask, kCrnn, kDelayNet };

std::string ModelKindName(ModelKind kind);
ModelKind ParseModelKind(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::kMultitask;
  std::string preset = "paper";
  int sample_rate = 16000;
  int win_len = 512;
  int hop = 256;
  CrnnConfig crnn;
  DelayNetConfig delay;
  // Feed the reference to the echo-estimating CRNN as a second channel.
  bool echo_uses_ref = true;
  std::vector<double> loss_weights = {1.0, 1.0};  // enhance, delay
  double aux_weight = 1.0;  // supervised echo-estimate loss

  int EchoInputChannels() const { return echo_uses_ref ? 2 : 1; }
  // Throws Error when the class grid or layer sizes are inconsistent.
  void Validate() const;
};

ModelConfig PaperPreset(ModelKind kind);
// Laptop-scale preset used by the tests and the desk experiments.
ModelConfig DeskPreset(ModelKind kind);
ModelConfig PresetByName(const std::string& preset, ModelKind kind);

struct TrainSchedule {
  int epochs = 20;
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 1;
  std::string delay_loss = "ce";  // ce | focal
  double focal_gamma = 2.0;
  // predicted: shift the reference by the network's own estimate, as at
  // inference time. oracle: shift by the ground-truth class.
  std::string compensation = "predicted";
  int max_records = 0;  // 0 = whole manifest
};

// Model keys: model, preset, then any override of the preset fields
// (crnn_maps, blstm_hidden, blstm_layers, chunk_frames, corr_samples,
// num_lags, pool, dense, classes, dropout, echo_uses_ref, loss_weights,
// aux_weight, win_len, hop).
void ReadModelKeys(KeyReader& reader, ModelConfig* config);
KeyValues ModelConfigToKeys(const ModelConfig& config);
ModelConfig ModelConfigFromKeys(const KeyValues& kv);

// Schedule keys: epochs, lr, beta1, beta2, adam_eps, train_seed, delay_loss,
// focal_gamma, compensation, max_records.
void ReadScheduleKeys(KeyReader& reader, TrainSchedule* schedule);
KeyValues ScheduleToKeys(const TrainSchedule& schedule);

}  // namespace aeclab

#endif  // AECLAB_MODELS_CONFIG_H_

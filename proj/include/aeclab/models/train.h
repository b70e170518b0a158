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

#ifndef AECLAB_MODELS_TRAIN_H_
#define AECLAB_MODELS_TRAIN_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aeclab/dataset/dataset.h"
#include "aeclab/models/model.h"
#include "aeclab/nn/adam.h"

namespace aeclab {

struct LossReport {
  double enhance_mse = 0.0;
  double delay_loss = 0.0;
  double echo_aux = 0.0;
  double total = 0.0;
  int predicted_class = 0;
};

struct EpochMetrics {
  int epoch = 0;
  double enhance_mse = 0.0;
  double delay_loss = 0.0;
  double echo_aux = 0.0;
  double delay_top1 = 0.0;
  double delay_within1 = 0.0;
  double wall_seconds = 0.0;
};

inline constexpr const char* kTrainLogHeader =
    "epoch,enhance_mse,delay_loss,echo_aux,delay_top1,delay_within1,wall_seconds";
std::string FormatEpochRow(const EpochMetrics& m);

// Focal class weights: inverse class frequency with add-one smoothing,
// normalized to mean 1.
std::vector<double> FocalAlpha(const Manifest& manifest, int classes);

// Losses for one rendered mixture. Builds the graph in train mode and, when
// `optimizer` is non-null, back-propagates and takes one Adam step.
LossReport TrainStep(const AecModel& model, const MixtureSignals& signals,
                     const TrainSchedule& schedule, std::span<const double> focal_alpha,
                     uint64_t step, nn::Adam<Real>* optimizer,
                     const std::vector<double>* delay_features = nullptr);

struct TrainPaths {
  std::string checkpoint;  // rewritten after every epoch
  std::string log;         // CSV, one row per epoch
  std::string resume;      // optional checkpoint to continue from
};

struct TrainResult {
  std::unique_ptr<AecModel> model;
  std::vector<EpochMetrics> epochs;
};

// Deterministic given schedule.seed: initialization, record order and
// dropout masks derive from it.
TrainResult TrainRun(const Manifest& manifest, const ModelConfig& config,
                     const TrainSchedule& schedule, const TrainPaths& paths,
                     const std::function<void(const EpochMetrics&)>& on_epoch = {});

struct TrainingState {
  int epoch = 0;
  int64_t adam_step = 0;
};

void SaveModel(const std::string& path, const AecModel& model, const TrainSchedule& schedule,
               nn::Adam<Real>* optimizer, const TrainingState& state);
std::unique_ptr<AecModel> LoadModel(const std::string& path, TrainSchedule* schedule = nullptr,
                                    TrainingState* state = nullptr);

}  // namespace aeclab

#endif  // AECLAB_MODELS_TRAIN_H_

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

#ifndef AECLAB_HARNESS_CONFIG_H_
#define AECLAB_HARNESS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/classical/nlms.h"
#include "aeclab/dataset/dataset.h"
#include "aeclab/key_values.h"
#include "aeclab/models/config.h"

namespace aeclab {

// Everything the experiment runners need, read from one flat key file.
// Dataset keys describe the training-set template (`count` is the train
// size, `seed` the experiment seed); model keys override the preset for
// every trained method; schedule and EC-DE keys apply unchanged.
struct HarnessConfig {
  DatasetConfig data;
  int test_count = 60;
  std::string preset = "desk";
  KeyValues model_overrides;
  TrainSchedule schedule;
  EcdeConfig ecde;
  std::vector<std::string> methods = {"ecde", "crnn", "multitask"};
  std::vector<double> portions = {0.0, 0.2, 0.5, 1.0};
  std::vector<std::string> delay_estimators = {"classical", "learned"};
  int delay_train_count = 1000;
  int delay_test_count = 200;
  int delay_epochs = 20;
  double delay_lr = 1e-3;
  int workers = 0;  // 0 = one per hardware thread

  ModelConfig Model(ModelKind kind) const;
  // Schedule for a trained method; the stand-alone delay estimator uses the
  // delay_* keys.
  TrainSchedule ScheduleFor(ModelKind kind) const;

  // Set A has no delays, set B random delays in [0, d_max]. Both share one
  // seed so they differ only in the delays.
  DatasetConfig TrainSet(bool delayed) const;
  DatasetConfig TestSet(bool delayed) const;
  // Single-talk sets for the delay experiment; `rir` picks the RIR catalog
  // instead of pure delays.
  DatasetConfig DelayTrainSet(bool rir) const;
  DatasetConfig DelayTestSet(bool rir) const;
};

// Strict: unknown keys are a UsageError.
HarnessConfig HarnessConfigFromKeys(const KeyValues& kv);
KeyValues HarnessConfigToKeys(const HarnessConfig& config);

}  // namespace aeclab

#endif  // AECLAB_HARNESS_CONFIG_H_

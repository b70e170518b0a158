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

#ifndef AECLAB_HARNESS_EXPERIMENTS_H_
#define AECLAB_HARNESS_EXPERIMENTS_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aeclab/dataset/dataset.h"
#include "aeclab/harness/config.h"
#include "aeclab/harness/report.h"
#include "aeclab/models/train.h"

namespace aeclab {

// Runs fn(0..n-1) on up to `workers` threads (0 = hardware concurrency).
// Callers write results into per-index slots, so the outcome never depends
// on scheduling. The first exception is rethrown after all threads join.
void ParallelFor(size_t n, int workers, const std::function<void(size_t)>& fn);

// Trained models keyed by a hash of manifest, model config and schedule.
// With an empty directory every request trains in memory.
class ModelStore {
 public:
  ModelStore(std::string dir, bool train_missing,
             std::function<void(const std::string&)> log = {});

  // Loads <dir>/<tag>-<hash>.ckpt when present, otherwise trains it (and
  // writes checkpoint plus log) or, when training is disabled, throws Error.
  std::unique_ptr<AecModel> Obtain(const std::string& tag, const Manifest& manifest,
                                   const ModelConfig& config, const TrainSchedule& schedule);

  // Checkpoint path a request would use.
  std::string PathFor(const std::string& tag, const Manifest& manifest, const ModelConfig& config,
                      const TrainSchedule& schedule) const;

 private:
  std::string dir_;
  bool train_missing_;
  std::function<void(const std::string&)> log_;
};

// Delay estimates in samples, one per record of a single-talk manifest.
// "classical" ignores `model`; "learned" needs a delaynet model and
// "multitask" a multitask model, anything else is an Error.
std::vector<int> EstimateDelays(const Manifest& manifest, const std::string& estimator,
                                const AecModel* model, int d_max, int workers);

// Histogram of |true - estimated| (10-sample buckets up to d_max plus one
// overflow bucket), delay_within_10 and delay_top1, all in percent.
std::vector<ReportRow> DelayRows(const Manifest& manifest, const std::vector<int>& estimates,
                                 const std::string& train_set, const std::string& test_set,
                                 const std::string& method, int d_max);

// Cancels every test record with `enhance(mic, ref)`. ERLE is measured on the
// single-talk render, SI-SDR on the double-talk mixture against the near-end.
using Enhancer = std::function<Waveform(const Waveform& mic, const Waveform& ref)>;
struct EnhancementScores {
  std::vector<double> sers;         // ascending
  std::vector<double> erle, si_sdr; // per SER
  std::vector<int> counts;          // per SER
  double mean_erle = 0.0, mean_si_sdr = 0.0;  // mean over the SER means
  int total = 0;
};
EnhancementScores ScoreEnhancer(const Manifest& test, const Enhancer& enhance, int workers);

// Appends mean rows to `main` and per-SER rows to `per_ser`.
void AppendScoreRows(const EnhancementScores& s, const std::string& train_set,
                     const std::string& test_set, const std::string& method,
                     ExperimentReport* main, ExperimentReport* per_ser);

struct ExperimentOutput {
  std::vector<ExperimentReport> reports;
};

// Learned and classical delay estimation on simple-delay and RIR single-talk
// sets.
ExperimentOutput RunDelayEval(const HarnessConfig& config, ModelStore& store);
// Train on set A (no delay) and set B (random delay), test on both.
ExperimentOutput RunMatchMismatch(const HarnessConfig& config, ModelStore& store);
// Train on set A with a portion of records given synthetic delays.
ExperimentOutput RunAugmentationStudy(const HarnessConfig& config, ModelStore& store);

// Names accepted by RunExperiment: delay, match_mismatch, augmentation.
ExperimentOutput RunExperiment(const std::string& name, const HarnessConfig& config,
                               ModelStore& store);

}  // namespace aeclab

#endif  // AECLAB_HARNESS_EXPERIMENTS_H_

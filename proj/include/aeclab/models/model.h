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

#ifndef AECLAB_MODELS_MODEL_H_
#define AECLAB_MODELS_MODEL_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aeclab/models/config.h"
#include "aeclab/models/networks.h"
#include "aeclab/signal/waveform.h"

namespace aeclab {

// Overrides a CRNN's mask for plumbing checks.
enum class MaskProbe { kNone, kOnes, kZeros };

// Normalized correlation of ref[n] against echo_est[n + lag] over lags
// 0..num_lags-1, using the first corr_samples of each (zero-padded if
// shorter), max-pooled to one value per delay class.
std::vector<double> DelayFeatures(const Waveform& echo_est, const Waveform& ref,
                                  const DelayNetConfig& config);

// Index of the largest entry; ties go to the smaller index.
int ArgmaxClass(std::span<const double> dist);
int ArgmaxClass(std::span<const Real> dist);

// delay_shift(ref, 10 * argmax(dist)).
Waveform Compensate(const Waveform& ref, std::span<const double> dist);

// Two-channel [frames, bins, 2] log-magnitude features (one channel when
// `second` is null).
RTensor LogMagnitudeFeatures(const Spectrogram& first, const Spectrogram* second);

// One forward pass of a model's graph. Tensors are only populated for the
// sub-networks the model kind has.
struct ModelGraph {
  Spectrogram mic_spec;
  RTensor echo_mask;     // [frames, bins]
  RTensor echo_est;      // [samples], time-domain masked mic
  RTensor delay_probs;   // [classes]
  RTensor enhance_mask;  // [frames, bins]
  int predicted_class = 0;
  int compensation = 0;  // samples the reference was shifted by
};

struct MultitaskOutput {
  Waveform enhanced;
  std::vector<double> dist;
  Waveform echo_est;
};

class AecModel {
 public:
  AecModel(const ModelConfig& config, uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  nn::ParameterStore<Real>& store() { return store_; }
  const nn::ParameterStore<Real>& store() const { return store_; }
  const Crnn* echo_crnn() const { return echo_.get(); }
  const Crnn* enhance_crnn() const { return enhance_.get(); }
  const DelayNet* delay_net() const { return delay_.get(); }

  // forced_delay >= 0 replaces the predicted compensation (oracle mode).
  // The delay-only model accepts precomputed DelayFeatures(mic, ref).
  ModelGraph Build(const Waveform& mic, const Waveform& ref, nn::Mode mode,
                   uint64_t dropout_seed, int forced_delay = -1,
                   MaskProbe echo_probe = MaskProbe::kNone,
                   MaskProbe enhance_probe = MaskProbe::kNone,
                   const std::vector<double>* delay_features = nullptr) const;

  // Eval-mode inference. Fields the model kind cannot produce stay empty.
  MultitaskOutput Run(const Waveform& mic, const Waveform& ref) const;
  Waveform EstimateEcho(const Waveform& mic, const Waveform& ref,
                        MaskProbe probe = MaskProbe::kNone) const;
  std::vector<double> ClassifyDelay(std::span<const double> features) const;
  Waveform Enhance(const Waveform& mic, const Waveform& comp_ref,
                   MaskProbe probe = MaskProbe::kNone) const;
  // Learned delay estimate in samples (10 * class).
  int EstimateDelay(const Waveform& mic, const Waveform& ref) const;

 private:
  Spectrogram Spec(const Waveform& w) const;

  ModelConfig config_;
  nn::ParameterStore<Real> store_;
  std::unique_ptr<Crnn> echo_, enhance_;
  std::unique_ptr<DelayNet> delay_;
};

}  // namespace aeclab

#endif  // AECLAB_MODELS_MODEL_H_

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

#include "aeclab/models/model.h"

#include <algorithm>
#include <cmath>

#include "aeclab/dataset/mixture.h"
#include "aeclab/error.h"
#include "aeclab/random.h"
#include "aeclab/signal/dsp.h"
#include "aeclab/signal/stft.h"

namespace aeclab {
namespace {

using nn::Mode;

Waveform Window(const Waveform& w, size_t n) {
  return FitLength(w, n);
}

RTensor ProbeMask(MaskProbe probe, size_t frames, size_t bins) {
  return RTensor::Full({frames, bins}, probe == MaskProbe::kOnes ? 1.0f : 0.0f);
}

template <typename V>
int ArgmaxImpl(std::span<const V> v) {
  if (v.empty()) throw Error("argmax of an empty distribution");
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

Waveform ToWaveform(const RTensor& t, int sample_rate) {
  return Waveform(std::vector<double>(t.values().begin(), t.values().end()), sample_rate);
}

}  // namespace

std::vector<double> DelayFeatures(const Waveform& echo_est, const Waveform& ref,
                                  const DelayNetConfig& config) {
  const size_t n = config.corr_samples;
  const std::vector<double> corr =
      CrossCorrelate(Window(ref, n), Window(echo_est, n), config.num_lags - 1, true);
  std::vector<double> out;
  for (size_t start = 0; start + config.pool <= corr.size(); start += config.pool) {
    out.push_back(*std::max_element(corr.begin() + start, corr.begin() + start + config.pool));
  }
  return out;
}

int ArgmaxClass(std::span<const double> dist) { return ArgmaxImpl(dist); }
int ArgmaxClass(std::span<const Real> dist) { return ArgmaxImpl(dist); }

Waveform Compensate(const Waveform& ref, std::span<const double> dist) {
  return DelayShift(ref, long(kDelayClassWidth) * ArgmaxClass(dist));
}

RTensor LogMagnitudeFeatures(const Spectrogram& first, const Spectrogram* second) {
  const size_t channels = second ? 2 : 1;
  if (second && (second->num_frames != first.num_frames || second->num_bins != first.num_bins)) {
    throw Error("feature spectrograms differ in shape");
  }
  std::vector<Real> v(first.bins.size() * channels);
  for (size_t i = 0; i < first.bins.size(); ++i) {
    v[i * channels] = static_cast<Real>(std::log(std::abs(first.bins[i]) + kLogMagnitudeEps));
    if (second) {
      v[i * channels + 1] =
          static_cast<Real>(std::log(std::abs(second->bins[i]) + kLogMagnitudeEps));
    }
  }
  return RTensor::Constant({first.num_frames, first.num_bins, channels}, std::move(v));
}

AecModel::AecModel(const ModelConfig& config, uint64_t init_seed) : config_(config) {
  config_.Validate();
  const int bins = config_.win_len / 2 + 1;
  // Separate init streams keep a sub-network's weights independent of which
  // other sub-networks the model kind includes.
  if (config_.kind == ModelKind::kMultitask) {
    Rng rng(DeriveSeed(init_seed, "init/echo"));
    echo_ = std::make_unique<Crnn>(config_.crnn, config_.EchoInputChannels(), bins, "echo",
                                   &store_, rng);
  }
  if (config_.kind != ModelKind::kCrnn) {
    Rng rng(DeriveSeed(init_seed, "init/delay"));
    delay_ = std::make_unique<DelayNet>(config_.delay, "delay", &store_, rng);
  }
  if (config_.kind != ModelKind::kDelayNet) {
    Rng rng(DeriveSeed(init_seed, "init/enhance"));
    enhance_ = std::make_unique<Crnn>(config_.crnn, 2, bins, "enhance", &store_, rng);
  }
}

Spectrogram AecModel::Spec(const Waveform& w) const {
  return Stft(w, config_.win_len, config_.hop);
}

ModelGraph AecModel::Build(const Waveform& mic, const Waveform& ref, Mode mode,
                           uint64_t dropout_seed, int forced_delay, MaskProbe echo_probe,
                           MaskProbe enhance_probe,
                           const std::vector<double>* delay_features) const {
  if (mic.size() != ref.size()) {
    throw Error("mic and ref lengths differ: " + std::to_string(mic.size()) + " vs " +
                std::to_string(ref.size()));
  }
  if (mic.empty()) throw Error("empty input");
  if (mic.sample_rate != config_.sample_rate || ref.sample_rate != config_.sample_rate) {
    throw Error("model expects " + std::to_string(config_.sample_rate) + " Hz input");
  }
  ModelGraph g;
  if (config_.kind == ModelKind::kDelayNet) {
    const std::vector<double> f =
        delay_features ? *delay_features : DelayFeatures(mic, ref, config_.delay);
    g.delay_probs = delay_->Forward(RTensor::Constant({f.size()}, {f.begin(), f.end()}), mode,
                                    dropout_seed);
    g.predicted_class = ArgmaxClass(g.delay_probs.values());
    return g;
  }
  g.mic_spec = Spec(mic);
  const Spectrogram ref_spec = Spec(ref);
  const size_t frames = g.mic_spec.num_frames, bins = g.mic_spec.num_bins;
  const size_t w = config_.delay.corr_samples;

  if (config_.kind == ModelKind::kMultitask) {
    g.echo_mask =
        echo_probe == MaskProbe::kNone
            ? echo_->Forward(LogMagnitudeFeatures(
                                 g.mic_spec, config_.echo_uses_ref ? &ref_spec : nullptr),
                             mode)
            : ProbeMask(echo_probe, frames, bins);
    g.echo_est = nn::MaskedIstft(g.echo_mask, g.mic_spec);
    const Waveform ref_w = Window(ref, w);
    const RTensor ref_t =
        RTensor::Constant({w}, std::vector<Real>(ref_w.samples.begin(), ref_w.samples.end()));
    const RTensor corr = nn::CrossCorrelate(ref_t, nn::Slice1d(g.echo_est, 0, w),
                                            config_.delay.num_lags - 1, true);
    const RTensor feats = nn::MaxPool1d(corr, config_.delay.pool, config_.delay.pool);
    g.delay_probs = delay_->Forward(feats, mode, dropout_seed);
  }
  if (g.delay_probs.defined()) {
    g.predicted_class = ArgmaxClass(g.delay_probs.values());
  }

  if (enhance_) {
    Spectrogram comp_spec = ref_spec;
    if (config_.kind == ModelKind::kMultitask) {
      g.compensation = forced_delay >= 0 ? forced_delay : config_.delay.pool * g.predicted_class;
      if (g.compensation > 0) comp_spec = Spec(DelayShift(ref, g.compensation));
    }
    g.enhance_mask = enhance_probe == MaskProbe::kNone
                         ? enhance_->Forward(LogMagnitudeFeatures(g.mic_spec, &comp_spec), mode)
                         : ProbeMask(enhance_probe, frames, bins);
  }
  return g;
}

MultitaskOutput AecModel::Run(const Waveform& mic, const Waveform& ref) const {
  const ModelGraph g = Build(mic, ref, Mode::kEval, 0);
  MultitaskOutput out;
  if (g.enhance_mask.defined()) {
    out.enhanced = ToWaveform(nn::MaskedIstft(g.enhance_mask, g.mic_spec), mic.sample_rate);
  }
  if (g.delay_probs.defined()) {
    out.dist.assign(g.delay_probs.values().begin(), g.delay_probs.values().end());
  }
  if (g.echo_est.defined()) out.echo_est = ToWaveform(g.echo_est, mic.sample_rate);
  return out;
}

Waveform AecModel::EstimateEcho(const Waveform& mic, const Waveform& ref,
                                MaskProbe probe) const {
  if (!echo_) throw Error("model kind " + ModelKindName(config_.kind) + " has no echo estimator");
  const ModelGraph g = Build(mic, ref, Mode::kEval, 0, -1, probe);
  return ToWaveform(g.echo_est, mic.sample_rate);
}

std::vector<double> AecModel::ClassifyDelay(std::span<const double> features) const {
  if (!delay_) throw Error("model kind " + ModelKindName(config_.kind) + " has no delay net");
  const RTensor probs = delay_->Forward(
      RTensor::Constant({features.size()}, {features.begin(), features.end()}), Mode::kEval, 0);
  return {probs.values().begin(), probs.values().end()};
}

Waveform AecModel::Enhance(const Waveform& mic, const Waveform& comp_ref,
                           MaskProbe probe) const {
  if (!enhance_) throw Error("model kind " + ModelKindName(config_.kind) + " has no enhancer");
  if (mic.size() != comp_ref.size()) throw Error("mic and reference lengths differ");
  const Spectrogram mic_spec = Spec(mic);
  const Spectrogram ref_spec = Spec(comp_ref);
  const RTensor mask =
      probe == MaskProbe::kNone
          ? enhance_->Forward(LogMagnitudeFeatures(mic_spec, &ref_spec), Mode::kEval)
          : ProbeMask(probe, mic_spec.num_frames, mic_spec.num_bins);
  return ToWaveform(nn::MaskedIstft(mask, mic_spec), mic.sample_rate);
}

int AecModel::EstimateDelay(const Waveform& mic, const Waveform& ref) const {
  if (!delay_) throw Error("model kind " + ModelKindName(config_.kind) + " has no delay net");
  return config_.delay.pool * Build(mic, ref, Mode::kEval, 0).predicted_class;
}

}  // namespace aeclab

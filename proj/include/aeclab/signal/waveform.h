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

#ifndef AECLAB_SIGNAL_WAVEFORM_H_
#define AECLAB_SIGNAL_WAVEFORM_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace aeclab {

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr int kDefaultWinLen = 512;
inline constexpr int kDefaultHop = 256;

// Mono signal in linear amplitude.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  Waveform() = default;
  explicit Waveform(std::vector<double> s, int rate = kDefaultSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double operator[](size_t i) const { return samples[i]; }
  double& operator[](size_t i) { return samples[i]; }
};

// Complex STFT frames, row-major [frame][bin].
struct Spectrogram {
  size_t num_frames = 0;
  size_t num_bins = 0;
  int win_len = kDefaultWinLen;
  int hop = kDefaultHop;
  int sample_rate = kDefaultSampleRate;
  // Length of the analysed waveform; istft restores exactly this many samples.
  size_t signal_length = 0;
  std::vector<std::complex<double>> bins;

  std::complex<double>& at(size_t frame, size_t bin) {
    return bins[frame * num_bins + bin];
  }
  const std::complex<double>& at(size_t frame, size_t bin) const {
    return bins[frame * num_bins + bin];
  }
};

// Real-valued time-frequency grid, row-major [frame][bin]. Used for
// log-magnitude features and for ratio masks (values in [0, 1]).
struct TfGrid {
  size_t num_frames = 0;
  size_t num_bins = 0;
  std::vector<double> values;

  TfGrid() = default;
  TfGrid(size_t frames, size_t bins, double fill = 0.0)
      : num_frames(frames), num_bins(bins), values(frames * bins, fill) {}

  double& at(size_t frame, size_t bin) { return values[frame * num_bins + bin]; }
  double at(size_t frame, size_t bin) const {
    return values[frame * num_bins + bin];
  }
};

using TfMask = TfGrid;

// Throws if any sample is non-finite or the rate is not positive.
void ValidateWaveform(const Waveform& w);

}  // namespace aeclab

#endif  // AECLAB_SIGNAL_WAVEFORM_H_

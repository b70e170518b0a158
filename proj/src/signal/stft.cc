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

#include "aeclab/signal/stft.h"

#include <cmath>
#include <numbers>
#include <string>

#include "aeclab/error.h"
#include "aeclab/signal/fft.h"

namespace aeclab {

void ValidateWaveform(const Waveform& w) {
  if (w.sample_rate <= 0) throw Error("sample rate must be positive");
  for (double v : w.samples) {
    if (!std::isfinite(v)) throw Error("waveform contains non-finite samples");
  }
}

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

size_t NumFrames(size_t length, int win_len, int hop) {
  if (length <= static_cast<size_t>(win_len)) return 1;
  return (length - win_len) / hop + 1;
}

Spectrogram Stft(const Waveform& w, int win_len, int hop) {
  if (w.empty()) throw Error("empty input");
  if (win_len <= 0 || win_len % 2 != 0) throw Error("win_len must be even");
  if (hop <= 0 || hop > win_len) throw Error("hop must be in (0, win_len]");

  Spectrogram s;
  s.win_len = win_len;
  s.hop = hop;
  s.sample_rate = w.sample_rate;
  s.signal_length = w.size();
  s.num_frames = NumFrames(w.size(), win_len, hop);
  s.num_bins = win_len / 2 + 1;
  s.bins.assign(s.num_frames * s.num_bins, {0.0, 0.0});

  const std::vector<double> window = HannWindow(win_len);
  const RealFft fft(win_len);
  std::vector<double> frame(win_len);
  for (size_t k = 0; k < s.num_frames; ++k) {
    const size_t start = k * hop;
    for (int n = 0; n < win_len; ++n) {
      const size_t t = start + n;
      frame[n] = t < w.size() ? w.samples[t] * window[n] : 0.0;
    }
    fft.Forward(frame, std::span(s.bins).subspan(k * s.num_bins, s.num_bins));
  }
  return s;
}

Waveform Istft(const Spectrogram& s) {
  if (s.num_bins != static_cast<size_t>(s.win_len / 2 + 1) ||
      s.bins.size() != s.num_frames * s.num_bins) {
    throw Error("spectrogram shape mismatch: " + std::to_string(s.num_frames) +
                " frames x " + std::to_string(s.num_bins) + " bins");
  }
  const int win_len = s.win_len;
  const std::vector<double> window = HannWindow(win_len);
  const RealFft fft(win_len);
  const size_t covered = (s.num_frames - 1) * s.hop + win_len;
  std::vector<double> acc(std::max(covered, s.signal_length), 0.0);
  std::vector<double> weight(acc.size(), 0.0);
  std::vector<double> frame(win_len);
  for (size_t k = 0; k < s.num_frames; ++k) {
    fft.Inverse(std::span(s.bins).subspan(k * s.num_bins, s.num_bins), frame);
    const size_t start = k * s.hop;
    for (int n = 0; n < win_len; ++n) {
      acc[start + n] += frame[n] / win_len * window[n];
      weight[start + n] += window[n] * window[n];
    }
  }
  Waveform out(std::vector<double>(s.signal_length, 0.0), s.sample_rate);
  for (size_t t = 0; t < s.signal_length; ++t) {
    if (weight[t] > 1e-10) out.samples[t] = acc[t] / weight[t];
  }
  return out;
}

TfGrid LogMagnitude(const Spectrogram& s, double eps) {
  if (!(eps > 0.0)) throw Error("eps must be positive");
  TfGrid g(s.num_frames, s.num_bins);
  for (size_t i = 0; i < s.bins.size(); ++i) {
    g.values[i] = std::log(std::abs(s.bins[i]) + eps);
  }
  return g;
}

Spectrogram ApplyMask(const Spectrogram& s, const TfMask& mask) {
  if (mask.num_frames != s.num_frames || mask.num_bins != s.num_bins) {
    throw Error("mask shape does not match spectrogram");
  }
  Spectrogram out = s;
  for (size_t i = 0; i < out.bins.size(); ++i) {
    const double m = mask.values[i];
    if (!(m >= 0.0 && m <= 1.0)) throw Error("mask value outside [0, 1]");
    out.bins[i] *= m;
  }
  return out;
}

}  // namespace aeclab

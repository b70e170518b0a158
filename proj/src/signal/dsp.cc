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

#include "aeclab/signal/dsp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeclab/error.h"
#include "aeclab/signal/fft.h"

namespace aeclab {
namespace {

// Above this many multiply-adds the FFT path is used.
constexpr size_t kDirectConvolutionLimit = size_t{1} << 22;

int NextPow2(size_t n) {
  int p = 1;
  while (static_cast<size_t>(p) < n) p <<= 1;
  return p;
}

Waveform ConvolveFft(const Waveform& x, const Waveform& h) {
  const int n = std::max(2, NextPow2(x.size() + h.size() - 1));
  const RealFft fft(n);
  std::vector<double> xp(n, 0.0), hp(n, 0.0), y(n);
  std::copy(x.samples.begin(), x.samples.end(), xp.begin());
  std::copy(h.samples.begin(), h.samples.end(), hp.begin());
  std::vector<std::complex<double>> xf(fft.num_bins()), hf(fft.num_bins());
  fft.Forward(xp, xf);
  fft.Forward(hp, hf);
  for (size_t i = 0; i < xf.size(); ++i) xf[i] *= hf[i];
  fft.Inverse(xf, y);
  Waveform out(std::vector<double>(x.size()), x.sample_rate);
  for (size_t i = 0; i < x.size(); ++i) out.samples[i] = y[i] / n;
  return out;
}

}  // namespace

std::vector<double> CrossCorrelate(const Waveform& a, const Waveform& b,
                                   size_t max_lag, bool normalized) {
  if (max_lag >= std::min(a.size(), b.size())) {
    throw Error("max_lag " + std::to_string(max_lag) +
                " must be below both input lengths");
  }
  std::vector<double> out(max_lag + 1, 0.0);
  for (size_t lag = 0; lag <= max_lag; ++lag) {
    const size_t m = std::min(a.size(), b.size() - lag);
    const double* pa = a.samples.data();
    const double* pb = b.samples.data() + lag;
    double dot = 0.0;
    for (size_t n = 0; n < m; ++n) dot += pa[n] * pb[n];
    if (normalized) {
      double ea = 0.0, eb = 0.0;
      for (size_t n = 0; n < m; ++n) {
        ea += pa[n] * pa[n];
        eb += pb[n] * pb[n];
      }
      const double denom = std::sqrt(ea * eb);
      dot = denom > 0.0 ? dot / denom : 0.0;
    }
    out[lag] = dot;
  }
  return out;
}

Waveform Convolve(const Waveform& x, const Waveform& h) {
  if (x.empty() || h.empty()) throw Error("convolve needs nonempty inputs");
  if (x.size() * h.size() > kDirectConvolutionLimit) return ConvolveFft(x, h);
  Waveform out(std::vector<double>(x.size(), 0.0), x.sample_rate);
  for (size_t n = 0; n < x.size(); ++n) {
    const size_t kmax = std::min(h.size() - 1, n);
    double acc = 0.0;
    for (size_t k = 0; k <= kmax; ++k) acc += h.samples[k] * x.samples[n - k];
    out.samples[n] = acc;
  }
  return out;
}

Waveform DelayShift(const Waveform& w, long d) {
  if (d < 0) throw Error("delay must be nonnegative");
  Waveform out(std::vector<double>(w.size(), 0.0), w.sample_rate);
  const size_t shift = static_cast<size_t>(d);
  for (size_t n = shift; n < w.size(); ++n) {
    out.samples[n] = w.samples[n - shift];
  }
  return out;
}

Waveform FitLength(const Waveform& w, size_t length) {
  Waveform out = w;
  out.samples.resize(length, 0.0);
  return out;
}

double MeanSquare(const Waveform& w) {
  if (w.empty()) return 0.0;
  double acc = 0.0;
  for (double v : w.samples) acc += v * v;
  return acc / static_cast<double>(w.size());
}

SerMix MixAtSer(const Waveform& near, const Waveform& echo, double ser_db) {
  if (near.size() != echo.size()) throw Error("near/echo length mismatch");
  const double p_echo = MeanSquare(echo);
  if (!(p_echo > 0.0)) throw Error("silent echo");
  const double p_near = MeanSquare(near);
  if (!(p_near > 0.0)) throw Error("silent near-end");
  SerMix mix;
  mix.gain = std::sqrt(p_near / (p_echo * std::pow(10.0, ser_db / 10.0)));
  mix.mic = near;
  for (size_t n = 0; n < near.size(); ++n) {
    mix.mic.samples[n] += mix.gain * echo.samples[n];
  }
  return mix;
}

}  // namespace aeclab

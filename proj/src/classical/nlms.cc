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

#include "aeclab/classical/nlms.h"

#include <cmath>
#include <deque>
#include <sstream>

#include "aeclab/error.h"
#include "aeclab/signal/dsp.h"

namespace aeclab {

NlmsResult NlmsCancel(const Waveform& mic, const Waveform& ref, const NlmsConfig& c) {
  if (mic.size() != ref.size()) {
    throw Error("nlms: mic and ref lengths differ (" + std::to_string(mic.size()) + " vs " +
                std::to_string(ref.size()) + ")");
  }
  if (c.taps <= 0) throw Error("nlms needs at least one tap");
  if (!(c.mu >= 0.0 && c.mu < 2.0)) throw Error("nlms step size must be in [0, 2)");
  if (!(c.delta > 0.0)) throw Error("nlms regularizer must be positive");
  if (!(c.power_reg >= 0.0)) throw Error("nlms power_reg must be nonnegative");
  const size_t n = mic.size(), taps = c.taps;
  const size_t win = std::max<size_t>(
      1, static_cast<size_t>(std::lround(c.gate_window_ms * 1e-3 * mic.sample_rate)));
  const double gate_ratio = std::pow(10.0, c.gate_threshold_db / 10.0);

  NlmsResult out;
  out.coefficients.assign(taps, 0.0);
  out.residual = Waveform(std::vector<double>(n, 0.0), mic.sample_rate);
  std::vector<double>& h = out.coefficients;
  const std::vector<double>& x = ref.samples;
  const std::vector<double>& d = mic.samples;

  // Circular-free formulation: the tap vector at time t is x[t], x[t-1], ...
  // with zeros before the start.
  double energy = 0.0;     // ||x window||^2
  double mic_pow = 0.0;    // sum of mic^2 over the last `win` samples
  double ref_pow = 0.0;    // same for ref
  double ref_total = 0.0;  // sum of ref^2 up to t
  double err_pow = 0.0;    // raw error power over the last `win` samples
  std::vector<double> err(n);
  std::deque<std::pair<size_t, double>> ref_max;  // sliding max of ref_pow
  for (size_t t = 0; t < n; ++t) {
    energy += x[t] * x[t];
    ref_total += x[t] * x[t];
    if (t >= taps) energy -= x[t - taps] * x[t - taps];
    if (energy < 0.0) energy = 0.0;
    mic_pow += d[t] * d[t];
    ref_pow += x[t] * x[t];
    if (t >= win) {
      mic_pow -= d[t - win] * d[t - win];
      ref_pow -= x[t - win] * x[t - win];
    }
    while (!ref_max.empty() && ref_max.back().second <= ref_pow) ref_max.pop_back();
    ref_max.emplace_back(t, ref_pow);
    while (ref_max.front().first + taps <= t) ref_max.pop_front();

    const size_t span = std::min(taps, t + 1);
    double y = 0.0;
    for (size_t k = 0; k < span; ++k) y += h[k] * x[t - k];
    const double e = d[t] - y;
    err[t] = e;
    err_pow += e * e;
    if (t >= win) err_pow -= err[t - win] * err[t - win];
    out.residual.samples[t] = c.divergence_fallback && err_pow > mic_pow ? d[t] : e;

    const bool near_dominant = c.gate && mic_pow > gate_ratio * ref_max.front().second;
    if (near_dominant) {
      ++out.frozen_samples;
      continue;
    }
    if (c.mu == 0.0) continue;
    const double reg = c.delta + taps * c.power_reg * ref_total / double(t + 1);
    const double g = c.mu * e / (energy + reg);
    for (size_t k = 0; k < span; ++k) h[k] += g * x[t - k];
  }
  return out;
}

int XcorrDelayEstimate(const Waveform& mic, const Waveform& ref, int d_max) {
  if (d_max < 0) throw Error("d_max must be nonnegative");
  const std::vector<double> r = CrossCorrelate(ref, mic, static_cast<size_t>(d_max), true);
  size_t best = 0;
  for (size_t l = 1; l < r.size(); ++l) {
    if (r[l] > r[best]) best = l;
  }
  return static_cast<int>(best);
}

EcdeResult EcdePipeline(const Waveform& mic, const Waveform& ref, const EcdeConfig& c) {
  EcdeResult out;
  out.delay = XcorrDelayEstimate(mic, ref, c.d_max);
  out.residual = NlmsCancel(mic, DelayShift(ref, out.delay), c.nlms).residual;
  return out;
}

void ReadEcdeKeys(KeyReader& r, EcdeConfig* c) {
  r.Read("nlms_taps", &c->nlms.taps);
  r.Read("nlms_mu", &c->nlms.mu);
  r.Read("nlms_delta", &c->nlms.delta);
  r.Read("nlms_power_reg", &c->nlms.power_reg);
  r.Read("nlms_fallback", &c->nlms.divergence_fallback);
  r.Read("nlms_gate", &c->nlms.gate);
  r.Read("gate_window_ms", &c->nlms.gate_window_ms);
  r.Read("gate_threshold_db", &c->nlms.gate_threshold_db);
  r.Read("d_max", &c->d_max);
}

KeyValues EcdeConfigToKeys(const EcdeConfig& c) {
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  return {{"nlms_taps", std::to_string(c.nlms.taps)},
          {"nlms_mu", num(c.nlms.mu)},
          {"nlms_delta", num(c.nlms.delta)},
          {"nlms_power_reg", num(c.nlms.power_reg)},
          {"nlms_fallback", c.nlms.divergence_fallback ? "true" : "false"},
          {"nlms_gate", c.nlms.gate ? "true" : "false"},
          {"gate_window_ms", num(c.nlms.gate_window_ms)},
          {"gate_threshold_db", num(c.nlms.gate_threshold_db)},
          {"d_max", std::to_string(c.d_max)}};
}

}  // namespace aeclab

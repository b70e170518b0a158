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

#include "aeclab/signal/metrics.h"

#include <algorithm>
#include <cmath>

#include "aeclab/error.h"
#include "aeclab/signal/dsp.h"

namespace aeclab {

double Erle(const Waveform& mic, const Waveform& residual) {
  if (mic.size() != residual.size()) throw Error("erle: length mismatch");
  const double p_mic = MeanSquare(mic);
  if (!(p_mic > 0.0)) throw Error("silent microphone signal");
  const double p_res = MeanSquare(residual);
  if (p_res <= 1e-12 * p_mic) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(p_mic / p_res));
}

double Ser(const Waveform& near, const Waveform& echo) {
  const double p_near = MeanSquare(near);
  const double p_echo = MeanSquare(echo);
  if (!(p_near > 0.0) || !(p_echo > 0.0)) throw Error("ser: silent input");
  return 10.0 * std::log10(p_near / p_echo);
}

double SiSdr(const Waveform& reference, const Waveform& estimate) {
  if (reference.size() != estimate.size()) throw Error("si_sdr: length mismatch");
  double ref_energy = 0.0, cross = 0.0;
  for (size_t n = 0; n < reference.size(); ++n) {
    ref_energy += reference[n] * reference[n];
    cross += reference[n] * estimate[n];
  }
  if (!(ref_energy > 0.0)) throw Error("si_sdr: silent reference");
  const double alpha = cross / ref_energy;
  double target = 0.0, noise = 0.0;
  for (size_t n = 0; n < reference.size(); ++n) {
    const double t = alpha * reference[n];
    const double e = estimate[n] - t;
    target += t * t;
    noise += e * e;
  }
  if (noise <= 1e-12 * target) return kMetricCapDb;
  if (target <= 0.0) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(target / noise), -kMetricCapDb,
                    kMetricCapDb);
}

}  // namespace aeclab

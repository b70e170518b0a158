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

#include "aeclab/dataset/speechlike.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "aeclab/random.h"

namespace aeclab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Formants {
  double f1, f2;
};

double FormantGain(double freq, const Formants& f) {
  const double a = (freq - f.f1) / 180.0;
  const double b = (freq - f.f2) / 300.0;
  return 0.3 + 3.0 * std::exp(-a * a) + 1.5 * std::exp(-b * b);
}

void RenderVoiced(Rng& rng, double base_f0, int fs, size_t start, size_t len,
                  std::vector<double>& out) {
  const double f0_start = base_f0 * std::exp2(rng.Uniform(-0.25, 0.25));
  const double f0_end = f0_start * std::exp2(rng.Uniform(-0.3, 0.3));
  const Formants formants{rng.Uniform(300.0, 900.0), rng.Uniform(1000.0, 2500.0)};
  const double breath = rng.Uniform(0.03, 0.1);
  const double wobble_rate = rng.Uniform(3.0, 7.0);
  const double wobble_phase = rng.Uniform(0.0, kTwoPi);
  const int max_harmonics = static_cast<int>(3800.0 / std::min(f0_start, f0_end));
  std::vector<double> phases(max_harmonics);
  for (auto& p : phases) p = rng.Uniform(0.0, kTwoPi);

  double phase = 0.0;
  for (size_t i = 0; i < len && start + i < out.size(); ++i) {
    const double t = static_cast<double>(i) / len;
    const double f0 = (f0_start + (f0_end - f0_start) * t) *
                      (1.0 + 0.01 * std::sin(kTwoPi * wobble_rate * i / fs +
                                             wobble_phase));
    phase += kTwoPi * f0 / fs;
    const double env = std::pow(std::sin(std::numbers::pi * t), 0.6);
    double v = 0.0;
    for (int k = 1; k <= max_harmonics && k * f0 < 3800.0; ++k) {
      v += FormantGain(k * f0, formants) / k * std::sin(k * phase + phases[k - 1]);
    }
    out[start + i] += env * (v + breath * rng.Normal());
  }
}

void RenderUnvoiced(Rng& rng, size_t start, size_t len, std::vector<double>& out) {
  const double level = rng.Uniform(0.2, 0.5);
  double prev = 0.0;
  for (size_t i = 0; i < len && start + i < out.size(); ++i) {
    const double t = static_cast<double>(i) / len;
    const double env = std::pow(std::sin(std::numbers::pi * t), 0.8);
    const double n = rng.Normal();
    out[start + i] += level * env * (n - 0.7 * prev);
    prev = n;
  }
}

}  // namespace

Waveform SynthSpeechlikeSamples(size_t num_samples, uint64_t seed,
                                int sample_rate) {
  Rng rng(seed);
  std::vector<double> out(num_samples, 0.0);
  const double fs = sample_rate;
  const double base_f0 = rng.Uniform(90.0, 240.0);
  size_t pos = static_cast<size_t>(rng.Uniform(0.0, 0.1) * fs);
  while (pos < num_samples) {
    const int syllables = static_cast<int>(rng.UniformInt(1, 3));
    for (int s = 0; s < syllables && pos < num_samples; ++s) {
      const size_t len = static_cast<size_t>(rng.Uniform(0.08, 0.22) * fs);
      if (rng.Uniform() < 0.8) {
        RenderVoiced(rng, base_f0, sample_rate, pos, len, out);
      } else {
        RenderUnvoiced(rng, pos, len, out);
      }
      pos += len;
      if (s + 1 < syllables) pos += static_cast<size_t>(rng.Uniform(0.02, 0.06) * fs);
    }
    pos += static_cast<size_t>(rng.Uniform(0.12, 0.35) * fs);
  }
  // Faint noise floor so pauses are not digital silence.
  for (double& v : out) v += 1e-4 * rng.Normal();

  double energy = 0.0;
  for (double v : out) energy += v * v;
  const double rms = num_samples > 0 ? std::sqrt(energy / num_samples) : 0.0;
  if (rms > 0.0) {
    for (double& v : out) v *= kSpeechlikeRms / rms;
  }
  return Waveform(std::move(out), sample_rate);
}

Waveform SynthSpeechlike(double duration_seconds, uint64_t seed, int sample_rate) {
  const auto n = static_cast<size_t>(std::llround(duration_seconds * sample_rate));
  return SynthSpeechlikeSamples(n, seed, sample_rate);
}

}  // namespace aeclab

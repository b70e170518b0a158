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

#ifndef AECLAB_CLASSICAL_NLMS_H_
#define AECLAB_CLASSICAL_NLMS_H_

#include <vector>

#include "aeclab/key_values.h"
#include "aeclab/signal/waveform.h"

namespace aeclab {

struct NlmsConfig {
  int taps = 1024;
  double mu = 0.5;
  double delta = 1e-6;
  bool gate = true;
  double gate_window_ms = 10.0;
  // Adaptation freezes while the mic's short-window power exceeds this many
  // dB above the strongest reference window that can still echo (the last
  // `taps` samples).
  double gate_threshold_db = 0.0;
  // Extra regularization taps * power_reg * P, with P the reference power
  // averaged over everything seen so far. Keeps updates bounded at speech
  // onsets, where the tap window is nearly silent but the error still holds
  // reverberation the filter cannot model.
  double power_reg = 0.1;
  // Output the mic sample instead of the residual while the residual's
  // short-window power exceeds the mic's (a misadapted filter adds echo).
  // Adaptation always uses the raw error.
  bool divergence_fallback = true;
};

struct NlmsResult {
  Waveform residual;
  std::vector<double> coefficients;
  size_t frozen_samples = 0;
};

NlmsResult NlmsCancel(const Waveform& mic, const Waveform& ref, const NlmsConfig& config);

// Argmax over lags 0..d_max of the normalized correlation of ref[n] with
// mic[n + lag]; ties go to the smaller lag.
int XcorrDelayEstimate(const Waveform& mic, const Waveform& ref, int d_max);

struct EcdeConfig {
  int d_max = 400;
  NlmsConfig nlms;
};

struct EcdeResult {
  Waveform residual;
  int delay = 0;
};

// Delay estimate, reference compensation, then NLMS.
EcdeResult EcdePipeline(const Waveform& mic, const Waveform& ref, const EcdeConfig& config);

// Keys: nlms_taps, nlms_mu, nlms_delta, nlms_power_reg, nlms_fallback, nlms_gate, gate_window_ms,
// gate_threshold_db, d_max.
void ReadEcdeKeys(KeyReader& reader, EcdeConfig* config);
KeyValues EcdeConfigToKeys(const EcdeConfig& config);

}  // namespace aeclab

#endif  // AECLAB_CLASSICAL_NLMS_H_

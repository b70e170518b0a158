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

#ifndef AECLAB_SIGNAL_METRICS_H_
#define AECLAB_SIGNAL_METRICS_H_

#include "aeclab/signal/waveform.h"

namespace aeclab {

inline constexpr double kMetricCapDb = 120.0;

// Echo return loss enhancement of residual q against microphone d, with
// expectations taken as utterance mean squares. The residual power is floored
// at 1e-12 * E{d^2}, so the result never exceeds 120 dB.
double Erle(const Waveform& mic, const Waveform& residual);

// 10 log10(E{near^2} / E{echo^2}).
double Ser(const Waveform& near, const Waveform& echo);

// Scale-invariant SDR in dB, clamped to [-120, 120]. Not a PESQ substitute in
// any calibrated sense; reported as a quality proxy only.
double SiSdr(const Waveform& reference, const Waveform& estimate);

}  // namespace aeclab

#endif  // AECLAB_SIGNAL_METRICS_H_

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

#ifndef AECLAB_SIGNAL_DSP_H_
#define AECLAB_SIGNAL_DSP_H_

#include <cstddef>
#include <vector>

#include "aeclab/signal/waveform.h"

namespace aeclab {

// Entry l correlates a[n] with b[n + l] for l = 0..max_lag, i.e. b is treated
// as the (possibly) delayed copy of a. When `normalized`, each entry is
// divided by the L2 norms of the two overlapping segments so that values lie
// in [-1, 1]; a zero-norm segment yields 0.
std::vector<double> CrossCorrelate(const Waveform& a, const Waveform& b,
                                   size_t max_lag, bool normalized);

// Linear convolution x * h truncated to len(x).
Waveform Convolve(const Waveform& x, const Waveform& h);

// Prepends d zeros and truncates to the original length.
Waveform DelayShift(const Waveform& w, long d);

// Zero-pads (in the rear) or truncates to `length` samples.
Waveform FitLength(const Waveform& w, size_t length);

double MeanSquare(const Waveform& w);

struct SerMix {
  Waveform mic;
  double gain = 0.0;
};

// Scales the echo so that 10 log10(P_near / P_{gain * echo}) == ser_db and
// returns near + gain * echo. The near-end is left untouched.
SerMix MixAtSer(const Waveform& near, const Waveform& echo, double ser_db);

}  // namespace aeclab

#endif  // AECLAB_SIGNAL_DSP_H_

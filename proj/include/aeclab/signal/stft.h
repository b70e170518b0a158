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

#ifndef AECLAB_SIGNAL_STFT_H_
#define AECLAB_SIGNAL_STFT_H_

#include <vector>

#include "aeclab/signal/waveform.h"

namespace aeclab {

inline constexpr double kLogMagnitudeEps = 1e-7;

// Periodic Hann window of length n.
std::vector<double> HannWindow(int n);

// Number of analysis frames for a signal of `length` samples. Signals shorter
// than one window are zero-padded to a single frame.
size_t NumFrames(size_t length, int win_len, int hop);

// Hann-windowed STFT with win_len/2 + 1 bins per frame.
Spectrogram Stft(const Waveform& w, int win_len = kDefaultWinLen,
                 int hop = kDefaultHop);

// Weighted overlap-add inverse with window-sum normalization. Samples that no
// frame covers with nonzero window weight come back as zero.
Waveform Istft(const Spectrogram& s);

// ln(|bin| + eps), elementwise.
TfGrid LogMagnitude(const Spectrogram& s, double eps = kLogMagnitudeEps);

// Scales each bin's magnitude by the mask; phase is kept.
Spectrogram ApplyMask(const Spectrogram& s, const TfMask& mask);

}  // namespace aeclab

#endif  // AECLAB_SIGNAL_STFT_H_

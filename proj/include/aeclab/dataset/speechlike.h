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

#ifndef AECLAB_DATASET_SPEECHLIKE_H_
#define AECLAB_DATASET_SPEECHLIKE_H_

#include <cstdint>

#include "aeclab/signal/waveform.h"

namespace aeclab {

inline constexpr double kSpeechlikeRms = 0.1;

// Stand-in for read speech: groups of one to three harmonic-plus-noise
// syllables with per-syllable pitch glides and formant shaping, separated by
// pauses of at least 120 ms. Normalized to RMS 0.1. Any output of one second
// or longer contains at least one such pause.
Waveform SynthSpeechlike(double duration_seconds, uint64_t seed,
                         int sample_rate = kDefaultSampleRate);

// Same generator, sized in samples.
Waveform SynthSpeechlikeSamples(size_t num_samples, uint64_t seed,
                                int sample_rate = kDefaultSampleRate);

}  // namespace aeclab

#endif  // AECLAB_DATASET_SPEECHLIKE_H_

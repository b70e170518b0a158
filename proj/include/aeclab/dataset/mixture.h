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

#ifndef AECLAB_DATASET_MIXTURE_H_
#define AECLAB_DATASET_MIXTURE_H_

#include <cstdint>
#include <string>

#include "aeclab/signal/waveform.h"

namespace aeclab {

inline constexpr int kMaxDelaySamples = 400;
inline constexpr int kDelayClassWidth = 10;
inline constexpr int kNumDelayClasses = kMaxDelaySamples / kDelayClassWidth + 1;

// floor(delay / 10): delays 10..19 all map to class 1.
inline int DelayClass(long delay_samples) {
  return static_cast<int>(delay_samples / kDelayClassWidth);
}

struct MixtureRecord {
  std::string id;
  std::string near;  // source id, see dataset.h
  std::string far;
  std::string rir;
  double ser_db = 0.0;
  int delay_samples = 0;
  int delay_class = 0;
  uint64_t seed = 0;
};

struct MixtureSignals {
  Waveform near;  // zero-padded to the far-end length
  Waveform ref;   // far-end, unmodified
  Waveform echo;  // delay_shift(far * rir, delay), before SER scaling
  Waveform mic;   // near + gain * echo
  double gain = 0.0;
  int delay_samples = 0;
  int delay_class = 0;

  // gain * echo: the echo component actually present in `mic`.
  Waveform ScaledEcho() const;
  // Single-talk microphone (near-end muted), equal to ScaledEcho().
  Waveform SingleTalkMic() const { return ScaledEcho(); }
};

MixtureSignals BuildMixture(const Waveform& near, const Waveform& far,
                            const Waveform& rir, double ser_db, int delay);

}  // namespace aeclab

#endif  // AECLAB_DATASET_MIXTURE_H_

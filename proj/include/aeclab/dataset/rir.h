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

#ifndef AECLAB_DATASET_RIR_H_
#define AECLAB_DATASET_RIR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/signal/waveform.h"

namespace aeclab {

// Exponentially decaying noise-tail room response.
struct RirSpec {
  double rt60 = 0.3;          // seconds
  int direct_path_offset = 0;  // samples before the direct-path peak
  int length = 0;              // samples; 0 picks offset + 1.2 * rt60 * fs
  uint64_t seed = 0;
  // RMS of the reverberant tail right after the direct path, relative to the
  // unit direct-path peak.
  double tail_level = 0.03;
};

// h[n] = 0 before the offset, h[offset] = 1 (the global |h| maximum), and a
// seeded Gaussian tail whose envelope falls by 60 dB over rt60 seconds.
Waveform SimulateRir(const RirSpec& spec, int sample_rate = kDefaultSampleRate);

struct NamedRir {
  std::string name;
  RirSpec spec;
};

// The four measured-room reverberation times the experiments quote
// (E1A 0.12 s, E1B 0.31 s, E1C 0.38 s, E2A 0.30 s), each given its own
// direct-path offset so peaks do not line up across rooms.
std::vector<NamedRir> DefaultRirCatalog();

// Name reserved for the identity response used by simple-delay scenarios.
inline constexpr char kDiracRir[] = "dirac";

// Resolves `name` against the catalog (or the dirac identity).
Waveform RenderRir(const std::string& name, const std::vector<NamedRir>& catalog,
                   int sample_rate);

// Parses "name:rt60:offset" into an extra catalog slot.
NamedRir ParseRirSlot(const std::string& text);

}  // namespace aeclab

#endif  // AECLAB_DATASET_RIR_H_

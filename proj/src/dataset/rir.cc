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

#include "aeclab/dataset/rir.h"

#include <algorithm>
#include <cmath>

#include "aeclab/error.h"
#include "aeclab/key_values.h"
#include "aeclab/random.h"

namespace aeclab {
namespace {

// Gaussian tail draws are clipped so the direct path stays the peak.
constexpr double kTailClip = 3.5;

}  // namespace

Waveform SimulateRir(const RirSpec& spec, int sample_rate) {
  if (!(spec.rt60 > 0.0)) throw Error("rt60 must be positive");
  if (spec.direct_path_offset < 0) throw Error("direct path offset must be >= 0");
  if (!(spec.tail_level >= 0.0 && spec.tail_level * kTailClip < 1.0)) {
    throw Error("tail level must be in [0, 1/3.5)");
  }
  const int length =
      spec.length > 0
          ? spec.length
          : spec.direct_path_offset +
                static_cast<int>(std::ceil(1.2 * spec.rt60 * sample_rate));
  if (length <= spec.direct_path_offset) {
    throw Error("rir length too short for direct path offset");
  }
  Waveform h(std::vector<double>(length, 0.0), sample_rate);
  h[spec.direct_path_offset] = 1.0;
  Rng rng(spec.seed);
  const double decay = 3.0 * std::log(10.0) / (sample_rate * spec.rt60);
  for (int n = spec.direct_path_offset + 1; n < length; ++n) {
    const double env = std::exp(-decay * (n - spec.direct_path_offset));
    const double draw = std::clamp(rng.Normal(), -kTailClip, kTailClip);
    h[n] = spec.tail_level * draw * env;
  }
  return h;
}

std::vector<NamedRir> DefaultRirCatalog() {
  struct Row {
    const char* name;
    double rt60;
    int offset;
  };
  static constexpr Row kRows[] = {
      {"E1A", 0.12, 6}, {"E1B", 0.31, 10}, {"E1C", 0.38, 14}, {"E2A", 0.30, 8}};
  std::vector<NamedRir> catalog;
  for (const Row& row : kRows) {
    RirSpec spec;
    spec.rt60 = row.rt60;
    spec.direct_path_offset = row.offset;
    spec.seed = DeriveSeed(0x52495253ull, row.name);
    catalog.push_back({row.name, spec});
  }
  return catalog;
}

Waveform RenderRir(const std::string& name, const std::vector<NamedRir>& catalog,
                   int sample_rate) {
  if (name == kDiracRir) return Waveform(std::vector<double>{1.0}, sample_rate);
  for (const NamedRir& rir : catalog) {
    if (rir.name == name) return SimulateRir(rir.spec, sample_rate);
  }
  throw Error("unknown rir id: " + name);
}

NamedRir ParseRirSlot(const std::string& text) {
  const auto parts = SplitList(text, ':');
  if (parts.size() != 3) {
    throw UsageError("rir slot must look like name:rt60:offset, got " + text);
  }
  NamedRir rir;
  rir.name = parts[0];
  try {
    rir.spec.rt60 = std::stod(parts[1]);
    rir.spec.direct_path_offset = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("bad rir slot: " + text);
  }
  rir.spec.seed = DeriveSeed(0x52495253ull, rir.name);
  return rir;
}

}  // namespace aeclab

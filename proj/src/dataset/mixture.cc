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

#include "aeclab/dataset/mixture.h"

#include "aeclab/error.h"
#include "aeclab/signal/dsp.h"

namespace aeclab {

Waveform MixtureSignals::ScaledEcho() const {
  Waveform out = echo;
  for (double& v : out.samples) v *= gain;
  return out;
}

MixtureSignals BuildMixture(const Waveform& near, const Waveform& far,
                            const Waveform& rir, double ser_db, int delay) {
  if (near.size() > far.size()) {
    throw Error("near-end longer than far-end; far must cover the near-end");
  }
  if (delay < 0) throw Error("delay must be nonnegative");
  MixtureSignals m;
  m.near = FitLength(near, far.size());
  m.ref = far;
  m.echo = DelayShift(Convolve(far, rir), delay);
  SerMix mix = MixAtSer(m.near, m.echo, ser_db);
  m.mic = std::move(mix.mic);
  m.gain = mix.gain;
  m.delay_samples = delay;
  m.delay_class = DelayClass(delay);
  return m;
}

}  // namespace aeclab

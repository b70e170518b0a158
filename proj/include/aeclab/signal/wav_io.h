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

#ifndef AECLAB_SIGNAL_WAV_IO_H_
#define AECLAB_SIGNAL_WAV_IO_H_

#include <string>

#include "aeclab/signal/waveform.h"

namespace aeclab {

enum class WavEncoding { kPcm16, kFloat32 };

// Reads a mono RIFF/WAVE file (16-bit PCM or 32-bit IEEE float). PCM samples
// are scaled by 1/32768.
Waveform ReadWav(const std::string& path);

// Writes mono little-endian WAV. PCM output is clipped to [-1, 1] and scaled
// by 32767.
void WriteWav(const std::string& path, const Waveform& w,
              WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace aeclab

#endif  // AECLAB_SIGNAL_WAV_IO_H_

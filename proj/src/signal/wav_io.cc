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

#include "aeclab/signal/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "aeclab/error.h"

namespace aeclab {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const uint8_t* p) {
  return uint32_t{p[0]} | uint32_t{p[1]} << 8 | uint32_t{p[2]} << 16 |
         uint32_t{p[3]} << 24;
}
uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void PutTag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  const std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw Error(path + ": not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* payload = nullptr;
  size_t payload_size = 0;
  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const uint8_t* chunk = data.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (body + size > data.size()) throw Error(path + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0 && size >= 16) {
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible && size >= 26) {
        format = ReadU16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = chunk + 8;
      payload_size = size;
    }
    pos = body + size + (size & 1);
  }
  if (payload == nullptr || rate == 0) throw Error(path + ": missing fmt or data");
  if (channels != 1) throw Error(path + ": only mono audio is supported");

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const size_t n = payload_size / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const auto v = static_cast<int16_t>(ReadU16(payload + 2 * i));
      w.samples[i] = v / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const size_t n = payload_size / 4;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const uint32_t bitsv = ReadU32(payload + 4 * i);
      float f;
      std::memcpy(&f, &bitsv, sizeof f);
      w.samples[i] = f;
    }
  } else {
    throw Error(path + ": unsupported sample format");
  }
  return w;
}

void WriteWav(const std::string& path, const Waveform& w,
              WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const uint16_t bytes_per_sample = pcm ? 2 : 4;
  const uint32_t data_size = static_cast<uint32_t>(w.size() * bytes_per_sample);
  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_size);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, pcm ? kFormatPcm : kFormatFloat);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(w.sample_rate));
  PutU32(out, static_cast<uint32_t>(w.sample_rate) * bytes_per_sample);
  PutU16(out, bytes_per_sample);
  PutU16(out, static_cast<uint16_t>(8 * bytes_per_sample));
  PutTag(out, "data");
  PutU32(out, data_size);
  for (double v : w.samples) {
    if (pcm) {
      const double c = std::clamp(v, -1.0, 1.0);
      PutU16(out, static_cast<uint16_t>(
                      static_cast<int16_t>(std::lround(c * 32767.0))));
    } else {
      const float f = static_cast<float>(v);
      uint32_t bitsv;
      std::memcpy(&bitsv, &f, sizeof f);
      PutU32(out, bitsv);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
}

}  // namespace aeclab

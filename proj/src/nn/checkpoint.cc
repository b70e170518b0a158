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

#include "aeclab/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "aeclab/error.h"

namespace aeclab::nn {
namespace {

constexpr char kMagic[8] = {'A', 'E', 'C', 'L', 'A', 'B', 'C', 'K'};
constexpr uint8_t kDtypeFloat32 = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw Error("cannot open checkpoint for writing: " + path);
  }
  void Bytes(const void* p, size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  template <typename U>
  void Pod(U v) {
    Bytes(&v, sizeof(v));
  }
  void String(const std::string& s) {
    Pod<uint64_t>(s.size());
    Bytes(s.data(), s.size());
  }
  void Close() {
    out_.close();
    if (!out_) throw Error("failed writing checkpoint: " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error("cannot open checkpoint: " + path);
  }
  void Bytes(void* p, size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw Error("truncated checkpoint: " + path_);
  }
  template <typename U>
  U Pod() {
    U v;
    Bytes(&v, sizeof(v));
    return v;
  }
  std::string String(size_t limit) {
    const uint64_t n = Pod<uint64_t>();
    if (n > limit) throw Error("corrupt checkpoint string length in " + path_);
    std::string s(n, '\0');
    Bytes(s.data(), n);
    return s;
  }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace

const NamedArray* Checkpoint::Find(const std::string& name) const {
  for (const NamedArray& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const NamedArray& Checkpoint::Get(const std::string& name, const Shape& shape) const {
  const NamedArray* a = Find(name);
  if (a == nullptr) throw Error("checkpoint has no array named " + name);
  if (a->shape != shape) {
    throw Error("checkpoint array " + name + " has shape " + ShapeToString(a->shape) +
                ", expected " + ShapeToString(shape));
  }
  return *a;
}

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  Writer w(path);
  w.Bytes(kMagic, sizeof(kMagic));
  w.Pod<uint32_t>(ckpt.version);
  w.String(ckpt.config_json);
  w.Pod<uint64_t>(ckpt.arrays.size());
  for (const NamedArray& a : ckpt.arrays) {
    if (NumElements(a.shape) != a.data.size()) {
      throw Error("array " + a.name + " data does not match its shape");
    }
    w.String(a.name);
    w.Pod<uint32_t>(static_cast<uint32_t>(a.shape.size()));
    for (size_t d : a.shape) w.Pod<uint64_t>(d);
    w.Pod<uint8_t>(kDtypeFloat32);
    w.Bytes(a.data.data(), a.data.size() * sizeof(float));
  }
  w.Close();
}

Checkpoint ReadCheckpoint(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.Bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw Error("not an aeclab checkpoint: " + path);
  }
  Checkpoint ckpt;
  ckpt.version = r.Pod<uint32_t>();
  if (ckpt.version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(ckpt.version));
  }
  ckpt.config_json = r.String(1 << 24);
  const uint64_t count = r.Pod<uint64_t>();
  if (count > (1u << 20)) throw Error("corrupt checkpoint array count in " + path);
  for (uint64_t i = 0; i < count; ++i) {
    NamedArray a;
    a.name = r.String(4096);
    const uint32_t ndim = r.Pod<uint32_t>();
    if (ndim > 8) throw Error("corrupt checkpoint rank for " + a.name);
    for (uint32_t d = 0; d < ndim; ++d) a.shape.push_back(r.Pod<uint64_t>());
    if (r.Pod<uint8_t>() != kDtypeFloat32) {
      throw Error("unsupported dtype for checkpoint array " + a.name);
    }
    const size_t n = NumElements(a.shape);
    if (n > (size_t{1} << 32)) throw Error("corrupt checkpoint size for " + a.name);
    a.data.resize(n);
    r.Bytes(a.data.data(), n * sizeof(float));
    ckpt.arrays.push_back(std::move(a));
  }
  return ckpt;
}

}  // namespace aeclab::nn

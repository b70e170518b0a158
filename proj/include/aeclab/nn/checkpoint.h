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

#ifndef AECLAB_NN_CHECKPOINT_H_
#define AECLAB_NN_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/nn/tensor.h"

namespace aeclab::nn {

inline constexpr uint32_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

// Binary layout is described in docs/checkpoint_format.md.
struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  std::string config_json;
  std::vector<NamedArray> arrays;

  const NamedArray* Find(const std::string& name) const;
  // Like Find, but throws when absent or when the shape differs.
  const NamedArray& Get(const std::string& name, const Shape& shape) const;
};

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::string& path);

}  // namespace aeclab::nn

#endif  // AECLAB_NN_CHECKPOINT_H_

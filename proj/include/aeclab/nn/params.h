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

#ifndef AECLAB_NN_PARAMS_H_
#define AECLAB_NN_PARAMS_H_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "aeclab/nn/checkpoint.h"
#include "aeclab/nn/ops.h"
#include "aeclab/random.h"

namespace aeclab::nn {

// Ordered, named collection of trainable tensors and batch-norm states.
template <typename T>
class ParameterStore {
 public:
  Tensor<T> Add(const std::string& name, Shape shape, std::vector<T> values);
  // Uniform Glorot initialisation with the given fan sizes.
  Tensor<T> AddGlorot(const std::string& name, Shape shape, size_t fan_in,
                      size_t fan_out, Rng& rng);
  Tensor<T> AddConstant(const std::string& name, Shape shape, T value);
  BatchNormState<T>* AddBatchNorm(const std::string& name, size_t channels);

  const std::vector<std::pair<std::string, Tensor<T>>>& params() const { return params_; }
  std::vector<Tensor<T>> tensors() const;
  size_t NumScalars() const;

  // Adds every parameter and running statistic to `ckpt`.
  void Save(Checkpoint* ckpt) const;
  // Loads values by name; throws on missing names or shape mismatch.
  void Load(const Checkpoint& ckpt);

 private:
  std::vector<std::pair<std::string, Tensor<T>>> params_;
  // Stable addresses: layers hold raw pointers into this list.
  std::vector<std::unique_ptr<std::pair<std::string, BatchNormState<T>>>> bn_;
};

}  // namespace aeclab::nn

#endif  // AECLAB_NN_PARAMS_H_

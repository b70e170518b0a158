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

#ifndef AECLAB_NN_ADAM_H_
#define AECLAB_NN_ADAM_H_

#include <cstdint>
#include <vector>

#include "aeclab/nn/tensor.h"

namespace aeclab::nn {

struct AdamOptions {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Parameters without a
// gradient are treated as having a zero one.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamOptions options = {});

  void Step();
  void ZeroGrad();

  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }
  int64_t step() const { return step_; }

  // Moment access for checkpointing.
  std::vector<std::vector<T>>& first_moments() { return m_; }
  std::vector<std::vector<T>>& second_moments() { return v_; }
  void set_step(int64_t step) { step_ = step; }

 private:
  std::vector<Tensor<T>> params_;
  AdamOptions options_;
  std::vector<std::vector<T>> m_, v_;
  int64_t step_ = 0;
};

}  // namespace aeclab::nn

#endif  // AECLAB_NN_ADAM_H_

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

#ifndef AECLAB_TESTS_SUPPORT_GRADCHECK_H_
#define AECLAB_TESTS_SUPPORT_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "aeclab/nn/tensor.h"
#include "aeclab/random.h"

namespace aeclab::testing {

using DTensor = nn::Tensor<double>;

inline DTensor RandomParam(nn::Shape shape, Rng& rng, double scale = 1.0) {
  std::vector<double> v(nn::NumElements(shape));
  for (double& x : v) x = scale * rng.Normal();
  return DTensor::Parameter(std::move(shape), std::move(v));
}

inline DTensor RandomConst(nn::Shape shape, Rng& rng, double scale = 1.0) {
  std::vector<double> v(nn::NumElements(shape));
  for (double& x : v) x = scale * rng.Normal();
  return DTensor::Constant(std::move(shape), std::move(v));
}

// Worst norm-relative error between analytic and central-difference
// gradients across `inputs`. `f` must rebuild the graph on every call.
// Gradients whose norm is below 1e-6 are compared in absolute terms.
inline double GradCheck(const std::function<DTensor()>& f,
                        std::vector<DTensor> inputs, double step = 1e-4) {
  for (DTensor& t : inputs) t.ZeroGrad();
  nn::Backward(f());
  double worst = 0.0;
  for (DTensor& t : inputs) {
    std::vector<double> analytic(t.grad().begin(), t.grad().end());
    std::vector<double> numeric(t.size());
    auto v = t.mutable_values();
    for (size_t i = 0; i < t.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + step;
      const double up = f().item();
      v[i] = saved - step;
      const double down = f().item();
      v[i] = saved;
      numeric[i] = (up - down) / (2.0 * step);
    }
    double diff = 0.0, na = 0.0, nn_ = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      na += analytic[i] * analytic[i];
      nn_ += numeric[i] * numeric[i];
    }
    const double denom = std::max({std::sqrt(na), std::sqrt(nn_), 1e-6});
    worst = std::max(worst, std::sqrt(diff) / denom);
  }
  return worst;
}

}  // namespace aeclab::testing

#endif  // AECLAB_TESTS_SUPPORT_GRADCHECK_H_

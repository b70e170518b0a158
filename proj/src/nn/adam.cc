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

#include "aeclab/nn/adam.h"

#include <cmath>

#include "aeclab/error.h"

namespace aeclab::nn {

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const Tensor<T>& p : params_) {
    if (!p.defined() || !p.requires_grad()) {
      throw Error("adam: every parameter must be a trainable tensor");
    }
    m_.emplace_back(p.size(), T(0));
    v_.emplace_back(p.size(), T(0));
  }
}

template <typename T>
void Adam<T>::Step() {
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, double(step_));
  const double c2 = 1.0 - std::pow(b2, double(step_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor<T>& p = params_[i];
    if (m_[i].size() != p.size() || v_[i].size() != p.size()) {
      throw Error("adam moments do not match parameter " + std::to_string(i));
    }
    if (!p.has_grad()) {
      // A zero gradient still decays the moments.
      for (size_t k = 0; k < p.size(); ++k) {
        m_[i][k] = static_cast<T>(b1 * m_[i][k]);
        v_[i][k] = static_cast<T>(b2 * v_[i][k]);
      }
    }
    auto g = p.has_grad() ? p.grad() : std::span<const T>();
    auto w = p.mutable_values();
    for (size_t k = 0; k < p.size(); ++k) {
      if (!g.empty()) {
        m_[i][k] = static_cast<T>(b1 * m_[i][k] + (1.0 - b1) * g[k]);
        v_[i][k] = static_cast<T>(b2 * v_[i][k] + (1.0 - b2) * double(g[k]) * g[k]);
      }
      const double mh = m_[i][k] / c1;
      const double vh = v_[i][k] / c2;
      w[k] = static_cast<T>(w[k] - options_.lr * mh / (std::sqrt(vh) + options_.eps));
    }
  }
}

template <typename T>
void Adam<T>::ZeroGrad() {
  for (Tensor<T>& p : params_) p.ZeroGrad();
}

template class Adam<float>;
template class Adam<double>;

}  // namespace aeclab::nn

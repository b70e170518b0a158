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

#include "aeclab/nn/params.h"

#include <cmath>

#include "aeclab/error.h"

namespace aeclab::nn {

template <typename T>
Tensor<T> ParameterStore<T>::Add(const std::string& name, Shape shape,
                                 std::vector<T> values) {
  for (const auto& [n, t] : params_) {
    if (n == name) throw Error("duplicate parameter name " + name);
  }
  Tensor<T> t = Tensor<T>::Parameter(std::move(shape), std::move(values));
  params_.emplace_back(name, t);
  return t;
}

template <typename T>
Tensor<T> ParameterStore<T>::AddGlorot(const std::string& name, Shape shape,
                                       size_t fan_in, size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
  std::vector<T> v(NumElements(shape));
  for (T& x : v) x = static_cast<T>(rng.Uniform(-limit, limit));
  return Add(name, std::move(shape), std::move(v));
}

template <typename T>
Tensor<T> ParameterStore<T>::AddConstant(const std::string& name, Shape shape, T value) {
  std::vector<T> v(NumElements(shape), value);
  return Add(name, std::move(shape), std::move(v));
}

template <typename T>
BatchNormState<T>* ParameterStore<T>::AddBatchNorm(const std::string& name,
                                                   size_t channels) {
  bn_.push_back(std::make_unique<std::pair<std::string, BatchNormState<T>>>(
      name, BatchNormState<T>(channels)));
  return &bn_.back()->second;
}

template <typename T>
std::vector<Tensor<T>> ParameterStore<T>::tensors() const {
  std::vector<Tensor<T>> out;
  for (const auto& [n, t] : params_) out.push_back(t);
  return out;
}

template <typename T>
size_t ParameterStore<T>::NumScalars() const {
  size_t n = 0;
  for (const auto& [name, t] : params_) n += t.size();
  return n;
}

template <typename T>
void ParameterStore<T>::Save(Checkpoint* ckpt) const {
  for (const auto& [name, t] : params_) {
    ckpt->arrays.push_back({name, t.shape(), std::vector<float>(t.values().begin(),
                                                                t.values().end())});
  }
  for (const auto& bn : bn_) {
    const auto& s = bn->second;
    ckpt->arrays.push_back({"bn.mean:" + bn->first, {s.running_mean.size()},
                            std::vector<float>(s.running_mean.begin(), s.running_mean.end())});
    ckpt->arrays.push_back({"bn.var:" + bn->first, {s.running_var.size()},
                            std::vector<float>(s.running_var.begin(), s.running_var.end())});
  }
}

template <typename T>
void ParameterStore<T>::Load(const Checkpoint& ckpt) {
  for (auto& [name, t] : params_) {
    const NamedArray& a = ckpt.Get(name, t.shape());
    auto dst = t.mutable_values();
    for (size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(a.data[i]);
  }
  for (auto& bn : bn_) {
    auto& s = bn->second;
    const NamedArray& m = ckpt.Get("bn.mean:" + bn->first, {s.running_mean.size()});
    const NamedArray& v = ckpt.Get("bn.var:" + bn->first, {s.running_var.size()});
    for (size_t i = 0; i < s.running_mean.size(); ++i) {
      s.running_mean[i] = static_cast<T>(m.data[i]);
      s.running_var[i] = static_cast<T>(v.data[i]);
    }
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace aeclab::nn

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

#include "aeclab/nn/tensor.h"

#include <unordered_set>

#include "aeclab/error.h"

namespace aeclab::nn {

size_t NumElements(const Shape& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string out = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    out += (i ? "," : "") + std::to_string(shape[i]);
  }
  return out + "]";
}

template <typename T>
std::vector<T>& Node<T>::MutableGrad() {
  if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  return grad;
}

template <typename T>
Tensor<T> Tensor<T>::Constant(Shape shape, std::vector<T> values) {
  if (NumElements(shape) != values.size()) {
    throw Error("tensor shape " + ShapeToString(shape) + " does not match " +
                std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::Zeros(Shape shape) {
  const size_t n = NumElements(shape);
  return Constant(std::move(shape), std::vector<T>(n, T(0)));
}

template <typename T>
Tensor<T> Tensor<T>::Full(Shape shape, T value) {
  const size_t n = NumElements(shape);
  return Constant(std::move(shape), std::vector<T>(n, value));
}

template <typename T>
Tensor<T> Tensor<T>::Parameter(Shape shape, std::vector<T> values) {
  Tensor t = Constant(std::move(shape), std::move(values));
  t.node_->requires_grad = true;
  return t;
}

template <typename T>
Tensor<T> Tensor<T>::FromOp(Shape shape, std::vector<T> values,
                            std::vector<Tensor> parents,
                            std::function<void(const Node<T>&)> backward) {
  Tensor t = Constant(std::move(shape), std::move(values));
  for (const Tensor& p : parents) {
    if (p.defined() && p.requires_grad()) t.node_->parents.push_back(p.node_);
  }
  if (!t.node_->parents.empty()) {
    t.node_->requires_grad = true;
    t.node_->backward = std::move(backward);
  }
  return t;
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) throw Error("item() on tensor of shape " + ShapeToString(shape()));
  return node_->value[0];
}

template <typename T>
void Tensor<T>::ZeroGrad() {
  node_->grad.assign(node_->value.size(), T(0));
}

template <typename T>
void AccumulateGrad(Node<T>* node, std::span<const T> delta) {
  if (node == nullptr || !node->requires_grad) return;
  std::vector<T>& g = node->MutableGrad();
  for (size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

template <typename T>
void Backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw Error("backward needs a scalar loss");
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  visited.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node<T>* node : order) {
    if (!node->is_leaf()) node->grad.assign(node->value.size(), T(0));
  }
  loss.node()->MutableGrad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!(*it)->is_leaf()) (*it)->backward(**it);
  }
}

template struct Node<float>;
template struct Node<double>;
template class Tensor<float>;
template class Tensor<double>;
template void Backward(const Tensor<float>&);
template void Backward(const Tensor<double>&);
template void AccumulateGrad(Node<float>*, std::span<const float>);
template void AccumulateGrad(Node<double>*, std::span<const double>);

}  // namespace aeclab::nn

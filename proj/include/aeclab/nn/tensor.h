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

#ifndef AECLAB_NN_TENSOR_H_
#define AECLAB_NN_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace aeclab::nn {

using Shape = std::vector<size_t>;

size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until a backward pass reaches this node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(const Node&)> backward;

  bool is_leaf() const { return !backward; }
  // Allocates a zero gradient on first use and returns it.
  std::vector<T>& MutableGrad();
};

// Reference-semantics handle to a node in a dynamically built graph. Copies
// share the node; ops create new nodes that remember their inputs.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor Constant(Shape shape, std::vector<T> values);
  static Tensor Zeros(Shape shape);
  static Tensor Full(Shape shape, T value);
  // Trainable leaf.
  static Tensor Parameter(Shape shape, std::vector<T> values);

  // Result of an op. Parents that do not require gradients are dropped, and
  // if none remain the backward function is discarded too.
  static Tensor FromOp(Shape shape, std::vector<T> values,
                       std::vector<Tensor> parents,
                       std::function<void(const Node<T>&)> backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  size_t dim(size_t i) const { return node_->shape.at(i); }
  size_t rank() const { return node_->shape.size(); }
  size_t size() const { return node_->value.size(); }

  std::span<const T> values() const { return node_->value; }
  std::span<T> mutable_values() { return node_->value; }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->MutableGrad(); }
  void ZeroGrad();

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared_node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}
  std::shared_ptr<Node<T>> node_;
};

// Reverse-mode pass from a scalar. Intermediate gradients are recomputed on
// every call; leaf gradients accumulate until ZeroGrad.
template <typename T>
void Backward(const Tensor<T>& loss);

// Adds `delta` into `node`'s gradient when the node wants one.
template <typename T>
void AccumulateGrad(Node<T>* node, std::span<const T> delta);

}  // namespace aeclab::nn

#endif  // AECLAB_NN_TENSOR_H_

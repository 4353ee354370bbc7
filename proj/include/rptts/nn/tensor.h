// Copyright 2026 The RephraseTTS Authors
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
// Define-by-run reverse-mode autodiff. Every op appends a node holding its
// value, its inputs and a closure that pushes the output gradient back to
// the inputs. Tensor is a cheap shared handle to a node.

#ifndef RPTTS_NN_TENSOR_H_
#define RPTTS_NN_TENSOR_H_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "rptts/nn/real.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

using Shape = std::vector<int>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

struct Node {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  // Returns the gradient buffer, zero-filled on first use.
  std::vector<Real>& grad_buffer();
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor full(const Shape& shape, Real v, bool requires_grad = false);
  static Tensor from(const Shape& shape, std::vector<Real> values, bool requires_grad = false);
  static Tensor scalar(Real v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int dim(int i) const;
  int ndim() const { return static_cast<int>(node_->shape.size()); }
  std::size_t size() const { return node_->value.size(); }
  // 2-D conveniences.
  int rows() const { return dim(0); }
  int cols() const { return dim(1); }

  Real* data() { return node_->value.data(); }
  const Real* data() const { return node_->value.data(); }
  std::vector<Real>& values() { return node_->value; }
  const std::vector<Real>& values() const { return node_->value; }
  Real item() const;
  Real at(std::size_t i) const { return node_->value[i]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }
  // Gradient buffer (allocated zero on first access).
  std::vector<Real>& grad() { return node_->grad_buffer(); }
  bool has_grad() const { return !node_->grad.empty(); }
  void zero_grad() { node_->grad.clear(); }

  // Reverse sweep from a scalar. Interior nodes drop their closures and
  // inputs afterwards, so each graph is differentiated once.
  void backward();

  // Same values, no history.
  Tensor detach() const;

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& ptr() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Grad mode is per-thread. While disabled, ops record no history.
bool grad_enabled();
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Creates the output node of an op. History is attached only when grad mode
// is on and some input requires grad; then `backward` is stored.
Tensor make_result(Shape shape, std::vector<Real> value, std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward);

// Nonsmooth ops (relu, abs, max pooling, hinge) report their branch choices
// here while a trace is active. Finite-difference checks compare traces to
// detect when a perturbation crossed a kink.
namespace kink {
class Trace {
 public:
  Trace();
  ~Trace();
  Trace(const Trace&) = delete;
  Trace& operator=(const Trace&) = delete;
  std::uint64_t digest() const { return hash_; }
  void mix(std::uint64_t v);

 private:
  std::uint64_t hash_;
  Trace* previous_;
};
bool active();
void record(std::uint64_t decision);
}  // namespace kink

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_TENSOR_H_

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
#include "rptts/nn/tensor.h"

#include <unordered_set>

#include "rptts/common/error.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {
namespace {

thread_local bool g_grad_enabled = true;
thread_local kink::Trace* g_trace = nullptr;

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) fail(ErrorCode::kShapeError, "negative dimension in " + shape_string(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::vector<Real>& Node::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), Real(0));
  return grad;
}

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) {
  return full(shape, Real(0), requires_grad);
}

Tensor Tensor::full(const Shape& shape, Real v, bool requires_grad) {
  return from(shape, std::vector<Real>(numel(shape), v), requires_grad);
}

Tensor Tensor::from(const Shape& shape, std::vector<Real> values, bool requires_grad) {
  if (values.size() != numel(shape)) {
    fail(ErrorCode::kShapeError, "value count " + std::to_string(values.size()) +
                                     " does not match shape " + shape_string(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = shape;
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(Real v, bool requires_grad) { return from({1}, {v}, requires_grad); }

int Tensor::dim(int i) const {
  if (i < 0 || i >= ndim()) {
    fail(ErrorCode::kShapeError, "axis " + std::to_string(i) + " out of range for " +
                                     shape_string(shape()));
  }
  return node_->shape[i];
}

Real Tensor::item() const {
  if (size() != 1) fail(ErrorCode::kShapeError, "item() on " + shape_string(shape()));
  return node_->value[0];
}

Tensor Tensor::detach() const {
  auto node = std::make_shared<Node>();
  node->shape = node_->shape;
  node->value = node_->value;
  return Tensor(std::move(node));
}

void Tensor::backward() {
  if (size() != 1) fail(ErrorCode::kShapeError, "backward() needs a scalar");
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->inputs.size()) {
      Node* child = n->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.push_back({child, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->grad_buffer()[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
  for (Node* n : order) {
    if (n->backward) {
      n->backward = nullptr;
      n->inputs.clear();
      if (n != node_.get()) n->grad.clear();
    }
  }
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor make_result(Shape shape, std::vector<Real> value, std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& t : inputs) any = any || t.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (auto& t : inputs) node->inputs.push_back(t.ptr());
      node->backward = std::move(backward);
    }
  }
  return Tensor(std::move(node));
}

namespace kink {

Trace::Trace() : hash_(1469598103934665603ULL), previous_(g_trace) { g_trace = this; }
Trace::~Trace() { g_trace = previous_; }

void Trace::mix(std::uint64_t v) {
  hash_ ^= v + 0x9e3779b97f4a7c15ULL + (hash_ << 6) + (hash_ >> 2);
  hash_ *= 1099511628211ULL;
}

bool active() { return g_trace != nullptr; }
void record(std::uint64_t decision) {
  if (g_trace) g_trace->mix(decision);
}

}  // namespace kink

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

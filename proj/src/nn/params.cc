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

#include "rptts/nn/params.h"

#include <cmath>
#include <string_view>

#include "rptts/common/error.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

Tensor ParamStore::add(const std::string& name, const Shape& shape, std::vector<Real> values) {
  const std::string full = prefix_.empty() ? name : prefix_ + "." + name;
  for (const auto& [n, t] : params_) {
    if (n == full) fail(ErrorCode::kInvalidConfig, "duplicate parameter name " + full);
  }
  Tensor t = Tensor::from(shape, std::move(values), true);
  params_.emplace_back(full, t);
  return t;
}

Tensor ParamStore::add_xavier(const std::string& name, const Shape& shape, int fan_in,
                              int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<Real> v(numel(shape));
  for (auto& x : v) x = static_cast<Real>(u(rng));
  return add(name, shape, std::move(v));
}

Tensor ParamStore::add_normal(const std::string& name, const Shape& shape, double stddev,
                              Rng& rng) {
  std::normal_distribution<double> nd(0.0, stddev);
  std::vector<Real> v(numel(shape));
  for (auto& x : v) x = static_cast<Real>(nd(rng));
  return add(name, shape, std::move(v));
}

Tensor ParamStore::add_constant(const std::string& name, const Shape& shape, Real value) {
  return add(name, shape, std::vector<Real>(numel(shape), value));
}

Tensor ParamStore::get(const std::string& name) const {
  for (const auto& [n, t] : params_) {
    if (n == name) return t;
  }
  fail(ErrorCode::kInvalidInput, "no parameter named " + name);
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) n += t.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : params_) t.zero_grad();
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for (const auto& [name, t] : params_) {
    if (!t.has_grad()) continue;
    for (Real g : t.node()->grad) s += static_cast<double>(g) * g;
  }
  return std::sqrt(s);
}

void ParamStore::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (!(norm > max_norm) || max_norm <= 0.0) return;
  const Real k = static_cast<Real>(max_norm / norm);
  for (auto& [name, t] : params_) {
    if (!t.has_grad()) continue;
    for (Real& g : t.node()->grad) g *= k;
  }
}

std::uint64_t ParamStore::hash() const {
  std::uint64_t h = fnv1a("");
  for (const auto& [name, t] : params_) {
    h = fnv1a(name, h);
    h = fnv1a(std::string_view(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(Real)),
              h);
  }
  return h;
}

void ParamStore::set_trainable(bool trainable) {
  for (auto& [name, t] : params_) t.set_requires_grad(trainable);
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

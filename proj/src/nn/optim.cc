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

#include "rptts/nn/optim.h"

#include <cmath>

#include "rptts/common/error.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

void adam_update(std::span<Real> param, std::span<const Real> grad, std::span<Real> m,
                 std::span<Real> v, long t, double lr, const AdamConfig& cfg) {
  if (grad.size() != param.size() || m.size() != param.size() || v.size() != param.size()) {
    fail(ErrorCode::kShapeError, "adam_update: state size mismatch");
  }
  if (t < 1) fail(ErrorCode::kInvalidInput, "adam_update: step index starts at 1");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  const Real b1 = static_cast<Real>(cfg.beta1), b2 = static_cast<Real>(cfg.beta2);
  const Real step = static_cast<Real>(lr / c1);
  const Real inv_sqrt_c2 = static_cast<Real>(1.0 / std::sqrt(c2));
  const Real eps = static_cast<Real>(cfg.eps);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const Real g = grad[i];
    m[i] = b1 * m[i] + (Real(1) - b1) * g;
    v[i] = b2 * v[i] + (Real(1) - b2) * g * g;
    param[i] -= step * m[i] / (std::sqrt(v[i]) * inv_sqrt_c2 + eps);
  }
}

Adam::Adam(const ParamStore& ps, AdamConfig cfg) : cfg_(cfg) {
  for (const auto& [name, t] : ps.entries()) {
    m_.emplace_back(t.size(), Real(0));
    v_.emplace_back(t.size(), Real(0));
  }
}

void Adam::step(ParamStore& ps, double lr) {
  auto& entries = ps.entries();
  if (entries.size() != m_.size()) fail(ErrorCode::kShapeError, "Adam built for another store");
  ++t_;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor& p = entries[i].second;
    if (!p.has_grad()) continue;
    adam_update(p.values(), p.node()->grad, m_[i], v_[i], t_, lr, cfg_);
  }
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

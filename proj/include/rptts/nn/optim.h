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

#ifndef RPTTS_NN_OPTIM_H_
#define RPTTS_NN_OPTIM_H_

#include <span>
#include <vector>

#include "rptts/nn/params.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update of a single parameter; `t` is the 1-based
// step index. Pure apart from the spans it writes.
void adam_update(std::span<Real> param, std::span<const Real> grad, std::span<Real> m,
                 std::span<Real> v, long t, double lr, const AdamConfig& cfg);

class Adam {
 public:
  Adam() = default;
  Adam(const ParamStore& ps, AdamConfig cfg = {});

  // Parameters without a gradient buffer are left untouched.
  void step(ParamStore& ps, double lr);

  long steps() const { return t_; }
  void set_steps(long t) { t_ = t; }
  const AdamConfig& config() const { return cfg_; }
  std::vector<std::vector<Real>>& first_moments() { return m_; }
  std::vector<std::vector<Real>>& second_moments() { return v_; }
  const std::vector<std::vector<Real>>& first_moments() const { return m_; }
  const std::vector<std::vector<Real>>& second_moments() const { return v_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<Real>> m_, v_;
};

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_OPTIM_H_

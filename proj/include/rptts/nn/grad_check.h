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

#ifndef RPTTS_NN_GRAD_CHECK_H_
#define RPTTS_NN_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rptts/nn/tensor.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

struct GradCheckOptions {
  double h = 1e-3;
  double tol = 1e-4;
  // Coordinates sampled per input; 0 checks every coordinate.
  int max_coords_per_input = 0;
  std::uint64_t seed = 1;
  // Lower bound on the relative-error denominator, so coordinates whose true
  // gradient is exactly zero are compared absolutely.
  double denominator_floor = 1e-6;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Coordinates where x +- h changes a branch decision of a nonsmooth op.
  std::size_t skipped_nondifferentiable = 0;
  bool passed = true;
  std::string worst;  // "input i, coord j: analytic a vs numeric n"

  std::string summary() const;
};

// Compares reverse-mode gradients of the scalar `fn()` with respect to each
// tensor in `inputs` (leaves that `fn` reads) against central differences.
// `fn` must be deterministic; inputs are perturbed in place and restored.
GradCheckReport grad_check(const std::function<Tensor()>& fn, std::vector<Tensor> inputs,
                           const GradCheckOptions& options = {});

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_GRAD_CHECK_H_

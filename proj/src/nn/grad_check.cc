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

#include "rptts/nn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rptts/common/rng.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {
namespace {

struct Eval {
  double value;
  std::uint64_t kinks;
};

Eval evaluate(const std::function<Tensor()>& fn) {
  NoGradGuard no_grad;
  kink::Trace trace;
  const Tensor y = fn();
  return {static_cast<double>(y.item()), trace.digest()};
}

}  // namespace

std::string GradCheckReport::summary() const {
  std::ostringstream s;
  s << (passed ? "ok" : "FAILED") << " max_rel_err=" << max_rel_error << " checked=" << checked;
  if (skipped_nondifferentiable > 0) {
    s << " skipped at nondifferentiable point=" << skipped_nondifferentiable;
  }
  if (!passed) s << " worst: " << worst;
  return s.str();
}

GradCheckReport grad_check(const std::function<Tensor()>& fn, std::vector<Tensor> inputs,
                           const GradCheckOptions& options) {
  GradCheckReport report;
  for (auto& t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  std::uint64_t base_kinks = 0;
  {
    kink::Trace trace;
    Tensor y = fn();
    base_kinks = trace.digest();
    y.backward();
  }
  Rng rng(options.seed);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Tensor& x = inputs[i];
    const std::vector<Real> analytic =
        x.has_grad() ? x.node()->grad : std::vector<Real>(x.size(), Real(0));
    std::vector<std::size_t> coords(x.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_input > 0 &&
        coords.size() > static_cast<std::size_t>(options.max_coords_per_input)) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_input);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t c : coords) {
      const Real saved = x.values()[c];
      // Richardson extrapolation of central differences at h and h/2 cancels
      // the h^2 truncation term.
      const double steps[4] = {options.h, -options.h, options.h / 2, -options.h / 2};
      Eval e[4];
      for (int k = 0; k < 4; ++k) {
        x.values()[c] = static_cast<Real>(saved + steps[k]);
        e[k] = evaluate(fn);
      }
      x.values()[c] = saved;
      if (std::any_of(std::begin(e), std::end(e),
                      [&](const Eval& v) { return v.kinks != base_kinks; })) {
        ++report.skipped_nondifferentiable;
        continue;
      }
      const double d_h = (e[0].value - e[1].value) / (2.0 * options.h);
      const double d_half = (e[2].value - e[3].value) / options.h;
      const double numeric = (4.0 * d_half - d_h) / 3.0;
      const double a = analytic[c];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > report.max_rel_error || std::isnan(rel)) {
        report.max_rel_error = std::isnan(rel) ? INFINITY : rel;
        std::ostringstream w;
        w << "input " << i << ", coord " << c << ": analytic " << a << " vs numeric " << numeric;
        report.worst = w.str();
      }
    }
  }
  report.passed = report.max_rel_error < options.tol;
  for (auto& t : inputs) t.zero_grad();
  return report;
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

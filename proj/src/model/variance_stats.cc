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

#include "rptts/model/variance_stats.h"

#include <algorithm>
#include <cmath>

#include "rptts/common/error.h"

namespace rptts::model {

int VarianceStats::bucket(double z, int n_bins) const {
  const double span = max - min;
  if (!(span > 0.0)) return n_bins / 2;
  const double pos = std::floor((z - min) / span * n_bins);
  return static_cast<int>(std::clamp(pos, 0.0, static_cast<double>(n_bins - 1)));
}

VarianceStats VarianceStats::fit(const std::vector<double>& values, bool skip_zero) {
  VarianceStats s;
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (skip_zero && v == 0.0) continue;
    sum += v;
    sq += v * v;
    ++n;
  }
  if (n == 0) return s;
  s.mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sq / static_cast<double>(n) - s.mean * s.mean);
  s.std = var > 1e-12 ? std::sqrt(var) : 1.0;
  s.min = INFINITY;
  s.max = -INFINITY;
  for (double v : values) {
    const double z = s.normalize(v);
    s.min = std::min(s.min, z);
    s.max = std::max(s.max, z);
  }
  return s;
}

NormStats NormStats::fit(const std::vector<corpus::TrainingExample>& examples) {
  if (examples.empty()) fail(ErrorCode::kInvalidInput, "cannot fit statistics on no examples");
  std::vector<double> pitch, energy;
  for (const auto& ex : examples) {
    pitch.insert(pitch.end(), ex.pitch_ph.begin(), ex.pitch_ph.end());
    energy.insert(energy.end(), ex.energy_ph.begin(), ex.energy_ph.end());
  }
  return {VarianceStats::fit(pitch, true), VarianceStats::fit(energy, false)};
}

}  // namespace rptts::model

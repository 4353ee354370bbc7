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

#ifndef RPTTS_MODEL_VARIANCE_STATS_H_
#define RPTTS_MODEL_VARIANCE_STATS_H_

#include <vector>

#include "rptts/corpus/example.h"

namespace rptts::model {

// Z-score normalization plus uniform quantization range for one variance
// feature (pitch or energy).
struct VarianceStats {
  double mean = 0.0;
  double std = 1.0;
  double min = -1.0;  // normalized
  double max = 1.0;   // normalized

  double normalize(double raw) const { return (raw - mean) / std; }
  double denormalize(double z) const { return z * std + mean; }
  // Bin index in [0, n_bins) of a normalized value; uniform over [min, max].
  int bucket(double z, int n_bins) const;

  // Mean/std over `values` (skipping zeros when `skip_zero`, i.e. unvoiced
  // pitch); min/max over all normalized values.
  static VarianceStats fit(const std::vector<double>& values, bool skip_zero);
};

struct NormStats {
  VarianceStats pitch;
  VarianceStats energy;

  static NormStats fit(const std::vector<corpus::TrainingExample>& examples);
};

}  // namespace rptts::model

#endif  // RPTTS_MODEL_VARIANCE_STATS_H_

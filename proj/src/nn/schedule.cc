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

#include "rptts/nn/schedule.h"

#include <cmath>

#include "rptts/common/error.h"

namespace rptts::nn {

void LrSchedule::validate() const {
  for (std::size_t i = 1; i < milestones.size(); ++i) {
    if (milestones[i] <= milestones[i - 1]) {
      fail(ErrorCode::kInvalidConfig, "learning-rate milestones must be strictly increasing");
    }
  }
  if (!(initial_lr >= 0.0) || !(decay_factor > 0.0)) {
    fail(ErrorCode::kInvalidConfig, "learning rate and decay factor must be positive");
  }
}

double lr_at(const LrSchedule& schedule, long long step) {
  if (step < 0) fail(ErrorCode::kInvalidInput, "negative step");
  int passed = 0;
  for (long long m : schedule.milestones) passed += m <= step ? 1 : 0;
  double lr = schedule.initial_lr;
  for (int i = 0; i < passed; ++i) lr *= schedule.decay_factor;
  return lr;
}

}  // namespace rptts::nn

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

#ifndef RPTTS_NN_SCHEDULE_H_
#define RPTTS_NN_SCHEDULE_H_

#include <vector>

namespace rptts::nn {

// Step decay: initial_lr * decay_factor^(number of milestones <= step).
struct LrSchedule {
  double initial_lr = 0.0625;
  double decay_factor = 0.3;
  std::vector<long long> milestones = {75000, 125000, 150000};

  // Throws InvalidConfig unless milestones are strictly increasing.
  void validate() const;
};

double lr_at(const LrSchedule& schedule, long long step);

}  // namespace rptts::nn

#endif  // RPTTS_NN_SCHEDULE_H_

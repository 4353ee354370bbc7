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

#ifndef RPTTS_LOSSES_WEIGHTS_H_
#define RPTTS_LOSSES_WEIGHTS_H_

#include <set>
#include <string>

#include "rptts/common/kv_config.h"

namespace rptts::losses {

struct LossWeights {
  double lambda1 = 2.0;     // extra weight on the inserted rows of the L1 loss
  double adv_global = 1.0;
  double feat_global = 2.0;
  double adv_local = 1.0;
  double feat_local = 2.0;
  double style = 2.0;
  double margin = 0.2;
  double variance = 1.0;    // each of pitch, energy and log-duration

  // Throws InvalidConfig on negative entries.
  void validate() const;
  // Keys are "loss.<field>".
  void write(KvConfig& kv) const;
  static LossWeights read(const KvConfig& kv, const LossWeights& defaults);
  static std::set<std::string> keys();
};

}  // namespace rptts::losses

#endif  // RPTTS_LOSSES_WEIGHTS_H_

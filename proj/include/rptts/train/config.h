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

#ifndef RPTTS_TRAIN_CONFIG_H_
#define RPTTS_TRAIN_CONFIG_H_

#include <cstdint>
#include <set>
#include <string>

#include "rptts/common/kv_config.h"
#include "rptts/losses/weights.h"
#include "rptts/model/config.h"
#include "rptts/nn/schedule.h"

namespace rptts::train {

struct TrainConfig {
  long long phase1_steps = 75000;
  long long phase2_steps = 125000;
  int batch_size = 16;
  nn::LrSchedule generator_lr{0.0625, 0.3, {75000, 125000, 150000}};
  // Discriminators and style extractor.
  nn::LrSchedule aux_lr{0.001, 1.0, {}};
  losses::LossWeights weights;
  std::uint64_t seed = 1;
  long long checkpoint_every = 0;  // 0: only the final checkpoint
  double grad_clip = 1.0;          // global norm per network; 0 disables
  // Writes 0 for wall-clock columns so metric logs are reproducible.
  bool deterministic = true;
  model::ModelConfig model;

  static TrainConfig full_scale();
  static TrainConfig desk();

  long long total_steps() const { return phase1_steps + phase2_steps; }
  // 1 while step < phase1_steps, then 2.
  int phase_of(long long step) const { return step < phase1_steps ? 1 : 2; }

  // Throws InvalidConfig.
  void validate() const;

  // Keys: "train.*", "lr.*", "loss.*", "model.*".
  KvConfig to_kv() const;
  // Rejects unknown keys.
  static TrainConfig from_kv(const KvConfig& kv, const TrainConfig& defaults);
  static std::set<std::string> keys();
};

}  // namespace rptts::train

#endif  // RPTTS_TRAIN_CONFIG_H_

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

#include "rptts/train/config.h"

#include "rptts/common/error.h"

namespace rptts::train {
namespace {

std::string join(const std::vector<long long>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

TrainConfig TrainConfig::full_scale() {
  TrainConfig c;
  c.model = model::ModelConfig::full_scale();
  return c;
}

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.phase1_steps = 1500;
  c.phase2_steps = 500;
  c.batch_size = 4;
  // Milestones keep their ratio to the phase lengths; the initial value is an
  // absolute Adam step size that trains the small model stably.
  c.generator_lr = {1e-3, 0.3, {1500, 2500, 3000}};
  c.checkpoint_every = 1000;
  c.model = model::ModelConfig::desk();
  return c;
}

void TrainConfig::validate() const {
  if (phase1_steps < 0 || phase2_steps < 0 || total_steps() <= 0) {
    fail(ErrorCode::kInvalidConfig, "train steps must be >= 0 with a positive total");
  }
  if (batch_size < 1) fail(ErrorCode::kInvalidConfig, "train.batch_size must be >= 1");
  if (checkpoint_every < 0) fail(ErrorCode::kInvalidConfig, "train.checkpoint_every must be >= 0");
  if (!(grad_clip >= 0.0)) fail(ErrorCode::kInvalidConfig, "train.grad_clip must be >= 0");
  if (!(generator_lr.initial_lr > 0.0) || !(aux_lr.initial_lr > 0.0)) {
    fail(ErrorCode::kInvalidConfig, "learning rates must be > 0");
  }
  generator_lr.validate();
  aux_lr.validate();
  weights.validate();
  model.validate();
}

KvConfig TrainConfig::to_kv() const {
  KvConfig kv;
  kv.set("train.phase1_steps", std::to_string(phase1_steps));
  kv.set("train.phase2_steps", std::to_string(phase2_steps));
  kv.set("train.batch_size", std::to_string(batch_size));
  kv.set("train.seed", std::to_string(static_cast<long long>(seed)));
  kv.set("train.checkpoint_every", std::to_string(checkpoint_every));
  kv.set("train.grad_clip", format_double(grad_clip));
  kv.set("train.deterministic", deterministic ? "true" : "false");
  kv.set("lr.generator_initial", format_double(generator_lr.initial_lr));
  kv.set("lr.generator_decay", format_double(generator_lr.decay_factor));
  kv.set("lr.generator_milestones", join(generator_lr.milestones));
  kv.set("lr.aux_initial", format_double(aux_lr.initial_lr));
  kv.set("lr.aux_decay", format_double(aux_lr.decay_factor));
  kv.set("lr.aux_milestones", join(aux_lr.milestones));
  weights.write(kv);
  model.write(kv);
  return kv;
}

TrainConfig TrainConfig::from_kv(const KvConfig& kv, const TrainConfig& defaults) {
  kv.reject_unknown(keys());
  TrainConfig c = defaults;
  c.phase1_steps = kv.get_int64("train.phase1_steps", c.phase1_steps);
  c.phase2_steps = kv.get_int64("train.phase2_steps", c.phase2_steps);
  c.batch_size = kv.get_int("train.batch_size", c.batch_size);
  c.seed = static_cast<std::uint64_t>(kv.get_int64("train.seed", static_cast<long long>(c.seed)));
  c.checkpoint_every = kv.get_int64("train.checkpoint_every", c.checkpoint_every);
  c.grad_clip = kv.get_double("train.grad_clip", c.grad_clip);
  c.deterministic = kv.get_bool("train.deterministic", c.deterministic);
  c.generator_lr.initial_lr = kv.get_double("lr.generator_initial", c.generator_lr.initial_lr);
  c.generator_lr.decay_factor = kv.get_double("lr.generator_decay", c.generator_lr.decay_factor);
  c.generator_lr.milestones = kv.get_int_list("lr.generator_milestones", c.generator_lr.milestones);
  c.aux_lr.initial_lr = kv.get_double("lr.aux_initial", c.aux_lr.initial_lr);
  c.aux_lr.decay_factor = kv.get_double("lr.aux_decay", c.aux_lr.decay_factor);
  c.aux_lr.milestones = kv.get_int_list("lr.aux_milestones", c.aux_lr.milestones);
  c.weights = losses::LossWeights::read(kv, c.weights);
  c.model = model::ModelConfig::read(kv, c.model);
  c.validate();
  return c;
}

std::set<std::string> TrainConfig::keys() {
  std::set<std::string> out = {
      "train.phase1_steps",   "train.phase2_steps",     "train.batch_size",
      "train.seed",           "train.checkpoint_every", "train.grad_clip",
      "train.deterministic",  "lr.generator_initial",   "lr.generator_decay",
      "lr.generator_milestones", "lr.aux_initial",      "lr.aux_decay",
      "lr.aux_milestones"};
  out.merge(losses::LossWeights::keys());
  out.merge(model::ModelConfig::keys());
  return out;
}

}  // namespace rptts::train

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

// Two-phase training: reconstruction only, then the adversarial and style
// objectives with one update of each auxiliary network per generator update.

#ifndef RPTTS_TRAIN_TRAINER_H_
#define RPTTS_TRAIN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "rptts/corpus/example.h"
#include "rptts/model/generator.h"
#include "rptts/model/resnet.h"
#include "rptts/nn/optim.h"
#include "rptts/train/config.h"

namespace rptts::train {

struct Models {
  Models(const model::ModelConfig& cfg, Rng& init_rng);

  model::Generator g;
  model::Discriminator dg;
  model::Discriminator dl;
  model::StyleExtractor fs;
};

struct TrainState {
  TrainConfig config;
  std::unique_ptr<Models> models;
  nn::Adam adam_g, adam_dg, adam_dl, adam_fs;
  long long step = 0;  // completed steps
  Rng rng;             // segmentation, batching, dropout, window offsets

  int phase() const { return config.phase_of(step); }
};

// Fresh parameters from config.seed; variance statistics fitted on `examples`.
TrainState init_state(const TrainConfig& config,
                      const std::vector<corpus::TrainingExample>& examples);

struct StepMetrics {
  long long step = 0;  // 1-based index of the step just taken
  int phase = 1;
  double rec = 0, pitch = 0, energy = 0, duration = 0;
  double adv_global = 0, feat_global = 0, adv_local = 0, feat_local = 0, style = 0;
  double d_global = 0, d_local = 0, style_extractor = 0;
  double total = 0;
  double lr_generator = 0, lr_aux = 0;
  double grad_norm = 0;  // generator, before clipping
  int windows = 0;       // local windows in the batch
  double wall_ms = 0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const StepMetrics& m);

// Parameter hashes of the four networks around one sub-step.
struct SubStepHashes {
  std::string name;  // "dg", "dl", "fs" or "g"
  std::uint64_t before[4];
  std::uint64_t after[4];
};

// One optimization step on `batch` (indices into `examples`). With `hashes`
// set, parameter hashes are recorded around every sub-step. Throws
// NonFiniteLoss naming the step and loss term.
StepMetrics train_step(TrainState& state, const std::vector<corpus::TrainingExample>& examples,
                       const std::vector<int>& batch, std::vector<SubStepHashes>* hashes = nullptr);

// Draws batch_size distinct indices (with repeats only when the store is
// smaller than the batch).
std::vector<int> draw_batch(TrainState& state, int n_examples);

struct LoopOptions {
  std::filesystem::path out_dir;  // checkpoints and metrics.csv; empty: none written
  // Stop once state.step reaches this (-1: run to the end); an early stop
  // writes ckpt_<step>.bin.
  long long stop_after = -1;
  std::ostream* log = nullptr;    // progress lines
  std::function<void(const StepMetrics&)> on_step;
};

// Runs from state.step to the configured total. Appends to
// <out_dir>/metrics.csv (header written when the file is new) and writes
// <out_dir>/ckpt_<step>.bin every checkpoint_every steps plus final.bin.
std::vector<StepMetrics> train_loop(TrainState& state,
                                    const std::vector<corpus::TrainingExample>& examples,
                                    const LoopOptions& options);

void save_checkpoint(const TrainState& state, const std::filesystem::path& path);
// Rebuilds the state from the configuration stored in the file.
TrainState load_checkpoint(const std::filesystem::path& path);
// Throws ConfigMismatch when the stored configuration differs from `expected`.
TrainState load_checkpoint(const std::filesystem::path& path, const TrainConfig& expected);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, long long step);

}  // namespace rptts::train

#endif  // RPTTS_TRAIN_TRAINER_H_

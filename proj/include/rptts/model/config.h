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

#ifndef RPTTS_MODEL_CONFIG_H_
#define RPTTS_MODEL_CONFIG_H_

#include <set>
#include <string>

#include "rptts/common/kv_config.h"

namespace rptts::model {

// Architecture hyperparameters. Defaults are the full-size model; desk()
// shrinks widths and depths for single-machine training.
struct ModelConfig {
  int n_phonemes = 101;
  int d_mel = 80;
  int d = 256;
  int enc_blocks = 4;
  int dec_blocks = 4;
  int heads = 2;   // FFT-block self-attention and cross-modal attention
  int d_k = 128;
  int d_v = 128;
  int ffn_filter = 1024;
  int ffn_kernel = 9;
  double dropout = 0.1;
  int predictor_filter = 256;
  int predictor_kernel = 3;
  double predictor_dropout = 0.5;
  int n_bins = 256;
  int window_len = 96;
  int window_hop = 48;
  int d_style = 512;
  int resnet_width = 64;
  int resnet_groups = 8;
  double log_floor = 1e-5;

  static ModelConfig full_scale();
  static ModelConfig desk();

  // Throws InvalidConfig on non-positive sizes or odd d.
  void validate() const;

  // Keys are "model.<field>".
  void write(KvConfig& kv) const;
  static ModelConfig read(const KvConfig& kv, const ModelConfig& defaults);
  static ModelConfig read(const KvConfig& kv);
  static std::set<std::string> keys();
};

}  // namespace rptts::model

#endif  // RPTTS_MODEL_CONFIG_H_

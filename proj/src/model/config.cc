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

#include "rptts/model/config.h"

#include "rptts/common/error.h"

namespace rptts::model {
namespace {

// Visits every field with its key so reading, writing and key listing agree.
template <typename Config, typename F>
void for_each_field(Config& c, F&& f) {
  f("n_phonemes", c.n_phonemes);
  f("d_mel", c.d_mel);
  f("d", c.d);
  f("enc_blocks", c.enc_blocks);
  f("dec_blocks", c.dec_blocks);
  f("heads", c.heads);
  f("d_k", c.d_k);
  f("d_v", c.d_v);
  f("ffn_filter", c.ffn_filter);
  f("ffn_kernel", c.ffn_kernel);
  f("dropout", c.dropout);
  f("predictor_filter", c.predictor_filter);
  f("predictor_kernel", c.predictor_kernel);
  f("predictor_dropout", c.predictor_dropout);
  f("n_bins", c.n_bins);
  f("window_len", c.window_len);
  f("window_hop", c.window_hop);
  f("d_style", c.d_style);
  f("resnet_width", c.resnet_width);
  f("resnet_groups", c.resnet_groups);
  f("log_floor", c.log_floor);
}

}  // namespace

ModelConfig ModelConfig::full_scale() { return ModelConfig(); }

ModelConfig ModelConfig::desk() {
  ModelConfig c;
  c.d = 64;
  c.enc_blocks = 2;
  c.dec_blocks = 2;
  c.d_k = 32;
  c.d_v = 32;
  c.ffn_filter = 256;
  c.predictor_filter = 64;
  c.resnet_width = 16;
  c.resnet_groups = 4;
  return c;
}

void ModelConfig::validate() const {
  auto positive = [](const char* name, int v) {
    if (v <= 0) fail(ErrorCode::kInvalidConfig, std::string("model.") + name + " must be > 0");
  };
  positive("n_phonemes", n_phonemes);
  positive("d_mel", d_mel);
  positive("d", d);
  positive("enc_blocks", enc_blocks);
  positive("dec_blocks", dec_blocks);
  positive("heads", heads);
  positive("d_k", d_k);
  positive("d_v", d_v);
  positive("ffn_filter", ffn_filter);
  positive("predictor_filter", predictor_filter);
  positive("n_bins", n_bins);
  positive("window_len", window_len);
  positive("window_hop", window_hop);
  positive("d_style", d_style);
  positive("resnet_width", resnet_width);
  positive("resnet_groups", resnet_groups);
  if (d % 2 != 0) fail(ErrorCode::kOddDimension, "model.d must be even");
  if (ffn_kernel % 2 == 0 || predictor_kernel % 2 == 0) {
    fail(ErrorCode::kInvalidConfig, "convolution kernels must be odd");
  }
  if (resnet_width % resnet_groups != 0) {
    fail(ErrorCode::kInvalidConfig, "model.resnet_width must be divisible by resnet_groups");
  }
  if (dropout < 0 || dropout >= 1 || predictor_dropout < 0 || predictor_dropout >= 1) {
    fail(ErrorCode::kInvalidConfig, "dropout rates must lie in [0, 1)");
  }
  if (!(log_floor > 0)) fail(ErrorCode::kInvalidConfig, "model.log_floor must be > 0");
}

void ModelConfig::write(KvConfig& kv) const {
  ModelConfig copy = *this;
  for_each_field(copy, [&](const char* name, auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
      kv.set(std::string("model.") + name, format_double(v));
    } else {
      kv.set(std::string("model.") + name, std::to_string(v));
    }
  });
}

ModelConfig ModelConfig::read(const KvConfig& kv) { return read(kv, ModelConfig()); }

ModelConfig ModelConfig::read(const KvConfig& kv, const ModelConfig& defaults) {
  ModelConfig c = defaults;
  for_each_field(c, [&](const char* name, auto& v) {
    const std::string key = std::string("model.") + name;
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
      v = kv.get_double(key, v);
    } else {
      v = kv.get_int(key, v);
    }
  });
  c.validate();
  return c;
}

std::set<std::string> ModelConfig::keys() {
  std::set<std::string> out;
  ModelConfig c;
  for_each_field(c, [&](const char* name, auto&) { out.insert(std::string("model.") + name); });
  return out;
}

}  // namespace rptts::model

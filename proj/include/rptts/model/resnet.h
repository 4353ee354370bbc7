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

// ResNet18 over single-channel spectrogram images, and the three networks
// built on it: the global and local discriminators and the style extractor.
// Batch norm is replaced by group norm so that every sample is normalized on
// its own and batch composition never leaks between examples.

#ifndef RPTTS_MODEL_RESNET_H_
#define RPTTS_MODEL_RESNET_H_

#include <string>
#include <vector>

#include "rptts/model/config.h"
#include "rptts/nn/layers.h"

namespace rptts::model {
inline namespace RPTTS_PREC_NS {

using nn::Real;
using nn::Tensor;

inline constexpr int kNumDiscriminatorFeatures = 6;

struct ResNetOutput {
  Tensor out;                     // (N, out_dim)
  std::vector<Tensor> features;   // conv1..conv5 maps (NHWC) and the pooled (N, C)
};

class BasicBlock {
 public:
  BasicBlock() = default;
  BasicBlock(nn::ParamStore& ps, const std::string& name, int in, int out, int stride,
             int groups, Rng& rng);
  Tensor operator()(const Tensor& x) const;

 private:
  nn::Conv2d conv1_, conv2_, down_;
  nn::GroupNorm gn1_, gn2_, down_gn_;
  bool has_down_ = false;
};

class ResNet18 {
 public:
  ResNet18() = default;
  // Stage widths are width, 2w, 4w, 8w; `groups` must divide width.
  ResNet18(nn::ParamStore& ps, const std::string& name, int width, int groups, int out_dim,
           Rng& rng);
  // x: (N, H, W, 1).
  ResNetOutput operator()(const Tensor& x) const;

 private:
  nn::Conv2d stem_;
  nn::GroupNorm stem_gn_;
  std::vector<BasicBlock> blocks_;  // 4 stages x 2
  nn::Linear fc_;
};

// (L, C) -> (length, C) with the input centered and `value` above and below;
// the extra frame of an odd margin goes after. Throws ShapeError if L > length.
Tensor pad_center(const Tensor& mel, int length, Real value);

// Centers each (L_i, C) mel in a `length`-frame canvas and stacks them into
// (N, length, C, 1).
Tensor stack_padded(const std::vector<Tensor>& mels, int length, Real value);

struct DiscriminatorOutput {
  Tensor scores;                  // (N)
  std::vector<Tensor> features;   // kNumDiscriminatorFeatures entries
};

class Discriminator {
 public:
  // `prefix` names the parameter store ("dg" or "dl").
  Discriminator(const std::string& prefix, const ModelConfig& cfg, Rng& rng);
  Discriminator(const Discriminator&) = delete;
  Discriminator& operator=(const Discriminator&) = delete;

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  // Whole spectrograms, padded with log(floor) to `pad_to` frames (at least
  // the batch maximum).
  DiscriminatorOutput global(const std::vector<Tensor>& mels, int pad_to = 0) const;
  // Windows of exactly window_len frames; throws ShapeError otherwise.
  DiscriminatorOutput local(const std::vector<Tensor>& windows) const;
  // Already stacked (N, H, W, 1) input.
  DiscriminatorOutput operator()(const Tensor& batch) const;

 private:
  ModelConfig cfg_;
  nn::ParamStore params_;
  ResNet18 net_;
};

class StyleExtractor {
 public:
  StyleExtractor(const ModelConfig& cfg, Rng& rng);
  StyleExtractor(const StyleExtractor&) = delete;
  StyleExtractor& operator=(const StyleExtractor&) = delete;

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  // (window_len, d_mel) windows -> (N, d_style).
  Tensor operator()(const std::vector<Tensor>& windows) const;

 private:
  ModelConfig cfg_;
  nn::ParamStore params_;
  ResNet18 net_;
};

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::model

#endif  // RPTTS_MODEL_RESNET_H_

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

#include "rptts/model/resnet.h"

#include <algorithm>
#include <cmath>

#include "rptts/common/error.h"

namespace rptts::model {
inline namespace RPTTS_PREC_NS {

BasicBlock::BasicBlock(nn::ParamStore& ps, const std::string& name, int in, int out, int stride,
                       int groups, Rng& rng)
    : conv1_(ps, name + ".conv1", in, out, 3, stride, 1, rng),
      conv2_(ps, name + ".conv2", out, out, 3, 1, 1, rng),
      gn1_(ps, name + ".gn1", out, groups),
      gn2_(ps, name + ".gn2", out, groups),
      has_down_(stride != 1 || in != out) {
  if (has_down_) {
    down_ = nn::Conv2d(ps, name + ".down", in, out, 1, stride, 0, rng);
    down_gn_ = nn::GroupNorm(ps, name + ".down_gn", out, groups);
  }
}

Tensor BasicBlock::operator()(const Tensor& x) const {
  Tensor h = nn::relu(gn1_(conv1_(x)));
  h = gn2_(conv2_(h));
  const Tensor skip = has_down_ ? down_gn_(down_(x)) : x;
  return nn::relu(nn::add(h, skip));
}

ResNet18::ResNet18(nn::ParamStore& ps, const std::string& name, int width, int groups,
                   int out_dim, Rng& rng) {
  if (width < 1 || groups < 1 || width % groups != 0) {
    fail(ErrorCode::kInvalidConfig, "resnet width must be a positive multiple of groups");
  }
  stem_ = nn::Conv2d(ps, name + ".stem", 1, width, 7, 2, 3, rng);
  stem_gn_ = nn::GroupNorm(ps, name + ".stem_gn", width, groups);
  int in = width;
  for (int stage = 0; stage < 4; ++stage) {
    const int out = width << stage;
    for (int b = 0; b < 2; ++b) {
      const int stride = (stage > 0 && b == 0) ? 2 : 1;
      blocks_.emplace_back(ps, name + ".layer" + std::to_string(stage + 1) + "." +
                                   std::to_string(b),
                           in, out, stride, groups, rng);
      in = out;
    }
  }
  fc_ = nn::Linear(ps, name + ".fc", in, out_dim, rng);
}

ResNetOutput ResNet18::operator()(const Tensor& x) const {
  ResNetOutput r;
  Tensor h = nn::relu(stem_gn_(stem_(x)));
  r.features.push_back(h);
  h = nn::maxpool2d_nhwc(h, 3, 2, 1);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    h = blocks_[i](h);
    if (i % 2 == 1) r.features.push_back(h);
  }
  const Tensor pooled = nn::global_avg_pool_nhwc(h);
  r.features.push_back(pooled);
  r.out = fc_(pooled);
  return r;
}

Tensor pad_center(const Tensor& mel, int length, Real value) {
  if (mel.ndim() != 2 || mel.rows() > length) {
    fail(ErrorCode::kShapeError, "cannot center " + nn::shape_string(mel.shape()) + " in " +
                                     std::to_string(length) + " frames");
  }
  const int extra = length - mel.rows();
  if (extra == 0) return mel;
  const int before = extra / 2, after = extra - before;
  std::vector<Tensor> parts;
  if (before > 0) parts.push_back(Tensor::full({before, mel.cols()}, value));
  parts.push_back(mel);
  if (after > 0) parts.push_back(Tensor::full({after, mel.cols()}, value));
  return nn::concat_rows(parts);
}

Tensor stack_padded(const std::vector<Tensor>& mels, int length, Real value) {
  if (mels.empty()) fail(ErrorCode::kShapeError, "empty batch");
  std::vector<Tensor> rows;
  rows.reserve(mels.size());
  for (const auto& m : mels) rows.push_back(pad_center(m, length, value));
  const int c = mels.front().cols();
  return nn::reshape(nn::concat_rows(rows), {static_cast<int>(mels.size()), length, c, 1});
}

Discriminator::Discriminator(const std::string& prefix, const ModelConfig& cfg, Rng& rng)
    : cfg_(cfg), params_(prefix) {
  net_ = ResNet18(params_, "resnet", cfg.resnet_width, cfg.resnet_groups, 1, rng);
}

DiscriminatorOutput Discriminator::operator()(const Tensor& batch) const {
  ResNetOutput r = net_(batch);
  return {nn::reshape(r.out, {batch.dim(0)}), std::move(r.features)};
}

DiscriminatorOutput Discriminator::global(const std::vector<Tensor>& mels, int pad_to) const {
  int length = std::max(pad_to, 1);
  for (const auto& m : mels) length = std::max(length, m.rows());
  return (*this)(stack_padded(mels, length, static_cast<Real>(std::log(cfg_.log_floor))));
}

DiscriminatorOutput Discriminator::local(const std::vector<Tensor>& windows) const {
  for (const auto& w : windows) {
    if (w.ndim() != 2 || w.rows() != cfg_.window_len || w.cols() != cfg_.d_mel) {
      fail(ErrorCode::kShapeError, "local discriminator expects " +
                                       std::to_string(cfg_.window_len) + "x" +
                                       std::to_string(cfg_.d_mel) + " windows, got " +
                                       nn::shape_string(w.shape()));
    }
  }
  return (*this)(stack_padded(windows, cfg_.window_len, 0));
}

StyleExtractor::StyleExtractor(const ModelConfig& cfg, Rng& rng) : cfg_(cfg), params_("fs") {
  net_ = ResNet18(params_, "resnet", cfg.resnet_width, cfg.resnet_groups, cfg.d_style, rng);
}

Tensor StyleExtractor::operator()(const std::vector<Tensor>& windows) const {
  for (const auto& w : windows) {
    if (w.ndim() != 2 || w.rows() != cfg_.window_len || w.cols() != cfg_.d_mel) {
      fail(ErrorCode::kShapeError, "style extractor expects " + std::to_string(cfg_.window_len) +
                                       "x" + std::to_string(cfg_.d_mel) + " windows, got " +
                                       nn::shape_string(w.shape()));
    }
  }
  return net_(stack_padded(windows, cfg_.window_len, 0)).out;
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::model

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

#include "rptts/nn/layers.h"

#include <cmath>

#include "rptts/common/error.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

Tensor dropout(const Tensor& x, Real rate, const Context& ctx) {
  if (!ctx.training || rate <= Real(0)) return x;
  if (ctx.rng == nullptr) fail(ErrorCode::kInvalidInput, "training context without an RNG");
  return dropout(x, rate, *ctx.rng);
}

Tensor sinusoidal_positional_encoding(int length, int d) {
  if (d % 2 != 0) fail(ErrorCode::kOddDimension, "positional encoding needs an even d");
  std::vector<Real> v(static_cast<std::size_t>(length) * d);
  for (int p = 0; p < length; ++p) {
    for (int i = 0; i < d / 2; ++i) {
      const double angle = p / std::pow(10000.0, 2.0 * i / d);
      v[static_cast<std::size_t>(p) * d + 2 * i] = static_cast<Real>(std::sin(angle));
      v[static_cast<std::size_t>(p) * d + 2 * i + 1] = static_cast<Real>(std::cos(angle));
    }
  }
  return Tensor::from({length, d}, std::move(v));
}

Linear::Linear(ParamStore& ps, const std::string& name, int in, int out, Rng& rng, bool bias)
    : in_(in), out_(out) {
  weight = ps.add_xavier(name + ".weight", {in, out}, in, out, rng);
  if (bias) this->bias = ps.add_constant(name + ".bias", {out}, Real(0));
}

Tensor Linear::operator()(const Tensor& x) const {
  Tensor y = matmul(x, weight);
  return bias.defined() ? add_rowvec(y, bias) : y;
}

Conv1d::Conv1d(ParamStore& ps, const std::string& name, int in, int out, int kernel, Rng& rng)
    : kernel_(kernel) {
  if (kernel % 2 == 0) fail(ErrorCode::kInvalidConfig, "Conv1d kernel must be odd");
  weight = ps.add_xavier(name + ".weight", {kernel * in, out}, kernel * in, kernel * out, rng);
  bias = ps.add_constant(name + ".bias", {out}, Real(0));
}

Tensor Conv1d::operator()(const Tensor& x) const {
  const Tensor cols = kernel_ == 1 ? x : im2col_1d(x, kernel_);
  return add_rowvec(matmul(cols, weight), bias);
}

LayerNorm::LayerNorm(ParamStore& ps, const std::string& name, int d) {
  gamma = ps.add_constant(name + ".gamma", {d}, Real(1));
  beta = ps.add_constant(name + ".beta", {d}, Real(0));
}

Tensor LayerNorm::operator()(const Tensor& x) const { return layer_norm_rows(x, gamma, beta); }

Embedding::Embedding(ParamStore& ps, const std::string& name, int n, int d, Rng& rng) : n_(n) {
  table = ps.add_normal(name + ".table", {n, d}, 1.0 / std::sqrt(static_cast<double>(d)), rng);
}

Tensor Embedding::operator()(const std::vector<int>& ids) const {
  for (int id : ids) {
    if (id < 0 || id >= n_) {
      fail(ErrorCode::kUnknownPhoneme, "embedding id " + std::to_string(id) + " out of range");
    }
  }
  return gather_rows(table, ids);
}

MultiHeadAttention::MultiHeadAttention(ParamStore& ps, const std::string& name, int d, int heads,
                                       int d_k, int d_v, Rng& rng)
    : heads_(heads), d_k_(d_k), d_v_(d_v) {
  if (heads < 1 || d_k < 1 || d_v < 1) fail(ErrorCode::kInvalidConfig, "bad attention dims");
  q_ = Linear(ps, name + ".q", d, heads * d_k, rng);
  k_ = Linear(ps, name + ".k", d, heads * d_k, rng);
  v_ = Linear(ps, name + ".v", d, heads * d_v, rng);
  o_ = Linear(ps, name + ".o", heads * d_v, d, rng);
}

Tensor MultiHeadAttention::operator()(const Tensor& q_src, const Tensor& kv_src,
                                      std::vector<Tensor>* weights) const {
  if (q_src.ndim() != 2 || kv_src.ndim() != 2 || q_src.cols() != kv_src.cols()) {
    fail(ErrorCode::kShapeError, "attention inputs " + shape_string(q_src.shape()) + ", " +
                                     shape_string(kv_src.shape()));
  }
  if (kv_src.rows() == 0) fail(ErrorCode::kShapeError, "attention over an empty key set");
  const Tensor q = q_(q_src), k = k_(kv_src), v = v_(kv_src);
  const Real inv_sqrt_dk = Real(1) / std::sqrt(static_cast<Real>(d_k_));
  std::vector<Tensor> heads;
  for (int h = 0; h < heads_; ++h) {
    const Tensor qh = slice_cols(q, h * d_k_, (h + 1) * d_k_);
    const Tensor kh = slice_cols(k, h * d_k_, (h + 1) * d_k_);
    const Tensor vh = slice_cols(v, h * d_v_, (h + 1) * d_v_);
    const Tensor a = softmax_rows(scale(matmul(qh, kh, false, true), inv_sqrt_dk));
    if (weights) weights->push_back(a);
    heads.push_back(matmul(a, vh));
  }
  return o_(heads.size() == 1 ? heads[0] : concat_cols(heads));
}

FftBlock::FftBlock(ParamStore& ps, const std::string& name, const FftBlockConfig& cfg, Rng& rng)
    : attn_(ps, name + ".attn", cfg.d, cfg.heads, cfg.d_k, cfg.d_v, rng),
      ln1_(ps, name + ".ln1", cfg.d),
      ln2_(ps, name + ".ln2", cfg.d),
      conv1_(ps, name + ".conv1", cfg.d, cfg.filter, cfg.kernel, rng),
      conv2_(ps, name + ".conv2", cfg.filter, cfg.d, 1, rng),
      dropout_(static_cast<Real>(cfg.dropout)) {}

Tensor FftBlock::operator()(const Tensor& x, const Context& ctx) const {
  const Tensor h = ln1_(add(x, dropout(attn_(x, x), dropout_, ctx)));
  const Tensor f = conv2_(relu(conv1_(h)));
  return ln2_(add(h, dropout(f, dropout_, ctx)));
}

Conv2d::Conv2d(ParamStore& ps, const std::string& name, int in, int out, int kernel, int stride,
               int pad, Rng& rng, bool bias)
    : in_(in), out_(out), kernel_(kernel), stride_(stride), pad_(pad), has_bias_(bias) {
  const int fan = kernel * kernel;
  weight = ps.add_xavier(name + ".weight", {fan * in, out}, fan * in, fan * out, rng);
  if (bias) this->bias = ps.add_constant(name + ".bias", {out}, Real(0));
}

Tensor Conv2d::operator()(const Tensor& x) const {
  if (x.ndim() != 4 || x.dim(3) != in_) {
    fail(ErrorCode::kShapeError, "Conv2d expects NHWC with " + std::to_string(in_) +
                                     " channels, got " + shape_string(x.shape()));
  }
  const int n = x.dim(0);
  const int ho = conv_out_size(x.dim(1), kernel_, stride_, pad_);
  const int wo = conv_out_size(x.dim(2), kernel_, stride_, pad_);
  Tensor cols = (kernel_ == 1 && stride_ == 1 && pad_ == 0)
                    ? reshape(x, {n * ho * wo, in_})
                    : im2col_2d(x, kernel_, kernel_, stride_, pad_);
  Tensor y = matmul(cols, weight);
  if (has_bias_) y = add_rowvec(y, bias);
  return reshape(y, {n, ho, wo, out_});
}

GroupNorm::GroupNorm(ParamStore& ps, const std::string& name, int channels, int groups)
    : groups_(groups) {
  gamma = ps.add_constant(name + ".gamma", {channels}, Real(1));
  beta = ps.add_constant(name + ".beta", {channels}, Real(0));
}

Tensor GroupNorm::operator()(const Tensor& x) const {
  return group_norm_nhwc(x, groups_, gamma, beta);
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

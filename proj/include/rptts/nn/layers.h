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

#ifndef RPTTS_NN_LAYERS_H_
#define RPTTS_NN_LAYERS_H_

#include <string>
#include <vector>

#include "rptts/common/rng.h"
#include "rptts/nn/ops.h"
#include "rptts/nn/params.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

// Forward-pass mode. Dropout draws from `rng` only while training.
struct Context {
  bool training = false;
  Rng* rng = nullptr;
};

Tensor dropout(const Tensor& x, Real rate, const Context& ctx);

// (L, d) sin/cos table: even columns sin(pos / 10000^(2i/d)), odd columns cos.
// Throws OddDimension for odd d.
Tensor sinusoidal_positional_encoding(int length, int d);

class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& ps, const std::string& name, int in, int out, Rng& rng, bool bias = true);
  Tensor operator()(const Tensor& x) const;
  int in_features() const { return in_; }
  int out_features() const { return out_; }
  Tensor weight, bias;

 private:
  int in_ = 0, out_ = 0;
};

// Same-length 1-D convolution over (L, C_in) with zero padding; odd kernels.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParamStore& ps, const std::string& name, int in, int out, int kernel, Rng& rng);
  Tensor operator()(const Tensor& x) const;
  Tensor weight, bias;  // (kernel*in, out), (out)

 private:
  int kernel_ = 1;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParamStore& ps, const std::string& name, int d);
  Tensor operator()(const Tensor& x) const;
  Tensor gamma, beta;
};

class Embedding {
 public:
  Embedding() = default;
  // N(0, d^-1/2) initialization.
  Embedding(ParamStore& ps, const std::string& name, int n, int d, Rng& rng);
  Tensor operator()(const std::vector<int>& ids) const;
  int size() const { return n_; }
  Tensor table;

 private:
  int n_ = 0;
};

// Scaled dot-product attention with H heads: queries from `q_src` (A, d),
// keys and values from `kv_src` (B, d); heads are concatenated and projected
// back to d.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& ps, const std::string& name, int d, int heads, int d_k,
                     int d_v, Rng& rng);
  // When `weights` is given it receives the per-head (A, B) attention maps.
  Tensor operator()(const Tensor& q_src, const Tensor& kv_src,
                    std::vector<Tensor>* weights = nullptr) const;
  int heads() const { return heads_; }

 private:
  Linear q_, k_, v_, o_;
  int heads_ = 1, d_k_ = 1, d_v_ = 1;
};

struct FftBlockConfig {
  int d = 256;
  int heads = 2;
  int d_k = 128;
  int d_v = 128;
  int filter = 1024;
  int kernel = 9;
  double dropout = 0.1;
};

// Feed-forward transformer block (post-norm):
//   h = LN(x + Drop(MHA(x, x)));  y = LN(h + Drop(Conv_1(ReLU(Conv_k(h)))))
class FftBlock {
 public:
  FftBlock() = default;
  FftBlock(ParamStore& ps, const std::string& name, const FftBlockConfig& cfg, Rng& rng);
  Tensor operator()(const Tensor& x, const Context& ctx) const;

 private:
  MultiHeadAttention attn_;
  LayerNorm ln1_, ln2_;
  Conv1d conv1_, conv2_;
  Real dropout_ = 0;
};

// NHWC 2-D convolution via im2col.
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParamStore& ps, const std::string& name, int in, int out, int kernel, int stride,
         int pad, Rng& rng, bool bias = false);
  Tensor operator()(const Tensor& x) const;
  Tensor weight, bias;  // (kernel*kernel*in, out)

 private:
  int in_ = 1, out_ = 1, kernel_ = 1, stride_ = 1, pad_ = 0;
  bool has_bias_ = false;
};

class GroupNorm {
 public:
  GroupNorm() = default;
  GroupNorm(ParamStore& ps, const std::string& name, int channels, int groups);
  Tensor operator()(const Tensor& x) const;
  Tensor gamma, beta;

 private:
  int groups_ = 1;
};

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_LAYERS_H_

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

// Differentiable primitives. Matrices are row-major; 2-D tensors are
// (rows, cols) and image tensors are NHWC.

#ifndef RPTTS_NN_OPS_H_
#define RPTTS_NN_OPS_H_

#include <vector>

#include "rptts/common/rng.h"
#include "rptts/nn/tensor.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

// op(a) * op(b) where op transposes when the flag is set.
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false, bool trans_b = false);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Real s);
Tensor add_scalar(const Tensor& a, Real s);
// Adds `bias` (last-dim sized) to every row.
Tensor add_rowvec(const Tensor& x, const Tensor& bias);

Tensor relu(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);

// Reductions to a 1-element tensor.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor mean_abs_diff(const Tensor& a, const Tensor& b);
Tensor mse(const Tensor& a, const Tensor& b);
// Concatenates 1-element tensors into shape [n].
Tensor stack_scalars(const std::vector<Tensor>& xs);
Tensor add_all(const std::vector<Tensor>& xs);

// Over the last dimension.
Tensor softmax_rows(const Tensor& x);
Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       Real eps = Real(1e-5));

// Inverted dropout; identity when rate == 0.
Tensor dropout(const Tensor& x, Real rate, Rng& rng);

// out[i] = table[idx[i]]; backward scatter-adds.
Tensor gather_rows(const Tensor& table, const std::vector<int>& idx);
Tensor concat_rows(const std::vector<Tensor>& xs);
Tensor slice_rows(const Tensor& x, int begin, int end);
Tensor concat_cols(const std::vector<Tensor>& xs);
Tensor slice_cols(const Tensor& x, int begin, int end);
Tensor reshape(const Tensor& x, const Shape& shape);

// (L, C) -> (L, k*C): row t holds x[t - k/2 .. t + k/2] with zero padding.
Tensor im2col_1d(const Tensor& x, int kernel);
// (N, H, W, C) -> (N*Ho*Wo, kh*kw*C) for a strided, zero-padded window.
Tensor im2col_2d(const Tensor& x, int kh, int kw, int stride, int pad);
int conv_out_size(int in, int kernel, int stride, int pad);

Tensor group_norm_nhwc(const Tensor& x, int groups, const Tensor& gamma, const Tensor& beta,
                       Real eps = Real(1e-5));
Tensor maxpool2d_nhwc(const Tensor& x, int kernel, int stride, int pad);
// (N, H, W, C) -> (N, C)
Tensor global_avg_pool_nhwc(const Tensor& x);

// Euclidean distance between matching rows: (R, D), (R, D) -> (R).
// The gradient at zero distance is taken as zero.
Tensor row_l2_distance(const Tensor& a, const Tensor& b);

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_OPS_H_

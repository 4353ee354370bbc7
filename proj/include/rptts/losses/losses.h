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

#ifndef RPTTS_LOSSES_LOSSES_H_
#define RPTTS_LOSSES_LOSSES_H_

#include <vector>

#include "rptts/common/rng.h"
#include "rptts/corpus/example.h"
#include "rptts/losses/mining.h"
#include "rptts/losses/weights.h"
#include "rptts/model/generator.h"
#include "rptts/nn/ops.h"

namespace rptts::losses {
inline namespace RPTTS_PREC_NS {

using nn::Real;
using nn::Tensor;

// mean|X - X_hat| + lambda1 * mean over rows in `insert_rows`. An empty range
// contributes 0.
Tensor l1_reconstruction(const Tensor& x, const Tensor& x_hat, corpus::Range insert_rows,
                         Real lambda1);

// (D(X) - 1)^2 + D(X_hat)^2, summed over scores and divided by `normalizer`
// (0 means the number of scores, i.e. a plain mean).
Tensor lsgan_d(const Tensor& real_scores, const Tensor& fake_scores, Real normalizer = 0);
// (D(X_hat) - 1)^2 with the same normalization.
Tensor lsgan_g(const Tensor& fake_scores, Real normalizer = 0);

// Sum over extraction points of mean|real - fake|, scaled by `scale`. Real
// features are detached.
Tensor feature_matching(const std::vector<Tensor>& real, const std::vector<Tensor>& fake,
                        Real scale = 1);

struct Windows {
  std::vector<Tensor> windows;  // each (len, C)
  std::vector<int> offsets;
};

// Even windows over a (L, C) segment; a short segment is centered in a
// `pad_value` canvas.
Windows sample_windows(const Tensor& segment, int len, int hop, Real pad_value);
// `count` windows at uniformly random offsets.
Windows sample_windows_random(const Tensor& mel, int len, int count, Rng& rng, Real pad_value);

// Mean of max(|a - p| - |a - n| + margin, 0) over rows of (R, D) tensors.
Tensor triplet_margin(const Tensor& a, const Tensor& p, const Tensor& n, Real margin);
// Triplet loss over rows of `embeddings`; zero when `triplets` is empty.
Tensor triplet_loss(const Tensor& embeddings, const std::vector<Triplet>& triplets, Real margin);

struct VarianceLosses {
  Tensor pitch, energy, duration;
};
VarianceLosses variance_losses(const model::VarianceOutputs& pred, const model::Teacher& teacher);

struct LossParts {
  Tensor rec;
  Tensor adv_global, feat_global;
  Tensor adv_local, feat_local;
  Tensor style;
  Tensor pitch, energy, duration;
};

// Phase 1: rec plus the variance terms. Phase 2: every weighted term. Missing
// parts count as zero.
Tensor total_generator_loss(const LossParts& parts, const LossWeights& w, int phase);

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::losses

#endif  // RPTTS_LOSSES_LOSSES_H_

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

#include "rptts/losses/losses.h"

#include <algorithm>

#include "rptts/common/error.h"
#include "rptts/model/resnet.h"

namespace rptts::losses {
inline namespace RPTTS_PREC_NS {
namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    fail(ErrorCode::kShapeError, std::string(what) + ": " + nn::shape_string(a.shape()) +
                                     " vs " + nn::shape_string(b.shape()));
  }
}

Tensor normalized_sum(const Tensor& x, Real normalizer) {
  if (normalizer <= 0) return nn::mean(x);
  return nn::scale(nn::sum(x), Real(1) / normalizer);
}

Tensor cut(const Tensor& mel, int start, int len, Real pad_value) {
  // A one-frame shortfall centres at offset 0, so the length decides.
  if (mel.rows() >= len) return nn::slice_rows(mel, start, start + len);
  return model::pad_center(mel, len, pad_value);
}

}  // namespace

Tensor l1_reconstruction(const Tensor& x, const Tensor& x_hat, corpus::Range insert_rows,
                         Real lambda1) {
  check_same_shape(x, x_hat, "l1_reconstruction");
  Tensor loss = nn::mean_abs_diff(x, x_hat);
  if (insert_rows.empty()) return loss;
  if (insert_rows.begin < 0 || insert_rows.end > x.rows()) {
    fail(ErrorCode::kShapeError, "l1_reconstruction: insert rows out of range");
  }
  const Tensor part = nn::mean_abs_diff(nn::slice_rows(x, insert_rows.begin, insert_rows.end),
                                        nn::slice_rows(x_hat, insert_rows.begin, insert_rows.end));
  return nn::add(loss, nn::scale(part, lambda1));
}

Tensor lsgan_d(const Tensor& real_scores, const Tensor& fake_scores, Real normalizer) {
  const Tensor r = nn::square(nn::add_scalar(real_scores, Real(-1)));
  const Tensor f = nn::square(fake_scores);
  return nn::add(normalized_sum(r, normalizer), normalized_sum(f, normalizer));
}

Tensor lsgan_g(const Tensor& fake_scores, Real normalizer) {
  return normalized_sum(nn::square(nn::add_scalar(fake_scores, Real(-1))), normalizer);
}

Tensor feature_matching(const std::vector<Tensor>& real, const std::vector<Tensor>& fake,
                        Real scale) {
  if (real.size() != fake.size() || real.empty()) {
    fail(ErrorCode::kShapeError, "feature_matching: feature lists differ in length");
  }
  std::vector<Tensor> terms;
  for (std::size_t i = 0; i < real.size(); ++i) {
    check_same_shape(real[i], fake[i], "feature_matching");
    terms.push_back(nn::mean_abs_diff(real[i].detach(), fake[i]));
  }
  return nn::scale(nn::add_all(terms), scale);
}

Windows sample_windows(const Tensor& segment, int len, int hop, Real pad_value) {
  Windows w;
  for (int s : window_starts(segment.rows(), len, hop)) {
    w.windows.push_back(cut(segment, s, len, pad_value));
    w.offsets.push_back(s);
  }
  return w;
}

Windows sample_windows_random(const Tensor& mel, int len, int count, Rng& rng, Real pad_value) {
  if (mel.rows() < 1 || len < 1 || count < 1) {
    fail(ErrorCode::kInvalidInput, "random windows need a non-empty mel and count >= 1");
  }
  Windows w;
  if (mel.rows() <= len) {
    const int s = window_starts(mel.rows(), len, len).front();
    w.windows.push_back(cut(mel, s, len, pad_value));
    w.offsets.push_back(s);
    return w;
  }
  std::uniform_int_distribution<int> start(0, mel.rows() - len);
  for (int i = 0; i < count; ++i) {
    const int s = start(rng);
    w.windows.push_back(cut(mel, s, len, pad_value));
    w.offsets.push_back(s);
  }
  return w;
}

Tensor triplet_margin(const Tensor& a, const Tensor& p, const Tensor& n, Real margin) {
  check_same_shape(a, p, "triplet_margin");
  check_same_shape(a, n, "triplet_margin");
  const Tensor gap = nn::sub(nn::row_l2_distance(a, p), nn::row_l2_distance(a, n));
  return nn::mean(nn::relu(nn::add_scalar(gap, margin)));
}

Tensor triplet_loss(const Tensor& embeddings, const std::vector<Triplet>& triplets, Real margin) {
  if (triplets.empty()) return Tensor::scalar(0);
  std::vector<int> ia, ip, in;
  for (const auto& t : triplets) {
    ia.push_back(t.anchor);
    ip.push_back(t.positive);
    in.push_back(t.negative);
  }
  return triplet_margin(nn::gather_rows(embeddings, ia), nn::gather_rows(embeddings, ip),
                        nn::gather_rows(embeddings, in), margin);
}

VarianceLosses variance_losses(const model::VarianceOutputs& pred, const model::Teacher& teacher) {
  auto target = [](const std::vector<Real>& v) {
    return Tensor::from({static_cast<int>(v.size())}, v);
  };
  VarianceLosses l;
  l.pitch = nn::mse(pred.pitch_pred, target(teacher.pitch));
  l.energy = nn::mse(pred.energy_pred, target(teacher.energy));
  l.duration = nn::mse(pred.log_dur_pred, target(model::log_duration_targets(teacher.durations)));
  return l;
}

Tensor total_generator_loss(const LossParts& parts, const LossWeights& w, int phase) {
  if (phase != 1 && phase != 2) fail(ErrorCode::kInvalidInput, "phase must be 1 or 2");
  std::vector<Tensor> terms;
  auto add = [&](const Tensor& t, double weight) {
    if (t.defined() && weight != 0.0) terms.push_back(nn::scale(t, static_cast<Real>(weight)));
  };
  add(parts.rec, 1.0);
  add(parts.pitch, w.variance);
  add(parts.energy, w.variance);
  add(parts.duration, w.variance);
  if (phase == 2) {
    add(parts.adv_global, w.adv_global);
    add(parts.feat_global, w.feat_global);
    add(parts.adv_local, w.adv_local);
    add(parts.feat_local, w.feat_local);
    add(parts.style, w.style);
  }
  if (terms.empty()) return Tensor::scalar(0);
  return nn::add_all(terms);
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::losses

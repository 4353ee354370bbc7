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

#include "rptts/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rptts/common/error.h"

namespace rptts::eval {

DtwResult dtw(int n, int m, const std::function<double(int, int)>& cost) {
  if (n < 1 || m < 1) fail(ErrorCode::kInvalidInput, "dtw needs two non-empty sequences");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(static_cast<std::size_t>(n) * m, inf);
  auto at = [&](int i, int j) -> double& { return acc[static_cast<std::size_t>(i) * m + j]; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = inf;
        if (i > 0 && j > 0) best = at(i - 1, j - 1);
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
      }
      at(i, j) = best + cost(i, j);
    }
  }
  DtwResult r;
  r.cost = at(n - 1, m - 1);
  int i = n - 1, j = m - 1;
  r.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i - 1, j - 1) <= at(i - 1, j) && at(i - 1, j - 1) <= at(i, j - 1)) {
      --i;
      --j;
    } else if (i > 0 && (j == 0 || at(i - 1, j) <= at(i, j - 1))) {
      --i;
    } else {
      --j;
    }
    r.path.emplace_back(i, j);
  }
  std::reverse(r.path.begin(), r.path.end());
  return r;
}

DtwResult dtw(const dsp::MatrixD& cost) {
  return dtw(static_cast<int>(cost.rows()), static_cast<int>(cost.cols()),
             [&](int i, int j) { return cost(i, j); });
}

double mcd_scale() { return 10.0 * std::sqrt(2.0) / std::log(10.0); }

double frame_distortion(const dsp::MatrixD& a, int i, const dsp::MatrixD& b, int j) {
  double s = 0.0;
  for (int k = 1; k < std::min<int>(a.cols(), b.cols()); ++k) {
    const double d = a(i, k) - b(j, k);
    s += d * d;
  }
  return mcd_scale() * std::sqrt(s);
}

double mcd(const dsp::MfccSequence& a, const dsp::MfccSequence& b) {
  if (a.frames.rows() == 0 || b.frames.rows() == 0) {
    fail(ErrorCode::kInvalidInput, "mcd needs two non-empty cepstral sequences");
  }
  if (a.frames.cols() != b.frames.cols()) {
    fail(ErrorCode::kInvalidInput, "mcd: cepstral orders differ");
  }
  const DtwResult r = dtw(static_cast<int>(a.frames.rows()), static_cast<int>(b.frames.rows()),
                          [&](int i, int j) { return frame_distortion(a.frames, i, b.frames, j); });
  return r.cost / static_cast<double>(r.path.size());
}

corpus::MatrixF average_mel_fill(const corpus::MatrixF& x_in, const corpus::SegmentSpec& spec) {
  if (x_in.rows() == 0) fail(ErrorCode::kInvalidInput, "average-mel fill needs context frames");
  const int lb = spec.frames_b.size(), li = spec.frames_i.size(), la = spec.frames_a.size();
  if (x_in.rows() != lb + la) {
    fail(ErrorCode::kShapeError, "context has " + std::to_string(x_in.rows()) +
                                     " frames, segmentation expects " + std::to_string(lb + la));
  }
  corpus::MatrixF out(lb + li + la, x_in.cols());
  if (lb > 0) out.topRows(lb) = x_in.topRows(lb);
  if (la > 0) out.bottomRows(la) = x_in.bottomRows(la);
  if (li > 0) {
    const Eigen::RowVectorXd mean = x_in.cast<double>().colwise().mean();
    out.middleRows(lb, li) = mean.cast<float>().replicate(li, 1);
  }
  return out;
}

dsp::Waveform stitch(const dsp::Waveform& insert, const dsp::Waveform& ground_truth,
                     const corpus::SegmentSpec& spec, int hop, double crossfade_seconds) {
  const auto& gt = ground_truth.samples;
  const auto n = static_cast<long>(gt.size());
  const long b_end = std::min<long>(static_cast<long>(spec.frames_b.end) * hop, n);
  const long a_begin = std::min<long>(static_cast<long>(spec.frames_a.begin) * hop, n);
  if (a_begin < b_end) fail(ErrorCode::kInvalidInput, "stitch: A starts before B ends");
  const auto& ins = insert.samples;
  const long li = static_cast<long>(ins.size());
  const long fade =
      std::min(li / 2, std::lround(crossfade_seconds * ground_truth.sample_rate));

  dsp::Waveform out;
  out.sample_rate = ground_truth.sample_rate;
  out.samples.assign(gt.begin(), gt.begin() + b_end);
  for (long k = 0; k < li; ++k) {
    double v = ins[k];
    if (k < fade && b_end > 0 && b_end + k < a_begin) {
      const double r = (k + 1.0) / (fade + 1.0);
      v = (1.0 - r) * gt[b_end + k] + r * v;
    }
    const long from_end = li - k;  // fade - 1 .. 0 over the last samples
    const long g = a_begin - from_end;
    if (from_end <= fade && a_begin < n && g >= b_end) {
      const double r = (fade - from_end + 1.0) / (fade + 1.0);
      v = (1.0 - r) * v + r * gt[g];
    }
    out.samples.push_back(static_cast<float>(v));
  }
  out.samples.insert(out.samples.end(), gt.begin() + a_begin, gt.end());
  return out;
}

}  // namespace rptts::eval

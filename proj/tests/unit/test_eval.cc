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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.h"
#include "rptts/common/error.h"
#include "rptts/corpus/prepare.h"
#include "rptts/corpus/toy.h"
#include "rptts/eval/evaluate.h"
#include "rptts/eval/metrics.h"

using namespace rptts;
using namespace rptts::eval;
using dsp::MatrixD;
using rptts::testing::TempDir;

namespace {

// Cheapest monotone path by exhaustive recursion.
double brute_force(const MatrixD& c, int i, int j) {
  const int n = static_cast<int>(c.rows()), m = static_cast<int>(c.cols());
  if (i == n - 1 && j == m - 1) return c(i, j);
  double best = std::numeric_limits<double>::infinity();
  if (i + 1 < n) best = std::min(best, brute_force(c, i + 1, j));
  if (j + 1 < m) best = std::min(best, brute_force(c, i, j + 1));
  if (i + 1 < n && j + 1 < m) best = std::min(best, brute_force(c, i + 1, j + 1));
  return c(i, j) + best;
}

const std::vector<corpus::TrainingExample>& toy_examples() {
  static const std::vector<corpus::TrainingExample> examples = [] {
    TempDir dir("eval_toy");
    const auto paths = corpus::write_toy_corpus(dir.path(), corpus::generate_toy_corpus(4, 2, 7));
    return corpus::prepare_corpus(paths.audio_dir, paths.alignment, {}).examples;
  }();
  return examples;
}

dsp::Waveform ramp(int n) {
  dsp::Waveform w;
  for (int i = 0; i < n; ++i) w.samples.push_back(std::sin(0.01f * i));
  return w;
}

}  // namespace

TEST_CASE("dtw against exhaustive enumeration") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 60; ++t) {
    MatrixD c(size(rng), size(rng));
    for (int i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
    const DtwResult r = dtw(c);
    CHECK(r.cost == doctest::Approx(brute_force(c, 0, 0)).epsilon(1e-12));
    REQUIRE(!r.path.empty());
    CHECK(r.path.front() == std::pair<int, int>{0, 0});
    CHECK(r.path.back() == std::pair<int, int>{c.rows() - 1, c.cols() - 1});
    double along = 0;
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      along += c(r.path[k].first, r.path[k].second);
      if (k == 0) continue;
      const int di = r.path[k].first - r.path[k - 1].first;
      const int dj = r.path[k].second - r.path[k - 1].second;
      CHECK(((di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1)));
    }
    CHECK(along == doctest::Approx(r.cost).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dtw(MatrixD(0, 3)), Error);
}

TEST_CASE("dtw on identical and repeated sequences") {
  const std::vector<double> a = {1, 3, 2, 5};
  const DtwResult same = dtw(4, 4, [&](int i, int j) { return std::abs(a[i] - a[j]); });
  CHECK(same.cost == 0.0);
  REQUIRE(same.path.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(same.path[k] == std::pair<int, int>{k, k});

  const DtwResult rep = dtw(1, 3, [](int, int) { return 0.0; });
  CHECK(rep.cost == 0.0);
  CHECK(rep.path.size() == 3);
}

TEST_CASE("mel cepstral distortion") {
  CHECK(mcd_scale() == doctest::Approx(10 * std::sqrt(2.0) / std::log(10.0)));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  dsp::MfccSequence a, b;
  a.frames = MatrixD(6, 13);
  for (int i = 0; i < a.frames.size(); ++i) a.frames.data()[i] = nd(rng);
  CHECK(mcd(a, a) == 0.0);
  b.frames = a.frames;
  b.frames.rightCols(12).array() += 0.1;
  b.frames.col(0).array() += 5;  // c0 is excluded
  CHECK(mcd(a, b) == doctest::Approx(mcd_scale() * std::sqrt(12 * 0.01)).epsilon(1e-9));
  CHECK(mcd(a, b) == doctest::Approx(2.128).epsilon(1e-3));

  dsp::MfccSequence c;
  c.frames = MatrixD(9, 13);
  for (int i = 0; i < c.frames.size(); ++i) c.frames.data()[i] = nd(rng);
  CHECK(mcd(a, c) == doctest::Approx(mcd(c, a)).epsilon(1e-12));
}

TEST_CASE("average-mel baseline") {
  corpus::SegmentSpec spec;
  spec.frames_b = {0, 1};
  spec.frames_i = {1, 4};
  spec.frames_a = {4, 5};
  corpus::MatrixF x_in(2, 3);
  x_in.row(0).setZero();
  x_in.row(1).setConstant(2);
  const corpus::MatrixF out = average_mel_fill(x_in, spec);
  REQUIRE(out.rows() == 5);
  for (int r = 1; r < 4; ++r) CHECK((out.row(r).array() == 1.0f).all());
  CHECK(out.row(0) == x_in.row(0));
  CHECK(out.row(4) == x_in.row(1));

  const corpus::MatrixF flat = corpus::MatrixF::Constant(2, 3, -1.5f);
  CHECK((average_mel_fill(flat, spec).array() == -1.5f).all());
}

TEST_CASE("stitching") {
  const int hop = 256;
  corpus::SegmentSpec spec;
  spec.frames_b = {0, 10};
  spec.frames_i = {10, 16};
  spec.frames_a = {16, 30};
  const dsp::Waveform gt = ramp(30 * hop);
  dsp::Waveform same;
  same.samples.assign(gt.samples.begin() + 10 * hop, gt.samples.begin() + 16 * hop);
  const dsp::Waveform out = stitch(same, gt, spec, hop);
  REQUIRE(out.samples.size() == gt.samples.size());
  float worst = 0;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    worst = std::max(worst, std::abs(out.samples[i] - gt.samples[i]));
  }
  CHECK(worst < 1e-6f);

  const dsp::Waveform longer = stitch(ramp(2000), gt, spec, hop);
  CHECK(longer.samples.size() == static_cast<std::size_t>(10 * hop + 2000 + 14 * hop));

  corpus::SegmentSpec empty = spec;
  empty.frames_i = {10, 10};
  empty.frames_a = {10, 30};
  const dsp::Waveform joined = stitch(dsp::Waveform{}, gt, empty, hop);
  REQUIRE(joined.samples.size() == gt.samples.size());
  CHECK(joined.samples == gt.samples);
}

TEST_CASE("length buckets") {
  CHECK(length_bucket(1) == "short");
  CHECK(length_bucket(9) == "short");
  CHECK(length_bucket(10) == "medium");
  CHECK(length_bucket(20) == "medium");
  CHECK(length_bucket(21) == "long");
}

TEST_CASE("corpus evaluation of the baselines") {
  EvalOptions opts;
  opts.methods = {kMethodAverageMel, kMethodGtMel};
  opts.griffin_lim_iterations = 16;
  const EvalReport r = evaluate_corpus(toy_examples(), nullptr, opts);
  CHECK(r.records.size() == 2 * toy_examples().size());
  for (const auto& rec : r.records) {
    CHECK(std::isfinite(rec.mcd));
    CHECK(rec.mcd >= 0);
  }
  CHECK(r.mean(kMethodGtMel) < r.mean(kMethodAverageMel));

  int all_rows = 0;
  for (const auto& agg : r.aggregates()) {
    double sum = 0;
    int n = 0;
    for (const auto& rec : r.records) {
      if (rec.method != agg.method) continue;
      if (agg.subset != "all" && length_bucket(rec.insert_phonemes) != agg.subset) continue;
      sum += rec.mcd;
      ++n;
    }
    CHECK(agg.count == n);
    CHECK(agg.mean_mcd == doctest::Approx(sum / n).epsilon(1e-12));
    if (agg.subset == "all") ++all_rows;
  }
  CHECK(all_rows == 2);

  EvalOptions threaded = opts;
  threaded.jobs = 3;
  const EvalReport again = evaluate_corpus(toy_examples(), nullptr, threaded);
  REQUIRE(again.records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) CHECK(again.records[i].mcd == r.records[i].mcd);

  auto missing = toy_examples();
  missing[0].segmentation.reset();
  try {
    evaluate_corpus(missing, nullptr, opts);
    FAIL("missing segmentation accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingSegmentation);
  }
}

TEST_CASE("report csv") {
  TempDir dir("report");
  EvalReport r;
  r.records.push_back({"a", kMethodModel, 1.5, 10, 1, 3, 12});
  r.records.push_back({"b", kMethodModel, 2.5, 10, 1, 3, 12});
  r.write_csv(dir.path() / "r.csv");
  CHECK(std::filesystem::file_size(dir.path() / "r.csv") > 0);
  CHECK(r.mean(kMethodModel) == 2.0);
  CHECK(r.summary_text().find("model") != std::string::npos);
}

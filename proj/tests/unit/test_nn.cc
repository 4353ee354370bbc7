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
#include <fstream>
#include <random>

#include "fixtures.h"
#include "rptts/common/error.h"
#include "rptts/nn/checkpoint_io.h"
#include "rptts/nn/grad_check.h"
#include "rptts/nn/layers.h"
#include "rptts/nn/ops.h"
#include "rptts/nn/optim.h"
#include "rptts/nn/params.h"
#include "rptts/nn/schedule.h"

using namespace rptts;
using namespace rptts::nn;

static_assert(std::is_same_v<Real, double>, "nn tests run in double precision");

namespace {

Tensor random_tensor(const Shape& shape, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (int d : shape) n *= d;
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Real> v(n);
  for (auto& x : v) x = u(rng);
  return Tensor::from(shape, v);
}

// Weighted sum with fixed random weights, so every output coordinate matters.
Tensor project(const Tensor& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sum(mul(y, random_tensor(y.shape(), rng)));
}

void expect_grads(const std::string& what, const std::function<Tensor()>& fn,
                  std::vector<Tensor> inputs) {
  const auto report = grad_check(fn, std::move(inputs));
  INFO(what << ": " << report.summary());
  CHECK(report.passed);
  CHECK(report.checked > 0);
}

}  // namespace

TEST_CASE("linear layer") {
  std::mt19937_64 rng(1);
  ParamStore ps;
  Linear lin(ps, "lin", 3, 3, rng);
  lin.weight.values() = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const Tensor x = random_tensor({4, 3}, rng);
  CHECK(lin(x).values() == x.values());

  ParamStore ps2;
  Linear wide(ps2, "w", 2, 3, rng);
  CHECK(wide(random_tensor({1, 2}, rng)).shape() == Shape{1, 3});

  const Tensor in = random_tensor({2, 3}, rng);
  ParamStore ps3;
  Linear l3(ps3, "l", 3, 2, rng);
  std::vector<Tensor> inputs = {in, l3.weight, l3.bias};
  expect_grads("linear", [&] { return project(l3(in), 7); }, inputs);
}

TEST_CASE("softmax, layer norm, relu and dropout") {
  const Tensor s = softmax_rows(Tensor::from({1, 2}, {0, 0}));
  CHECK(s.at(0) == 0.5);
  CHECK(s.at(1) == 0.5);

  ParamStore ps;
  LayerNorm ln(ps, "ln", 4);
  const Tensor c = ln(Tensor::full({2, 4}, 3.5));
  for (Real v : c.values()) CHECK(std::abs(v) < 1e-12);

  CHECK(relu(Tensor::from({3}, {-1, 0.5, 2})).values() == std::vector<Real>{0, 0.5, 2});

  std::mt19937_64 rng(2);
  const Tensor x = Tensor::full({100, 10}, 1.0);
  CHECK(dropout(x, 0.3, Context{}).values() == x.values());
  Rng drop_rng(4);
  const Tensor d = dropout(x, 0.5, Context{true, &drop_rng});
  int zeros = 0;
  for (Real v : d.values()) {
    if (v == 0) ++zeros;
    else CHECK(v == doctest::Approx(2.0));
  }
  CHECK(zeros > 400);
  CHECK(zeros < 600);

  const Tensor a = random_tensor({3, 5}, rng);
  expect_grads("softmax", [&] { return project(softmax_rows(a), 1); }, {a});
  const Tensor b = random_tensor({3, 6}, rng);
  const Tensor gamma = random_tensor({6}, rng), beta = random_tensor({6}, rng);
  expect_grads("layer_norm", [&] { return project(layer_norm_rows(b, gamma, beta), 2); },
               {b, gamma, beta});
  const Tensor r = random_tensor({4, 4}, rng);
  expect_grads("relu", [&] { return project(relu(r), 3); }, {r});
}

TEST_CASE("multi-head attention") {
  Rng rng(3);
  std::mt19937_64 data(3);
  ParamStore ps;
  MultiHeadAttention big(ps, "mha", 256, 2, 128, 128, rng);
  CHECK(big(random_tensor({3, 256}, data), random_tensor({5, 256}, data)).shape() ==
        Shape{3, 256});

  ParamStore small_ps;
  MultiHeadAttention mha(small_ps, "a", 8, 2, 4, 4, rng);
  // Identical keys: uniform weights, so each head returns the shared value row.
  const Tensor row = random_tensor({1, 8}, data);
  const Tensor kv = concat_rows({row, row, row, row});
  const Tensor q = random_tensor({3, 8}, data);
  std::vector<Tensor> w;
  const Tensor same = mha(q, kv, &w);
  REQUIRE(w.size() == 2);
  for (const auto& h : w) {
    for (Real v : h.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  const Tensor single = mha(q, row);
  CHECK(same.shape() == single.shape());
  for (std::size_t i = 0; i < same.size(); ++i) {
    CHECK(same.at(i) == doctest::Approx(single.at(i)).epsilon(1e-12));
  }

  // Attention maps against a direct recomputation from the projection weights.
  const Tensor kv2 = random_tensor({5, 8}, data);
  std::vector<Tensor> maps;
  mha(q, kv2, &maps);
  const auto proj = [&](const std::string& n, const Tensor& x) {
    return add_rowvec(matmul(x, small_ps.get("a." + n + ".weight")),
                      small_ps.get("a." + n + ".bias"));
  };
  const Tensor qq = proj("q", q), kk = proj("k", kv2);
  double worst = 0;
  for (int h = 0; h < 2; ++h) {
    for (int i = 0; i < 3; ++i) {
      std::vector<double> logits(5);
      double mx = -1e300;
      for (int j = 0; j < 5; ++j) {
        double dot = 0;
        for (int c = 0; c < 4; ++c) dot += qq.at(i * 8 + h * 4 + c) * kk.at(j * 8 + h * 4 + c);
        logits[j] = dot / 2.0;
        mx = std::max(mx, logits[j]);
      }
      double z = 0;
      for (double& l : logits) z += (l = std::exp(l - mx));
      for (int j = 0; j < 5; ++j) {
        worst = std::max(worst, std::abs(logits[j] / z - maps[h].at(i * 5 + j)));
      }
    }
  }
  CHECK(worst < 1e-9);

  std::vector<Tensor> inputs = {q, kv2};
  for (auto& [n, t] : small_ps.entries()) inputs.push_back(t);
  expect_grads("attention", [&] { return project(mha(q, kv2), 4); }, inputs);
}

TEST_CASE("fft block shape, determinism and gradients") {
  Rng rng(5);
  std::mt19937_64 data(5);
  FftBlockConfig cfg;
  cfg.d = 8;
  cfg.d_k = cfg.d_v = 4;
  cfg.filter = 16;
  cfg.kernel = 3;
  ParamStore ps;
  FftBlock block(ps, "fft", cfg, rng);
  for (int l : {1, 7, 64}) {
    const Tensor x = random_tensor({l, 8}, data);
    const Tensor a = block(x, Context{}), b = block(x, Context{});
    CHECK(a.shape() == Shape{l, 8});
    CHECK(a.values() == b.values());
  }
  const Tensor x = random_tensor({4, 8}, data);
  std::vector<Tensor> inputs = {x};
  for (auto& [n, t] : ps.entries()) inputs.push_back(t);
  expect_grads("fft_block", [&] { return project(block(x, Context{}), 5); }, inputs);
}

TEST_CASE("positional encoding") {
  const Tensor pe = sinusoidal_positional_encoding(5, 4);
  CHECK(std::vector<Real>(pe.values().begin(), pe.values().begin() + 4) ==
        std::vector<Real>{0, 1, 0, 1});
  for (Real v : sinusoidal_positional_encoding(50, 16).values()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  for (int p = 0; p < 5; ++p) {
    for (int i = 0; i < 4; ++i) {
      const double angle = p / std::pow(10000.0, 2.0 * (i / 2) / 4);
      const double want = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
      CHECK(pe.at(p * 4 + i) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  try {
    sinusoidal_positional_encoding(3, 5);
    FAIL("odd dimension accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOddDimension);
  }
}

TEST_CASE("convolutions") {
  Rng rng(6);
  std::mt19937_64 data(6);
  ParamStore ps;
  Conv1d id(ps, "id", 3, 3, 1, rng);
  id.weight.values() = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const Tensor x = random_tensor({5, 3}, data);
  CHECK(id(x).values() == x.values());

  Conv1d c3(ps, "c3", 3, 2, 3, rng);
  CHECK(c3(x).shape() == Shape{5, 2});
  std::vector<Tensor> inputs = {x, c3.weight, c3.bias};
  expect_grads("conv1d", [&] { return project(c3(x), 6); }, inputs);

  Conv2d c2(ps, "c2", 1, 2, 3, 1, 1, rng, true);
  GroupNorm gn(ps, "gn", 2, 1);
  const Tensor img = random_tensor({1, 6, 6, 1}, data);
  CHECK(c2(img).shape() == Shape{1, 6, 6, 2});
  inputs = {img, c2.weight, c2.bias, gn.gamma, gn.beta};
  expect_grads("conv2d+group_norm", [&] { return project(gn(c2(img)), 7); }, inputs);
  CHECK(conv_out_size(96, 7, 2, 3) == 48);
}

TEST_CASE("adam") {
  ParamStore ps;
  Tensor w = ps.add("w", {3}, {1.0, -2.0, 0.5});
  Adam adam(ps);
  w.grad() = {0, 0, 0};
  adam.step(ps, 0.1);
  CHECK(w.values() == std::vector<Real>{1.0, -2.0, 0.5});

  ParamStore ps2;
  Tensor v = ps2.add("v", {3}, {0.0, 0.0, 0.0});
  Adam adam2(ps2, AdamConfig{0.5, 0.7, 1e-8});
  v.grad() = {3.0, -0.2, 1e-3};
  adam2.step(ps2, 0.01);
  CHECK(v.at(0) < 0);
  CHECK(v.at(1) > 0);
  CHECK(v.at(2) < 0);

  ParamStore ps3;
  Tensor x = ps3.add("x", {1}, {1.0});
  Adam adam3(ps3);
  double prev = 1.0;
  for (int i = 0; i < 10; ++i) {
    ps3.zero_grad();
    square(x).backward();
    adam3.step(ps3, 0.1);
    CHECK(std::abs(x.at(0)) < prev);
    prev = std::abs(x.at(0));
  }
  CHECK(adam3.steps() == 10);

  // A parameter without a gradient is skipped.
  ParamStore ps4;
  Tensor a = ps4.add("a", {1}, {2.0});
  Tensor b = ps4.add("b", {1}, {2.0});
  Adam adam4(ps4);
  b.grad() = {1.0};
  adam4.step(ps4, 0.1);
  CHECK(a.at(0) == 2.0);
  CHECK(b.at(0) < 2.0);
}

TEST_CASE("learning-rate schedule") {
  const LrSchedule s;
  CHECK(lr_at(s, 0) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(lr_at(s, 80000) == doctest::Approx(0.0625 * 0.3).epsilon(1e-15));
  CHECK(lr_at(s, 80000) == doctest::Approx(0.01875).epsilon(1e-15));
  CHECK(lr_at(s, 160000) == doctest::Approx(0.0016875).epsilon(1e-15));
  LrSchedule bad;
  bad.milestones = {10, 10};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("grad check reports") {
  Tensor x = Tensor::from({2}, {1.0, 2.0});
  const auto r = grad_check([&] { return sum(square(x)); }, {x});
  CHECK(r.passed);
  CHECK(r.max_rel_error < 1e-6);
  Tensor y = Tensor::from({2}, {1.0, 2.0}, true);
  sum(square(y)).backward();
  CHECK(y.grad() == std::vector<Real>{2.0, 4.0});

  Tensor a = Tensor::from({3}, {0.3, -0.7, 1.1}), b = Tensor::from({3}, {0.0, 0.0, 0.0});
  CHECK(grad_check([&] { return mean_abs_diff(a, b); }, {a}).passed);

  Tensor k = Tensor::from({2}, {0.0, 1.0});
  const auto kink = grad_check([&] { return sum(relu(k)); }, {k});
  CHECK(kink.skipped_nondifferentiable == 1);
  CHECK(kink.summary().find("skipped at nondifferentiable point") != std::string::npos);
}

TEST_CASE("parameter store") {
  Rng rng(8);
  ParamStore ps("g");
  Tensor w = ps.add_xavier("w", {2, 2}, 2, 2, rng);
  CHECK(ps.entries().front().first == "g.w");
  CHECK_THROWS_AS(ps.add_constant("w", {1}, 0), Error);
  const auto h = ps.hash();
  w.values()[0] += 1;
  CHECK(ps.hash() != h);
  w.grad() = {3, 4, 0, 0};
  CHECK(ps.grad_norm() == doctest::Approx(5.0));
  ps.clip_grad_norm(1.0);
  CHECK(ps.grad_norm() == doctest::Approx(1.0));
  ps.set_trainable(false);
  CHECK(!w.requires_grad());
}

TEST_CASE("checkpoint container") {
  rptts::testing::TempDir dir("ckpt_io");
  ckpt::CheckpointData data;
  data.meta = "[model]\nd = 8\n";
  data.arrays.push_back({"a", {2, 2}, {1.f, 2.f, 3.f, 4.f}});
  data.blobs.push_back({"rng", "state bytes"});
  ckpt::write_checkpoint(dir.path() / "c.bin", data);
  CHECK(ckpt::read_checkpoint(dir.path() / "c.bin") == data);

  std::filesystem::resize_file(dir.path() / "c.bin",
                               std::filesystem::file_size(dir.path() / "c.bin") - 3);
  try {
    ckpt::read_checkpoint(dir.path() / "c.bin");
    FAIL("truncated checkpoint accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCorruptCheckpoint);
  }
  std::ofstream(dir.path() / "bad.bin") << "XXXXXXXX";
  try {
    ckpt::read_checkpoint(dir.path() / "bad.bin");
    FAIL("bad magic accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCheckpointVersionMismatch);
  }
}

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

// Built with double-precision tensors.

#include <cmath>
#include <functional>
#include <sstream>

#include "rptts/losses/losses.h"
#include "rptts/model/generator.h"
#include "rptts/model/resnet.h"
#include "rptts/nn/grad_check.h"
#include "rptts/nn/layers.h"
#include "rptts/verify/suites.h"

#ifndef RPTTS_REAL_F64
#error "the gradient suite must be compiled in double precision"
#endif

namespace rptts::verify {
namespace {

using nn::Real;
using nn::Shape;
using nn::Tensor;

Tensor uniform(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Real> v(nn::numel(shape));
  for (auto& x : v) x = u(rng);
  return Tensor::from(shape, std::move(v));
}

// Values in [lo, hi] with a random sign; keeps abs/relu arguments off zero.
Tensor away_from_zero(const Shape& shape, Rng& rng, double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::bernoulli_distribution sign(0.5);
  std::vector<Real> v(nn::numel(shape));
  for (auto& x : v) x = sign(rng) ? u(rng) : -u(rng);
  return Tensor::from(shape, std::move(v));
}

// Projects a tensor output onto a fixed random direction.
std::function<Tensor()> project(std::function<Tensor()> f, Rng& rng) {
  const Tensor probe = f();
  const Tensor w = uniform(probe.shape(), rng);
  return [f = std::move(f), w] { return nn::sum(nn::mul(f(), w)); };
}

std::vector<Tensor> param_tensors(const nn::ParamStore& ps) {
  std::vector<Tensor> out;
  for (const auto& [name, t] : ps.entries()) out.push_back(t);
  return out;
}

class Runner {
 public:
  explicit Runner(std::uint64_t seed) : rng(seed) { result.suite = "grads"; }

  void check(const std::string& name, std::function<Tensor()> fn, std::vector<Tensor> inputs,
             bool scalar = false, int max_coords = 0) {
    nn::GradCheckOptions opt;
    opt.max_coords_per_input = max_coords;
    opt.seed = rng();
    auto f = scalar ? std::move(fn) : project(std::move(fn), rng);
    const auto report = nn::grad_check(f, std::move(inputs), opt);
    CaseResult c{name, report.passed && report.checked > 0, report.summary()};
    if (report.checked == 0) c.detail += " (no coordinate checked)";
    result.cases.push_back(std::move(c));
  }

  void expect(const std::string& name, bool ok, const std::string& detail) {
    result.cases.push_back({name, ok, detail});
  }

  Rng rng;
  SuiteResult result;
};

model::ModelConfig tiny_config() {
  model::ModelConfig c;
  c.n_phonemes = 6;
  c.d_mel = 4;
  c.d = 8;
  c.enc_blocks = 1;
  c.dec_blocks = 1;
  c.heads = 2;
  c.d_k = 4;
  c.d_v = 4;
  c.ffn_filter = 8;
  c.ffn_kernel = 3;
  c.predictor_filter = 6;
  c.predictor_kernel = 3;
  c.n_bins = 8;
  c.window_len = 8;
  c.window_hop = 4;
  c.d_style = 3;
  c.resnet_width = 2;
  c.resnet_groups = 1;
  return c;
}

void op_cases(Runner& r) {
  auto& rng = r.rng;
  {
    Tensor a = uniform({3, 4}, rng), b = uniform({4, 2}, rng);
    r.check("matmul", [=] { return nn::matmul(a, b); }, {a, b});
    Tensor c = uniform({4, 3}, rng), d = uniform({2, 4}, rng);
    r.check("matmul transposed", [=] { return nn::matmul(c, d, true, true); }, {c, d});
  }
  {
    Tensor a = uniform({2, 3}, rng), b = uniform({2, 3}, rng), v = uniform({3}, rng);
    r.check("add", [=] { return nn::add(a, b); }, {a, b});
    r.check("sub", [=] { return nn::sub(a, b); }, {a, b});
    r.check("mul", [=] { return nn::mul(a, b); }, {a, b});
    r.check("scale", [=] { return nn::scale(a, Real(-1.7)); }, {a});
    r.check("add_scalar", [=] { return nn::add_scalar(a, Real(0.3)); }, {a});
    r.check("add_rowvec", [=] { return nn::add_rowvec(a, v); }, {a, v});
    r.check("square", [=] { return nn::square(a); }, {a});
    r.check("sum", [=] { return nn::sum(a); }, {a}, true);
    r.check("mean", [=] { return nn::mean(a); }, {a}, true);
    r.check("mse", [=] { return nn::mse(a, b); }, {a, b}, true);
  }
  {
    Tensor a = away_from_zero({3, 4}, rng);
    r.check("relu", [=] { return nn::relu(a); }, {a});
    r.check("abs", [=] { return nn::abs(a); }, {a});
    Tensor b = uniform({3, 4}, rng);
    Tensor c = nn::add(b, away_from_zero({3, 4}, rng)).detach();
    r.check("mean_abs_diff", [=] { return nn::mean_abs_diff(b, c); }, {b, c}, true);
  }
  {
    Tensor a = uniform({1}, rng), b = uniform({1}, rng), c = uniform({1}, rng);
    r.check("stack_scalars", [=] { return nn::stack_scalars({a, b, c}); }, {a, b, c});
    r.check("add_all", [=] { return nn::add_all({a, b, c}); }, {a, b, c});
  }
  {
    Tensor x = uniform({3, 5}, rng, -2, 2), g = uniform({5}, rng), b = uniform({5}, rng);
    r.check("softmax_rows", [=] { return nn::softmax_rows(x); }, {x});
    r.check("layer_norm_rows", [=] { return nn::layer_norm_rows(x, g, b); }, {x, g, b});
  }
  {
    Tensor x = uniform({4, 3}, rng), y = uniform({2, 3}, rng), z = uniform({4, 2}, rng);
    r.check("gather_rows", [=] { return nn::gather_rows(x, {3, 0, 3, 1}); }, {x});
    r.check("concat_rows", [=] { return nn::concat_rows({x, y}); }, {x, y});
    r.check("slice_rows", [=] { return nn::slice_rows(x, 1, 3); }, {x});
    r.check("concat_cols", [=] { return nn::concat_cols({x, z}); }, {x, z});
    r.check("slice_cols", [=] { return nn::slice_cols(x, 1, 3); }, {x});
    r.check("reshape", [=] { return nn::reshape(x, {2, 6}); }, {x});
    r.check("im2col_1d", [=] { return nn::im2col_1d(x, 3); }, {x});
  }
  {
    Tensor x = uniform({1, 6, 6, 2}, rng);
    r.check("im2col_2d", [=] { return nn::im2col_2d(x, 3, 3, 2, 1); }, {x});
    Tensor g = uniform({2}, rng), b = uniform({2}, rng);
    Tensor y = uniform({2, 3, 3, 4}, rng), g4 = uniform({4}, rng), b4 = uniform({4}, rng);
    r.check("group_norm_nhwc", [=] { return nn::group_norm_nhwc(y, 2, g4, b4); }, {y, g4, b4});
    r.check("maxpool2d_nhwc", [=] { return nn::maxpool2d_nhwc(x, 3, 2, 1); }, {x});
    r.check("global_avg_pool_nhwc", [=] { return nn::global_avg_pool_nhwc(x); }, {x});
  }
  {
    Tensor a = uniform({3, 4}, rng), b = uniform({3, 4}, rng);
    r.check("row_l2_distance", [=] { return nn::row_l2_distance(a, b); }, {a, b});
  }
  {
    Tensor x = uniform({4, 5}, rng);
    r.check("dropout", [=] {
      Rng local(11);
      return nn::dropout(x, Real(0.3), local);
    }, {x});
  }
}

void layer_cases(Runner& r) {
  auto& rng = r.rng;
  nn::ParamStore ps("t");
  {
    nn::Linear lin(ps, "lin", 3, 4, rng);
    Tensor x = uniform({2, 3}, rng);
    r.check("linear", [=] { return lin(x); }, {x, lin.weight, lin.bias});
  }
  {
    nn::Conv1d conv(ps, "conv", 3, 2, 3, rng);
    Tensor x = uniform({5, 3}, rng);
    r.check("conv1d", [=] { return conv(x); }, {x, conv.weight, conv.bias});
  }
  {
    nn::LayerNorm ln(ps, "ln", 4);
    Tensor x = uniform({3, 4}, rng);
    r.check("layer_norm", [=] { return ln(x); }, {x, ln.gamma, ln.beta});
  }
  {
    nn::Embedding emb(ps, "emb", 5, 3, rng);
    r.check("embedding", [=] { return emb({4, 0, 4, 2}); }, {emb.table});
  }
  {
    nn::ParamStore mp("mha");
    nn::MultiHeadAttention mha(mp, "attn", 8, 2, 4, 4, rng);
    Tensor q = uniform({3, 8}, rng), kv = uniform({5, 8}, rng);
    auto inputs = param_tensors(mp);
    inputs.push_back(q);
    inputs.push_back(kv);
    r.check("multi_head_attention", [=] { return mha(q, kv); }, inputs);
  }
  {
    nn::ParamStore fp("fft");
    nn::FftBlock block(fp, "block", {8, 2, 4, 4, 8, 3, 0.1}, rng);
    Tensor x = uniform({4, 8}, rng);
    auto inputs = param_tensors(fp);
    inputs.push_back(x);
    r.check("fft_block", [=] {
      Rng local(5);
      return block(x, nn::Context{true, &local});
    }, inputs, false, 24);
  }
  {
    nn::Conv2d conv(ps, "conv2d", 1, 2, 3, 2, 1, rng, true);
    Tensor x = uniform({1, 6, 6, 1}, rng);
    r.check("conv2d", [=] { return conv(x); }, {x, conv.weight, conv.bias});
  }
  {
    nn::GroupNorm gn(ps, "gn", 4, 2);
    Tensor x = uniform({2, 3, 2, 4}, rng);
    r.check("group_norm", [=] { return gn(x); }, {x, gn.gamma, gn.beta});
  }
  {
    Tensor pe = nn::sinusoidal_positional_encoding(5, 4);
    bool ok = true;
    for (int p = 0; p < 5; ++p) {
      for (int i = 0; i < 4; ++i) {
        const double angle = p / std::pow(10000.0, 2.0 * (i / 2) / 4.0);
        const double want = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
        ok = ok && std::abs(pe.at(p * 4 + i) - want) < 1e-12;
      }
    }
    r.expect("positional_encoding formula", ok, "5x4 table against direct evaluation");
  }
}

void model_cases(Runner& r) {
  auto& rng = r.rng;
  const model::ModelConfig cfg = tiny_config();
  {
    nn::ParamStore ps("vp");
    model::VariancePredictor vp(ps, "pitch", cfg, rng);
    Tensor h = uniform({5, cfg.d}, rng);
    auto inputs = param_tensors(ps);
    inputs.push_back(h);
    r.check("variance_predictor", [=] { return vp(h, {}); }, inputs);
  }
  {
    Tensor h = uniform({3, 4}, rng);
    r.check("length_regulate", [=] { return model::length_regulate(h, {2, 1, 3}); }, {h});
    Tensor x = uniform({5, 4}, rng), z = uniform({6, 4}, rng);
    r.check("splice", [=] { return model::splice(x, z, 2, {1, 4}); }, {x, z});
  }
  {
    Rng init(3);
    model::Generator g(cfg, init);
    corpus::TrainingExample ex;
    ex.id = "toy";
    ex.phonemes = {1, 2, 3, 4, 5};
    ex.durations = {2, 1, 2, 1, 2};
    ex.pitch_ph = {120.0f, 0.0f, 130.0f, 125.0f, 110.0f};
    ex.energy_ph = {1.0f, 0.5f, 2.0f, 1.5f, 0.8f};
    ex.word_index = {0, 0, 1, 1, 2};
    ex.mel = corpus::MatrixF::Random(8, cfg.d_mel);
    g.stats = model::NormStats::fit({ex});
    const auto spec = corpus::make_segment_spec(ex, {2, 4}, {1, 2});
    const Tensor target = model::to_tensor(ex.mel);
    const model::Teacher teacher = model::make_teacher(ex, g.stats);
    auto fn = [&g, ex, spec, target, teacher] {
      Rng local(9);
      const auto out = g.forward(corpus::apply_segmentation(ex, spec), model::Mode::kTrain,
                                 &teacher, nn::Context{true, &local});
      const auto v = losses::variance_losses(out.variance, teacher);
      return nn::add_all({nn::mse(out.mel, target), v.pitch, v.energy, v.duration});
    };
    r.check("generator", fn, param_tensors(g.params()), true, 6);
  }
  {
    Rng init(4);
    nn::ParamStore ps("rn");
    model::ResNet18 net(ps, "resnet", 2, 1, 3, init);
    Tensor x = uniform({2, 8, 8, 1}, rng);
    auto inputs = param_tensors(ps);
    inputs.push_back(x);
    r.check("resnet18", [=] {
      const auto out = net(x);
      std::vector<Tensor> parts = {nn::sum(out.out)};
      for (const auto& f : out.features) parts.push_back(nn::mean(nn::square(f)));
      return nn::add_all(parts);
    }, inputs, true, 8);
  }
  {
    Tensor m = uniform({3, 4}, rng);
    r.check("pad_center", [=] { return model::pad_center(m, 6, Real(-2)); }, {m});
  }
  {
    Rng init(5);
    model::Discriminator dg("dg", cfg, init);
    Tensor a = uniform({5, cfg.d_mel}, rng), b = uniform({7, cfg.d_mel}, rng);
    auto inputs = param_tensors(dg.params());
    inputs.push_back(a);
    inputs.push_back(b);
    r.check("discriminator_global", [&dg, a, b] {
      const auto out = dg.global({a, b});
      return nn::add(nn::sum(out.scores), nn::mean(nn::square(out.features[2])));
    }, inputs, true, 6);
  }
  {
    Rng init(6);
    model::StyleExtractor fs(cfg, init);
    Tensor w1 = uniform({cfg.window_len, cfg.d_mel}, rng);
    Tensor w2 = uniform({cfg.window_len, cfg.d_mel}, rng);
    auto inputs = param_tensors(fs.params());
    inputs.push_back(w1);
    r.check("style_extractor", [&fs, w1, w2] { return fs({w1, w2}); }, inputs, false, 6);
  }
}

void loss_cases(Runner& r) {
  auto& rng = r.rng;
  {
    Tensor x = uniform({6, 3}, rng);
    Tensor xh = nn::add(x, away_from_zero({6, 3}, rng)).detach();
    r.check("l1_reconstruction", [=] { return losses::l1_reconstruction(x, xh, {2, 5}, 2); },
            {x, xh}, true);
  }
  {
    Tensor real = uniform({4}, rng), fake = uniform({4}, rng);
    r.check("lsgan_d", [=] { return losses::lsgan_d(real, fake); }, {real, fake}, true);
    r.check("lsgan_d summed", [=] { return losses::lsgan_d(real, fake, 2); }, {real, fake}, true);
    r.check("lsgan_g", [=] { return losses::lsgan_g(fake); }, {fake}, true);
  }
  {
    Tensor r1 = uniform({2, 3}, rng), r2 = uniform({4}, rng);
    Tensor f1 = nn::add(r1, away_from_zero({2, 3}, rng)).detach();
    Tensor f2 = nn::add(r2, away_from_zero({4}, rng)).detach();
    r.check("feature_matching", [=] {
      return losses::feature_matching({r1, r2}, {f1, f2}, Real(1.5));
    }, {f1, f2}, true);
    // The real branch is a constant: no gradient may reach it.
    r1.set_requires_grad(true);
    r2.set_requires_grad(true);
    f1.set_requires_grad(true);
    losses::feature_matching({r1, r2}, {f1, f2}).backward();
    r.expect("feature_matching real branch detached", !r1.has_grad() && !r2.has_grad(),
             "real features receive no gradient");
  }
  {
    Tensor a = uniform({4, 3}, rng), p = uniform({4, 3}, rng), n = uniform({4, 3}, rng);
    r.check("triplet_margin", [=] { return losses::triplet_margin(a, p, n, Real(0.2)); },
            {a, p, n}, true);
    Tensor e = uniform({5, 3}, rng);
    const std::vector<losses::Triplet> t = {{0, 1, 2}, {0, 1, 3}, {4, 3, 0}};
    r.check("triplet_loss", [=] { return losses::triplet_loss(e, t, Real(0.5)); }, {e}, true);
  }
  {
    model::VarianceOutputs v;
    v.pitch_pred = uniform({3}, rng);
    v.energy_pred = uniform({3}, rng);
    v.log_dur_pred = uniform({3}, rng);
    model::Teacher t{{0.1, -0.2, 0.3}, {0.5, 0.0, -0.5}, {2, 1, 4}};
    r.check("variance_losses", [=] {
      const auto l = losses::variance_losses(v, t);
      return nn::add_all({l.pitch, l.energy, l.duration});
    }, {v.pitch_pred, v.energy_pred, v.log_dur_pred}, true);
  }
  {
    losses::LossParts parts;
    std::vector<Tensor*> slots = {&parts.rec,        &parts.adv_global, &parts.feat_global,
                                  &parts.adv_local,  &parts.feat_local, &parts.style,
                                  &parts.pitch,      &parts.energy,     &parts.duration};
    std::vector<Tensor> inputs;
    for (auto* s : slots) {
      *s = uniform({1}, rng);
      inputs.push_back(*s);
    }
    r.check("total_generator_loss", [=] {
      return losses::total_generator_loss(parts, losses::LossWeights(), 2);
    }, inputs, true);
  }
}

}  // namespace

SuiteResult run_grad_suite(std::uint64_t seed) {
  Runner r(seed);
  op_cases(r);
  layer_cases(r);
  model_cases(r);
  loss_cases(r);
  return r.result;
}

}  // namespace rptts::verify

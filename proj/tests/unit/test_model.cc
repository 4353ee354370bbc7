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

#include <random>

#include "fixtures.h"
#include "rptts/common/error.h"
#include "rptts/model/generator.h"
#include "rptts/model/resnet.h"
#include "rptts/nn/ops.h"

using namespace rptts;
using namespace rptts::model;
using corpus::Segment;
using rptts::testing::make_example;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.n_phonemes = 16;
  c.d_mel = 6;
  c.d = 8;
  c.enc_blocks = 1;
  c.dec_blocks = 1;
  c.heads = 2;
  c.d_k = c.d_v = 4;
  c.ffn_filter = 8;
  c.ffn_kernel = 3;
  c.predictor_filter = 8;
  c.n_bins = 8;
  c.window_len = 12;
  c.window_hop = 6;
  c.d_style = 5;
  c.resnet_width = 4;
  c.resnet_groups = 2;
  return c;
}

Tensor random_tensor(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Real> v(static_cast<std::size_t>(rows) * cols);
  for (auto& x : v) x = u(rng);
  return Tensor::from({rows, cols}, v);
}

bool differs(const Tensor& a, const Tensor& b) {
  return a.shape() != b.shape() || a.values() != b.values();
}

corpus::TrainingExample tiny_example(std::mt19937_64& rng, int d_mel, const std::string& id) {
  std::uniform_int_distribution<int> n_words(2, 6), n_ph(1, 3), dur(1, 5);
  std::vector<int> durations, words;
  const int w = n_words(rng);
  for (int i = 0; i < w; ++i) {
    if (i > 0 && rng() % 3 == 0) {
      durations.push_back(dur(rng));
      words.push_back(corpus::kNoWord);
    }
    for (int p = n_ph(rng); p > 0; --p) {
      durations.push_back(dur(rng));
      words.push_back(i);
    }
  }
  return make_example(durations, words, rng(), d_mel, id);
}

}  // namespace

TEST_CASE("configs validate and round-trip through key-value text") {
  CHECK_NOTHROW(ModelConfig::full_scale().validate());
  CHECK_NOTHROW(ModelConfig::desk().validate());
  CHECK(ModelConfig::full_scale().d == 256);
  CHECK(ModelConfig::full_scale().d_style == 512);
  CHECK(ModelConfig::full_scale().heads * ModelConfig::full_scale().d_v == 256);
  KvConfig kv;
  ModelConfig::desk().write(kv);
  const ModelConfig back = ModelConfig::read(KvConfig::parse(kv.to_text()));
  KvConfig kv2;
  back.write(kv2);
  CHECK(kv.to_text() == kv2.to_text());
  ModelConfig odd = tiny();
  odd.d = 7;
  CHECK_THROWS_AS(odd.validate(), Error);
}

TEST_CASE("audio encoder") {
  Rng rng(1);
  std::mt19937_64 data(1);
  Generator g(ModelConfig::full_scale(), rng);
  const Tensor x = random_tensor(80, 80, data);
  std::vector<Segment> seg(80, Segment::kBefore);
  std::fill(seg.begin() + 40, seg.end(), Segment::kAfter);
  const Tensor a = g.encode_audio(x, seg, {});
  CHECK(a.shape() == nn::Shape{80, 256});
  CHECK(a.values() == g.encode_audio(x, seg, {}).values());
  std::vector<Segment> swapped(seg.rbegin(), seg.rend());
  CHECK(differs(a, g.encode_audio(x, swapped, {})));
}

TEST_CASE("phoneme encoder") {
  Rng rng(2);
  Generator big(ModelConfig::full_scale(), rng);
  std::vector<int> ids(17, 7);
  std::vector<Segment> seg(17, Segment::kInsert);
  CHECK(big.encode_phonemes(ids, seg, {}).shape() == nn::Shape{17, 256});

  Generator g(tiny(), rng);
  const Tensor b = g.encode_phonemes({3}, {Segment::kBefore}, {});
  const Tensor i = g.encode_phonemes({3}, {Segment::kInsert}, {});
  CHECK(differs(b, i));

  // Five distinct segment vectors: two for audio, three for text.
  const Tensor audio_seg = g.params().get("g.audio_encoder.segment.table");
  const Tensor text_seg = g.params().get("g.phoneme_encoder.segment.table");
  CHECK(audio_seg.shape() == nn::Shape{2, 8});
  CHECK(text_seg.shape() == nn::Shape{3, 8});

  g.params().zero_grad();
  nn::sum(nn::square(g.encode_phonemes({3, 4}, {Segment::kBefore, Segment::kInsert}, {})))
      .backward();
  Tensor table = g.params().get("g.phoneme_encoder.embed.table");
  REQUIRE(table.has_grad());
  double norm = 0;
  for (Real v : table.grad()) norm += v * v;
  CHECK(norm > 0);
}

TEST_CASE("cross-modal attention") {
  Rng rng(3);
  std::mt19937_64 data(3);
  Generator big(ModelConfig::full_scale(), rng);
  CHECK(big.cross_modal_attention(random_tensor(3, 256, data), random_tensor(5, 256, data))
            .shape() == nn::Shape{3, 256});

  Generator g(tiny(), rng);
  const Tensor t = random_tensor(4, 8, data);
  const Tensor frame = random_tensor(1, 8, data);
  const Tensor same = nn::concat_rows({frame, frame, frame});
  std::vector<Tensor> w;
  const Tensor out = g.cross_modal_attention(t, same, &w);
  const Tensor one = g.cross_modal_attention(t, frame);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.at(i) == doctest::Approx(one.at(i)).epsilon(1e-12));
  }
  w.clear();
  g.cross_modal_attention(t, random_tensor(6, 8, data), &w);
  REQUIRE(!w.empty());
  for (const auto& m : w) {
    for (int r = 0; r < m.rows(); ++r) {
      double s = 0;
      for (int c = 0; c < m.cols(); ++c) s += m.at(r * m.cols() + c);
      CHECK(std::abs(s - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("length regulation and duration decoding") {
  const Tensor h = Tensor::from({3, 2}, {1, 1, 2, 2, 3, 3});
  const Tensor z = length_regulate(h, {2, 1, 3});
  CHECK(z.shape() == nn::Shape{6, 2});
  CHECK(z.values() == std::vector<Real>{1, 1, 1, 1, 2, 2, 3, 3, 3, 3, 3, 3});
  CHECK(durations_from_log(Tensor::zeros({4})) == std::vector<int>{1, 1, 1, 1});
  CHECK(durations_from_log(Tensor::from({3}, {std::log(5.0), -3.0, std::log(2.6)})) ==
        std::vector<int>{4, 1, 2});
  const auto targets = log_duration_targets({1, 3});
  CHECK(targets[0] == doctest::Approx(std::log(2.0)));
  CHECK(targets[1] == doctest::Approx(std::log(4.0)));
}

TEST_CASE("variance adaptor in both modes") {
  Rng rng(4);
  std::mt19937_64 data(4);
  Generator g(tiny(), rng);
  const Tensor t = random_tensor(3, 8, data);
  Teacher teacher;
  teacher.pitch = {0.1, -0.2, 0.3};
  teacher.energy = {0.0, 0.5, -0.5};
  teacher.durations = {2, 1, 3};
  const AdaptorOutput train = g.variance_adaptor(t, Mode::kTrain, &teacher, {});
  CHECK(train.z_bar.rows() == 6);
  CHECK(train.variance.durations_used == teacher.durations);
  const AdaptorOutput infer = g.variance_adaptor(t, Mode::kInfer, nullptr, {});
  CHECK(infer.z_bar.rows() ==
        std::accumulate(infer.variance.durations_used.begin(),
                        infer.variance.durations_used.end(), 0));
  for (int d : infer.variance.durations_used) CHECK(d >= 1);
  try {
    g.variance_adaptor(t, Mode::kTrain, nullptr, {});
    FAIL("train mode without a teacher");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTeacherMissing);
  }
}

TEST_CASE("splice") {
  std::mt19937_64 data(5);
  const Tensor x_in = random_tensor(15, 4, data);
  const Tensor z = random_tensor(20, 4, data);
  const Tensor s = splice(x_in, z, 10, {3, 10});
  CHECK(s.shape() == nn::Shape{22, 4});
  for (int i = 0; i < 10 * 4; ++i) CHECK(s.at(i) == x_in.at(i));
  for (int i = 0; i < 7 * 4; ++i) CHECK(s.at(40 + i) == z.at(12 + i));
  for (int i = 0; i < 5 * 4; ++i) CHECK(s.at(68 + i) == x_in.at(40 + i));

  const Tensor no_b = splice(nn::slice_rows(x_in, 10, 15), z, 0, {0, 7});
  CHECK(no_b.rows() == 12);
  for (int i = 0; i < 7 * 4; ++i) CHECK(no_b.at(i) == z.at(i));
}

TEST_CASE("decoder and full forward shapes") {
  Rng rng(6);
  std::mt19937_64 data(6);
  Generator g(tiny(), rng);
  const Tensor z = random_tensor(22, 8, data);
  CHECK(g.decode(z, {}).shape() == nn::Shape{22, 6});
  CHECK(g.decode(z, {}).values() == g.decode(z, {}).values());

  for (int t = 0; t < 20; ++t) {
    const auto ex = tiny_example(data, 6, "u" + std::to_string(t));
    g.stats = NormStats::fit({ex});
    Rng seg_rng(t);
    const auto spec = corpus::sample_segmentation(ex, seg_rng);
    const auto train = g.forward_train(ex, spec, {});
    CHECK(train.mel.rows() == ex.num_frames());
    CHECK(train.mel.cols() == 6);

    const auto in = corpus::apply_segmentation(ex, spec);
    const auto infer = g.forward_infer(in, {});
    int sum_i = 0;
    for (std::size_t k = 0; k < in.phoneme_segments.size(); ++k) {
      if (in.phoneme_segments[k] == Segment::kInsert) sum_i += infer.variance.durations_used[k];
    }
    CHECK(infer.l_b == spec.frames_b.size());
    CHECK(infer.l_a == spec.frames_a.size());
    CHECK(infer.mel.rows() == spec.frames_b.size() + sum_i + spec.frames_a.size());
    CHECK(infer.mel.rows() > in.x_in.rows());
  }
}

TEST_CASE("inference without insert phonemes keeps the context length") {
  Rng rng(7);
  std::mt19937_64 data(7);
  Generator g(tiny(), rng);
  const auto ex = make_example({3, 2, 4, 2}, {0, 0, 1, 2}, 3, 6);
  g.stats = NormStats::fit({ex});
  const auto r = corpus::make_replacement(ex, 1, 2, {});
  const auto out = g.forward_infer(r.input, {});
  CHECK(out.l_i == 0);
  CHECK(out.mel.rows() == r.input.x_in.rows());
  const auto longer = corpus::make_replacement(ex, 1, 2, {3, 4, 5, 6, 7});
  CHECK(g.forward_infer(longer.input, {}).mel.rows() > r.input.x_in.rows());
}

TEST_CASE("resnet stages shrink a 96x80 window") {
  Rng rng(8);
  std::mt19937_64 data(8);
  nn::ParamStore ps("r");
  ResNet18 net(ps, "net", 4, 2, 3, rng);
  const Tensor x = Tensor::from({1, 96, 80, 1}, random_tensor(96, 80, data).values());
  const ResNetOutput out = net(x);
  REQUIRE(out.features.size() == kNumDiscriminatorFeatures);
  int prev_area = 96 * 80 + 1;
  for (int i = 0; i < 5; ++i) {
    const auto& s = out.features[i].shape();
    REQUIRE(s.size() == 4);
    const int area = s[1] * s[2];
    CHECK(area < prev_area);
    prev_area = area;
  }
  CHECK(out.out.shape() == nn::Shape{1, 3});
  CHECK_THROWS_AS(ResNet18(ps, "bad", 6, 4, 3, rng), Error);
}

TEST_CASE("discriminators") {
  Rng rng(9);
  std::mt19937_64 data(9);
  const ModelConfig cfg = tiny();
  Discriminator dg("dg", cfg, rng);
  const Tensor a = random_tensor(10, 6, data), b = random_tensor(7, 6, data);
  const auto out = dg.global({a, b});
  CHECK(out.scores.shape() == nn::Shape{2});
  CHECK(out.features.size() == kNumDiscriminatorFeatures);
  CHECK(out.scores.at(0) != out.scores.at(1));

  const Real floor = std::log(cfg.log_floor);
  const auto padded = dg.global({pad_center(b, 16, floor)});
  const auto direct = dg.global({b}, 16);
  CHECK(padded.scores.at(0) == direct.scores.at(0));

  Discriminator dl("dl", cfg, rng);
  const Tensor w1 = random_tensor(12, 6, data), w2 = random_tensor(12, 6, data);
  const auto local = dl.local({w1, w2});
  CHECK(local.scores.shape() == nn::Shape{2});
  CHECK(local.features.size() == kNumDiscriminatorFeatures);
  CHECK(local.scores.at(0) != local.scores.at(1));
  CHECK(dl.local({pad_center(nn::slice_rows(w1, 0, 9), 12, floor)}).scores.at(0) ==
        dl.global({nn::slice_rows(w1, 0, 9)}, 12).scores.at(0));
  CHECK_THROWS_AS(dl.local({b}), Error);

  // Separate parameter stores.
  for (const auto& [n, t] : dg.params().entries()) CHECK(n.rfind("dg.", 0) == 0);
  for (const auto& [n, t] : dl.params().entries()) CHECK(n.rfind("dl.", 0) == 0);
  CHECK(dg.params().hash() != dl.params().hash());
}

TEST_CASE("style extractor") {
  Rng rng(10);
  std::mt19937_64 data(10);
  StyleExtractor fs(tiny(), rng);
  const Tensor w = random_tensor(12, 6, data);
  const Tensor e = fs({w, w});
  CHECK(e.shape() == nn::Shape{2, 5});
  CHECK(e.values() == fs({w, w}).values());

  ModelConfig full = ModelConfig::full_scale();
  full.resnet_width = 8;  // Keep the width small; the embedding size is what matters.
  StyleExtractor big(full, rng);
  CHECK(big({random_tensor(96, 80, data)}).shape() == nn::Shape{1, 512});
}

TEST_CASE("normalization statistics use voiced pitch only") {
  const auto ex = make_example({1, 1, 1, 1}, {0, 0, 1, 1});
  const NormStats s = NormStats::fit({ex});
  double mean = 0;
  int n = 0;
  for (float p : ex.pitch_ph) {
    if (p > 0) {
      mean += p;
      ++n;
    }
  }
  CHECK(s.pitch.mean == doctest::Approx(mean / n));
  CHECK(s.pitch.normalize(s.pitch.denormalize(0.7)) == doctest::Approx(0.7));
  CHECK(s.pitch.bucket(s.pitch.min - 5, 8) == 0);
  CHECK(s.pitch.bucket(s.pitch.max + 5, 8) == 7);
}

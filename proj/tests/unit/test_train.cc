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

#include <fstream>
#include <sstream>

#include "fixtures.h"
#include "rptts/common/error.h"
#include "rptts/corpus/prepare.h"
#include "rptts/corpus/toy.h"
#include "rptts/nn/checkpoint_io.h"
#include "rptts/train/trainer.h"

using namespace rptts;
using namespace rptts::train;
using rptts::testing::TempDir;

namespace {

const std::vector<corpus::TrainingExample>& toy_examples() {
  static const std::vector<corpus::TrainingExample> examples = [] {
    TempDir dir("train_toy");
    const auto paths = corpus::write_toy_corpus(dir.path(), corpus::generate_toy_corpus(4, 2, 7));
    return corpus::prepare_corpus(paths.audio_dir, paths.alignment, {}).examples;
  }();
  return examples;
}

TrainConfig tiny(long long phase1, long long phase2) {
  TrainConfig c = TrainConfig::desk();
  c.phase1_steps = phase1;
  c.phase2_steps = phase2;
  c.batch_size = 2;
  c.checkpoint_every = 0;
  auto& m = c.model;
  m.d = 16;
  m.enc_blocks = m.dec_blocks = 1;
  m.d_k = m.d_v = 8;
  m.ffn_filter = 16;
  m.ffn_kernel = 3;
  m.predictor_filter = 16;
  m.n_bins = 16;
  m.window_len = 24;
  m.window_hop = 12;
  m.d_style = 8;
  m.resnet_width = 4;
  m.resnet_groups = 2;
  return c;
}

LoopOptions loop(std::filesystem::path out = {}, long long stop_after = -1) {
  LoopOptions o;
  o.out_dir = std::move(out);
  o.stop_after = stop_after;
  return o;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> csv_rows(const std::vector<StepMetrics>& ms) {
  std::vector<std::string> rows;
  for (auto m : ms) {
    m.wall_ms = 0;
    rows.push_back(metrics_csv_row(m));
  }
  return rows;
}

}  // namespace

TEST_CASE("config presets and key-value round trip") {
  const TrainConfig p = TrainConfig::full_scale();
  CHECK(p.phase1_steps == 75000);
  CHECK(p.phase2_steps == 125000);
  CHECK(p.batch_size == 16);
  CHECK(nn::lr_at(p.generator_lr, 80000) == doctest::Approx(0.01875).epsilon(1e-15));
  const TrainConfig d = TrainConfig::desk();
  CHECK(d.total_steps() <= 2000);
  CHECK(d.model.d == 64);
  CHECK(d.batch_size == 4);

  const TrainConfig back = TrainConfig::from_kv(KvConfig::parse(d.to_kv().to_text()),
                                                TrainConfig::full_scale());
  CHECK(back.to_kv().to_text() == d.to_kv().to_text());
  KvConfig unknown = d.to_kv();
  unknown.set("train.no_such_key", "1");
  CHECK_THROWS_AS(TrainConfig::from_kv(unknown, d), Error);
  TrainConfig bad = d;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("phases flip after phase1 steps and the loop runs exactly the total") {
  TrainState s = init_state(tiny(10, 10), toy_examples());
  const auto ms = train_loop(s, toy_examples(), {});
  REQUIRE(ms.size() == 20);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(ms[i].step == static_cast<long long>(i) + 1);
    CHECK(ms[i].phase == (i < 10 ? 1 : 2));
    CHECK(std::isfinite(ms[i].total));
    CHECK(std::isfinite(ms[i].grad_norm));
  }
  CHECK(ms[15].adv_global != 0.0);
  CHECK(ms[5].adv_global == 0.0);
}

TEST_CASE("phase-one steps leave the critics untouched") {
  TrainState s = init_state(tiny(5, 5), toy_examples());
  const auto dg = s.models->dg.params().hash(), dl = s.models->dl.params().hash(),
             fs = s.models->fs.params().hash(), g = s.models->g.params().hash();
  train_loop(s, toy_examples(), loop({}, 5));
  CHECK(s.models->dg.params().hash() == dg);
  CHECK(s.models->dl.params().hash() == dl);
  CHECK(s.models->fs.params().hash() == fs);
  CHECK(s.models->g.params().hash() != g);
}

TEST_CASE("each sub-step changes only its own network") {
  TrainState s = init_state(tiny(1, 6), toy_examples());
  train_loop(s, toy_examples(), loop({}, 1));
  for (int t = 0; t < 5; ++t) {
    std::vector<SubStepHashes> hashes;
    train_step(s, toy_examples(), draw_batch(s, static_cast<int>(toy_examples().size())),
               &hashes);
    REQUIRE(hashes.size() == 4);
    const std::vector<std::string> order = {"g", "dg", "dl", "fs"};
    for (const auto& h : hashes) {
      for (int k = 0; k < 4; ++k) {
        INFO(h.name << " vs " << order[k]);
        if (order[k] == h.name) CHECK(h.before[k] != h.after[k]);
        else CHECK(h.before[k] == h.after[k]);
      }
    }
  }
}

TEST_CASE("seeded runs repeat exactly") {
  TrainState a = init_state(tiny(30, 20), toy_examples());
  TrainState b = init_state(tiny(30, 20), toy_examples());
  CHECK(csv_rows(train_loop(a, toy_examples(), {})) == csv_rows(train_loop(b, toy_examples(), {})));
  CHECK(a.models->g.params().hash() == b.models->g.params().hash());
  TrainConfig other = tiny(30, 20);
  other.seed = 2;
  TrainState c = init_state(other, toy_examples());
  CHECK(c.models->g.params().hash() != b.models->g.params().hash());
}

TEST_CASE("resume from a checkpoint matches the uninterrupted run") {
  TempDir dir("resume");
  TrainConfig cfg = tiny(6, 8);
  cfg.checkpoint_every = 10;
  TrainState full = init_state(cfg, toy_examples());
  const auto full_rows = csv_rows(train_loop(full, toy_examples(), loop(dir.path() / "a")));

  TrainState first = init_state(cfg, toy_examples());
  train_loop(first, toy_examples(), loop(dir.path() / "b", 10));
  TrainState resumed = load_checkpoint(checkpoint_path(dir.path() / "a", 10), cfg);
  CHECK(resumed.step == 10);
  const auto tail = csv_rows(train_loop(resumed, toy_examples(), loop(dir.path() / "c")));
  REQUIRE(tail.size() == 4);
  CHECK(std::vector<std::string>(full_rows.begin() + 10, full_rows.end()) == tail);
  CHECK(read_file(dir.path() / "a" / "final.bin") == read_file(dir.path() / "c" / "final.bin"));
  CHECK(read_file(checkpoint_path(dir.path() / "a", 10)) ==
        read_file(checkpoint_path(dir.path() / "b", 10)));
}

TEST_CASE("checkpoint round trip and failures") {
  TempDir dir("ckpt");
  TrainState s = init_state(tiny(3, 3), toy_examples());
  train_loop(s, toy_examples(), loop({}, 4));
  save_checkpoint(s, dir.path() / "s.bin");
  TrainState back = load_checkpoint(dir.path() / "s.bin");
  CHECK(back.step == 4);
  CHECK(back.models->g.params().hash() == s.models->g.params().hash());
  CHECK(back.models->fs.params().hash() == s.models->fs.params().hash());
  CHECK(back.adam_g.steps() == s.adam_g.steps());
  CHECK(rng_state(back.rng) == rng_state(s.rng));
  CHECK(back.config.to_kv().to_text() == s.config.to_kv().to_text());
  save_checkpoint(back, dir.path() / "again.bin");
  CHECK(read_file(dir.path() / "s.bin") == read_file(dir.path() / "again.bin"));

  TrainConfig other = tiny(3, 3);
  other.model.d = 32;
  try {
    load_checkpoint(dir.path() / "s.bin", other);
    FAIL("mismatched model accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigMismatch);
  }
  TrainConfig longer = tiny(3, 9);
  CHECK(load_checkpoint(dir.path() / "s.bin", longer).config.phase2_steps == 9);

  std::filesystem::resize_file(dir.path() / "s.bin",
                               std::filesystem::file_size(dir.path() / "s.bin") / 2);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "s.bin"), Error);
}

TEST_CASE("reconstruction loss falls when overfitting one utterance") {
  std::vector<corpus::TrainingExample> one = {toy_examples().front()};
  TrainConfig cfg = tiny(200, 0);
  cfg.batch_size = 1;
  TrainState s = init_state(cfg, one);
  const auto ms = train_loop(s, one, {});
  REQUIRE(ms.size() == 200);
  CHECK(ms.back().rec < ms.front().rec);
}

TEST_CASE("metrics csv has one row per step") {
  TempDir dir("csv");
  TrainState s = init_state(tiny(4, 2), toy_examples());
  train_loop(s, toy_examples(), loop(dir.path()));
  std::ifstream in(dir.path() / "metrics.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == metrics_csv_header());
  CHECK(lines[0].rfind("step,phase,", 0) == 0);
  CHECK(lines[0].find("wall_ms") != std::string::npos);
  CHECK(std::filesystem::exists(dir.path() / "final.bin"));
}

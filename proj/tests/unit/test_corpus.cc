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
#include <map>
#include <set>

#include "fixtures.h"
#include "rptts/common/error.h"
#include "rptts/common/rng.h"
#include "rptts/corpus/phonemes.h"
#include "rptts/corpus/prepare.h"
#include "rptts/corpus/store.h"
#include "rptts/corpus/toy.h"

using namespace rptts;
using namespace rptts::corpus;
using rptts::testing::make_example;
using rptts::testing::one_phone_words;
using rptts::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidInput;
}

}  // namespace

TEST_CASE("phoneme inventory is dense with PAD first") {
  const auto& inv = PhonemeInventory::standard();
  CHECK(inv.symbol(PhonemeInventory::kPad) == "<pad>");
  for (int i = 0; i < inv.size(); ++i) CHECK(inv.id(inv.symbol(i)) == i);
  CHECK(inv.find("sil").has_value());
  CHECK(inv.parse("AH0 sil") == std::vector<int>{inv.id("AH0"), inv.silence_id()});
  CHECK(code_of([&] { inv.parse("not-a-phone"); }) == ErrorCode::kUnknownPhoneme);
  for (int i = 0; i < kNumToyPhonemes; ++i) CHECK(inv.find(PhonemeInventory::toy_symbol(i)));
}

TEST_CASE("alignment seconds round to frames") {
  TempDir dir("align");
  const auto& inv = PhonemeInventory::standard();
  write_text(dir.path() / "a.jsonl",
             R"({"id":"u","words":[{"w":"hi","phones":[{"p":"HH","start_s":0.0,"end_s":0.1},)"
             R"({"p":"AY1","start_s":0.1,"end_s":0.2}]}]})"
             "\n");
  const auto utts = load_alignment(dir.path() / "a.jsonl", inv);
  REQUIRE(utts.size() == 1);
  REQUIRE(utts[0].entries.size() == 2);
  CHECK(utts[0].entries[0].start_frame == 0);
  CHECK(utts[0].entries[0].end_frame == 9);
  CHECK(utts[0].entries[1].start_frame == 9);
  CHECK(utts[0].entries[1].end_frame == 17);

  write_text(dir.path() / "empty.jsonl", "");
  CHECK(code_of([&] { load_alignment(dir.path() / "empty.jsonl", inv); }) ==
        ErrorCode::kCorruptAlignment);
}

TEST_CASE("alignment gaps become silence") {
  TempDir dir("align_gap");
  const auto& inv = PhonemeInventory::standard();
  write_text(dir.path() / "a.jsonl",
             R"({"id":"g","words":[{"w":"a","phones":[{"p":"AA1","start_s":0.05,"end_s":0.1}]},)"
             R"({"w":"b","phones":[{"p":"B","start_s":0.3,"end_s":0.4}]}]})"
             "\n");
  const auto utts = load_alignment(dir.path() / "a.jsonl", inv);
  const auto& e = utts.at(0).entries;
  REQUIRE(e.size() == 4);
  CHECK(e[0].phoneme_id == inv.silence_id());
  CHECK(e[0].word_index == kNoWord);
  CHECK(e[2].phoneme_id == inv.silence_id());
  CHECK_NOTHROW(validate_alignment(e, "g"));
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i].start_frame == e[i - 1].end_frame);
  CHECK(e.front().start_frame == 0);
}

TEST_CASE("variance targets per phoneme") {
  std::vector<AlignmentEntry> align = {{5, 0, 3, 0}, {6, 3, 9, 0}, {7, 9, 17, 1}};
  dsp::PitchTrack pitch;
  pitch.values = {100, 0, 110, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  dsp::EnergyTrack energy;
  energy.values = {1, 2, 3, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  const auto t = phoneme_variance_targets(align, pitch, energy);
  CHECK(t.durations == std::vector<int>{3, 6, 8});
  CHECK(t.pitch_ph[0] == doctest::Approx(105.0));
  CHECK(t.pitch_ph[1] == 0.0f);
  CHECK(t.energy_ph[0] == doctest::Approx(2.0));

  align = {{5, 0, 9, 0}, {6, 9, 17, 0}};
  pitch.values.resize(17);
  energy.values.resize(17);
  CHECK(phoneme_variance_targets(align, pitch, energy).durations == std::vector<int>{9, 8});
}

TEST_CASE("segment spec partitions phonemes and frames") {
  const TrainingExample ex = make_example({2, 3, 1, 4, 2}, {kNoWord, 0, 0, 1, 2});
  const SegmentSpec s = make_segment_spec(ex, {1, 3}, {0, 1});
  CHECK(s.phones_b == Range{0, 1});
  CHECK(s.phones_i == Range{1, 3});
  CHECK(s.phones_a == Range{3, 5});
  CHECK(s.frames_b == Range{0, 2});
  CHECK(s.frames_i == Range{2, 6});
  CHECK(s.frames_a == Range{6, 12});

  const TrainingExample first = one_phone_words(4);
  const SegmentSpec f = make_segment_spec(first, {0, 1}, {0, 1});
  CHECK(f.frames_b.empty());
  CHECK(!f.frames_a.empty());
  CHECK(f.frames_b.size() + f.frames_i.size() + f.frames_a.size() == first.num_frames());
}

TEST_CASE("segmentation never consumes every frame") {
  // Three words, no silence: w = 3 would leave no context.
  const TrainingExample ex = one_phone_words(3);
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    const SegmentSpec s = sample_segmentation(ex, rng);
    CHECK(s.words_i.size() <= 2);
    CHECK(s.num_context_frames() > 0);
  }
  const TrainingExample single = one_phone_words(1);
  CHECK(code_of([&] { sample_segmentation(single, rng); }) == ErrorCode::kNoContextAvailable);
}

TEST_CASE("segmentation covers every width and start") {
  const TrainingExample ex = one_phone_words(12);
  Rng rng(9);
  std::set<int> widths;
  std::map<int, std::set<int>> starts;
  for (int t = 0; t < 10000; ++t) {
    const SegmentSpec s = sample_segmentation(ex, rng);
    widths.insert(s.words_i.size());
    starts[s.words_i.size()].insert(s.words_i.begin);
    CHECK(s.phones_i.size() == s.words_i.size());
  }
  CHECK(widths == std::set<int>{1, 2, 3, 4, 5, 6, 7});
  for (int w = 1; w <= 7; ++w) CHECK(static_cast<int>(starts[w].size()) == 12 - w + 1);
}

TEST_CASE("apply segmentation keeps context and partitions the mel") {
  std::vector<int> durations(10, 10), words(10);
  std::iota(words.begin(), words.end(), 0);
  const TrainingExample ex = make_example(durations, words);
  const SegmentSpec s = make_segment_spec(ex, {4, 6}, {4, 6});
  REQUIRE(s.frames_i == Range{40, 60});
  const ModelInput in = apply_segmentation(ex, s);
  CHECK(in.x_in.rows() == 80);
  MatrixF joined(ex.num_frames(), ex.mel.cols());
  joined << slice_rows(ex.mel, s.frames_b), slice_rows(ex.mel, s.frames_i),
      slice_rows(ex.mel, s.frames_a);
  CHECK(joined == ex.mel);
  CHECK(in.x_in.topRows(40) == ex.mel.topRows(40));
  CHECK(in.x_in.bottomRows(40) == ex.mel.bottomRows(40));
  CHECK(in.phoneme_segments[4] == Segment::kInsert);
  CHECK(in.audio_segments.front() == Segment::kBefore);
  CHECK(in.audio_segments.back() == Segment::kAfter);
}

TEST_CASE("replacement builds the model input around the chosen words") {
  const TrainingExample ex = make_example({2, 3, 1, 4, 2}, {kNoWord, 0, 0, 1, 2});
  const Replacement r = make_replacement(ex, 1, 2, {7, 8, 9});
  CHECK(r.original.phones_i == Range{3, 4});
  CHECK(r.original.words_i == Range{1, 2});
  CHECK(r.input.phonemes.size() == 7);
  CHECK(r.input.x_in.rows() == ex.num_frames() - 4);
  const auto count = [&](Segment s) {
    return std::count(r.input.phoneme_segments.begin(), r.input.phoneme_segments.end(), s);
  };
  CHECK(count(Segment::kBefore) == 3);
  CHECK(count(Segment::kInsert) == 3);
  CHECK(count(Segment::kAfter) == 1);

  const Replacement ins = make_replacement(ex, 1, 1, {7});
  CHECK(ins.original.frames_i.empty());
  CHECK(ins.input.x_in.rows() == ex.num_frames());
  const Replacement del = make_replacement(ex, 0, 1, {});
  CHECK(del.input.phonemes.size() == 3);
  CHECK(code_of([&] { make_replacement(ex, 2, 5, {}); }) == ErrorCode::kInvalidInput);
  const TrainingExample single = one_phone_words(1);
  CHECK(code_of([&] { make_replacement(single, 0, 1, {7}); }) ==
        ErrorCode::kNoContextAvailable);
}

TEST_CASE("example validation names the utterance") {
  TrainingExample ex = make_example({2, 3}, {0, 1}, 1, 80, "bad_one");
  CHECK_NOTHROW(validate_example(ex));
  ex.durations[1] = 4;
  try {
    validate_example(ex);
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
    CHECK(std::string(e.what()).find("bad_one") != std::string::npos);
  }
}

TEST_CASE("toy corpus is deterministic and round-trips its alignment") {
  const auto a = generate_toy_corpus(8, 4, 7);
  const auto b = generate_toy_corpus(8, 4, 7);
  REQUIRE(a.size() == 8);
  std::set<int> speakers;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].wave.samples == b[i].wave.samples);
    CHECK(a[i].alignment.entries == b[i].alignment.entries);
    const double seconds = static_cast<double>(a[i].wave.samples.size()) / dsp::kSampleRate;
    CHECK(seconds >= 1.0);
    CHECK(seconds <= 4.0);
    speakers.insert(a[i].speaker);
  }
  CHECK(speakers.size() == 4);
  CHECK(generate_toy_corpus(8, 4, 8)[0].wave.samples != a[0].wave.samples);

  TempDir dir("toy");
  const auto paths = write_toy_corpus(dir.path(), a);
  const auto loaded = load_alignment(paths.alignment, PhonemeInventory::standard());
  REQUIRE(loaded.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(loaded[i].id == a[i].id);
    CHECK(loaded[i].entries == a[i].alignment.entries);
  }
}

TEST_CASE("prepare builds valid examples and rejects an empty audio dir") {
  TempDir dir("prepare");
  const auto utts = generate_toy_corpus(3, 2, 7);
  const auto paths = write_toy_corpus(dir.path(), utts);
  PrepareReport report;
  const FeatureStore store = prepare_corpus(paths.audio_dir, paths.alignment, {}, &report);
  CHECK(report.valid() == 3);
  REQUIRE(store.examples.size() == 3);
  for (const auto& ex : store.examples) {
    CHECK_NOTHROW(validate_example(ex));
    CHECK(std::accumulate(ex.durations.begin(), ex.durations.end(), 0) == ex.num_frames());
    REQUIRE(ex.segmentation.has_value());
    CHECK(ex.segmentation->num_context_frames() > 0);
    CHECK(!ex.waveform.empty());
  }
  // Frozen splits depend only on the utterance.
  const FeatureStore again = prepare_corpus(paths.audio_dir, paths.alignment, {});
  CHECK(again.examples[1].segmentation == store.examples[1].segmentation);

  std::filesystem::create_directories(dir.path() / "none");
  CHECK(code_of([&] { prepare_corpus(dir.path() / "none", paths.alignment, {}); }) ==
        ErrorCode::kInvalidInput);
}

TEST_CASE("feature store round trip and corruption") {
  TempDir dir("store");
  FeatureStore store;
  store.examples.push_back(make_example({2, 3}, {0, 1}, 1, 80, "a"));
  store.examples.push_back(make_example({1, 1, 4}, {kNoWord, 0, 1}, 2, 80, "b"));
  store.examples.push_back(make_example({5}, {0}, 3, 80, "c"));
  store.examples[1].segmentation = make_segment_spec(store.examples[1], {1, 2}, {0, 1});
  store.examples[2].waveform = {0.1f, -0.2f, 0.3f};
  write_store(dir.path() / "s.bin", store);
  const FeatureStore back = read_store(dir.path() / "s.bin");
  REQUIRE(back.examples.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& x = store.examples[i];
    const auto& y = back.examples[i];
    CHECK(x.id == y.id);
    CHECK(x.phonemes == y.phonemes);
    CHECK(x.mel == y.mel);
    CHECK(x.durations == y.durations);
    CHECK(x.pitch_ph == y.pitch_ph);
    CHECK(x.energy_ph == y.energy_ph);
    CHECK(x.word_index == y.word_index);
    CHECK(x.segmentation == y.segmentation);
    CHECK(x.waveform == y.waveform);
  }
  CHECK(back.find("b") != nullptr);
  CHECK(back.find("zzz") == nullptr);

  write_store(dir.path() / "empty.bin", FeatureStore{});
  CHECK(read_store(dir.path() / "empty.bin").examples.empty());

  const auto size = std::filesystem::file_size(dir.path() / "s.bin");
  std::filesystem::resize_file(dir.path() / "s.bin", size - 7);
  CHECK(code_of([&] { read_store(dir.path() / "s.bin"); }) == ErrorCode::kCorruptStore);
  write_text(dir.path() / "junk.bin", "NOPE!");
  CHECK(code_of([&] { read_store(dir.path() / "junk.bin"); }) ==
        ErrorCode::kStoreVersionMismatch);
}

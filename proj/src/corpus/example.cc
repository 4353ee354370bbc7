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

#include "rptts/corpus/example.h"

#include <algorithm>

#include "rptts/common/error.h"

namespace rptts::corpus {
namespace {

[[noreturn]] void invalid(const TrainingExample& ex, const std::string& what) {
  fail(ErrorCode::kInvalidInput, "utterance '" + ex.id + "': " + what);
}

// Frame offset of phoneme k (prefix sum of durations).
std::vector<int> frame_offsets(const TrainingExample& ex) {
  std::vector<int> off(ex.durations.size() + 1, 0);
  for (std::size_t k = 0; k < ex.durations.size(); ++k) off[k + 1] = off[k] + ex.durations[k];
  return off;
}

}  // namespace

std::vector<int> TrainingExample::words() const {
  std::vector<int> out;
  for (int w : word_index) {
    if (w == kNoWord) continue;
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
  return out;
}

void validate_example(const TrainingExample& ex) {
  const std::size_t k = ex.phonemes.size();
  if (k == 0) invalid(ex, "no phonemes");
  if (ex.durations.size() != k || ex.pitch_ph.size() != k || ex.energy_ph.size() != k ||
      ex.word_index.size() != k) {
    invalid(ex, "per-phoneme arrays disagree in length");
  }
  long long total = 0;
  for (int d : ex.durations) {
    if (d < 1) invalid(ex, "duration < 1");
    total += d;
  }
  if (total != ex.mel.rows()) {
    invalid(ex, "durations sum to " + std::to_string(total) + " but mel has " +
                    std::to_string(ex.mel.rows()) + " frames");
  }
}

VarianceTargets phoneme_variance_targets(const std::vector<AlignmentEntry>& align,
                                         const dsp::PitchTrack& pitch,
                                         const dsp::EnergyTrack& energy) {
  VarianceTargets t;
  for (const auto& e : align) {
    if (e.end_frame > static_cast<int>(pitch.values.size()) ||
        e.end_frame > static_cast<int>(energy.values.size())) {
      fail(ErrorCode::kInvalidInput, "pitch/energy tracks shorter than the alignment");
    }
    double f0_sum = 0.0, e_sum = 0.0;
    int voiced = 0;
    for (int f = e.start_frame; f < e.end_frame; ++f) {
      if (pitch.values[f] > 0.0) {
        f0_sum += pitch.values[f];
        ++voiced;
      }
      e_sum += energy.values[f];
    }
    t.durations.push_back(e.frames());
    t.pitch_ph.push_back(voiced > 0 ? static_cast<float>(f0_sum / voiced) : 0.0f);
    t.energy_ph.push_back(static_cast<float>(e_sum / e.frames()));
  }
  return t;
}

SegmentSpec make_segment_spec(const TrainingExample& ex, Range phones_i, Range words_i) {
  const int k = ex.num_phonemes();
  if (phones_i.begin < 0 || phones_i.end > k || phones_i.begin > phones_i.end) {
    fail(ErrorCode::kInvalidInput, "insertion phoneme range out of bounds");
  }
  const auto off = frame_offsets(ex);
  SegmentSpec s;
  s.phones_b = {0, phones_i.begin};
  s.phones_i = phones_i;
  s.phones_a = {phones_i.end, k};
  s.frames_b = {0, off[phones_i.begin]};
  s.frames_i = {off[phones_i.begin], off[phones_i.end]};
  s.frames_a = {off[phones_i.end], off[k]};
  s.words_i = words_i;
  return s;
}

Range phonemes_of_words(const TrainingExample& ex, int first_word, int last_word) {
  int begin = -1, end = -1;
  for (int k = 0; k < ex.num_phonemes(); ++k) {
    const int w = ex.word_index[k];
    if (w == first_word && begin < 0) begin = k;
    if (w == last_word) end = k + 1;
  }
  if (begin < 0 || end < 0 || end <= begin) {
    fail(ErrorCode::kInvalidInput, "word range not present in '" + ex.id + "'");
  }
  return {begin, end};
}

SegmentSpec sample_segmentation(const TrainingExample& ex, Rng& rng, int max_words) {
  const auto words = ex.words();
  const int n_words = static_cast<int>(words.size());
  if (n_words == 0) fail(ErrorCode::kNoContextAvailable, "'" + ex.id + "' has no words");
  const int w_max = std::min(max_words, n_words);

  auto spec_for = [&](int w, int start) {
    const Range ph = phonemes_of_words(ex, words[start], words[start + w - 1]);
    return make_segment_spec(ex, ph, {words[start], words[start + w - 1] + 1});
  };

  bool feasible = false;
  for (int w = 1; w <= w_max && !feasible; ++w) {
    for (int s = 0; s + w <= n_words && !feasible; ++s) {
      feasible = spec_for(w, s).num_context_frames() > 0;
    }
  }
  if (!feasible) {
    fail(ErrorCode::kNoContextAvailable, "'" + ex.id + "' leaves no audio context");
  }

  for (;;) {
    const int w = std::uniform_int_distribution<int>(1, w_max)(rng);
    const int s = std::uniform_int_distribution<int>(0, n_words - w)(rng);
    SegmentSpec spec = spec_for(w, s);
    if (spec.num_context_frames() > 0) return spec;
  }
}

MatrixF slice_rows(const MatrixF& m, Range r) {
  return m.middleRows(r.begin, r.size());
}

ModelInput apply_segmentation(const TrainingExample& ex, const SegmentSpec& spec) {
  ModelInput in;
  const int lb = spec.frames_b.size(), la = spec.frames_a.size();
  in.x_in.resize(lb + la, ex.mel.cols());
  if (lb > 0) in.x_in.topRows(lb) = ex.mel.middleRows(spec.frames_b.begin, lb);
  if (la > 0) in.x_in.bottomRows(la) = ex.mel.middleRows(spec.frames_a.begin, la);
  in.audio_segments.assign(lb, Segment::kBefore);
  in.audio_segments.insert(in.audio_segments.end(), la, Segment::kAfter);
  in.phonemes = ex.phonemes;
  in.phoneme_segments.resize(ex.phonemes.size());
  for (int k = 0; k < ex.num_phonemes(); ++k) {
    in.phoneme_segments[k] = spec.phones_i.contains(k)   ? Segment::kInsert
                             : k < spec.phones_i.begin ? Segment::kBefore
                                                       : Segment::kAfter;
  }
  return in;
}

Replacement make_replacement(const TrainingExample& ex, int word_begin, int word_end,
                             const std::vector<int>& phonemes) {
  const auto words = ex.words();
  const int n_words = static_cast<int>(words.size());
  if (word_begin < 0 || word_end < word_begin || word_end > n_words) {
    fail(ErrorCode::kInvalidInput, "word range [" + std::to_string(word_begin) + ", " +
                                       std::to_string(word_end) + ") outside 0.." +
                                       std::to_string(n_words) + " of '" + ex.id + "'");
  }
  int p_begin = ex.num_phonemes();
  if (word_begin < n_words) p_begin = phonemes_of_words(ex, words[word_begin], words[word_begin]).begin;
  int p_end = p_begin;
  if (word_end > word_begin) p_end = phonemes_of_words(ex, words[word_end - 1], words[word_end - 1]).end;

  // Alignment word indices of the replaced span.
  int w_begin = n_words == 0 ? 0 : words.back() + 1;
  if (word_begin < n_words) w_begin = words[word_begin];
  const int w_end = word_end > word_begin ? words[word_end - 1] + 1 : w_begin;

  Replacement r;
  r.original = make_segment_spec(ex, {p_begin, p_end}, {w_begin, w_end});
  if (r.original.num_context_frames() == 0) {
    fail(ErrorCode::kNoContextAvailable, "replacing every frame of '" + ex.id + "'");
  }
  ModelInput base = apply_segmentation(ex, r.original);
  r.input.x_in = std::move(base.x_in);
  r.input.audio_segments = std::move(base.audio_segments);
  auto& ph = r.input.phonemes;
  auto& seg = r.input.phoneme_segments;
  ph.assign(ex.phonemes.begin(), ex.phonemes.begin() + p_begin);
  seg.assign(p_begin, Segment::kBefore);
  ph.insert(ph.end(), phonemes.begin(), phonemes.end());
  seg.insert(seg.end(), phonemes.size(), Segment::kInsert);
  ph.insert(ph.end(), ex.phonemes.begin() + p_end, ex.phonemes.end());
  seg.insert(seg.end(), ex.phonemes.size() - p_end, Segment::kAfter);
  return r;
}

MatrixF to_float(const dsp::MatrixD& m) { return m.cast<float>(); }
dsp::MatrixD to_double(const MatrixF& m) { return m.cast<double>(); }

}  // namespace rptts::corpus

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

#ifndef RPTTS_CORPUS_EXAMPLE_H_
#define RPTTS_CORPUS_EXAMPLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rptts/common/rng.h"
#include "rptts/corpus/alignment.h"
#include "rptts/dsp/types.h"

namespace rptts::corpus {

using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kMaxInsertWords = 7;

// Half-open index interval.
struct Range {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(int i) const { return i >= begin && i < end; }
  bool operator==(const Range&) const = default;
};

enum class Segment : std::uint8_t { kBefore = 0, kInsert = 1, kAfter = 2 };

struct SegmentSpec {
  Range phones_b, phones_i, phones_a;
  Range frames_b, frames_i, frames_a;
  // Word range covered by I (word indices as in the alignment).
  Range words_i;

  int num_context_frames() const { return frames_b.size() + frames_a.size(); }
  bool operator==(const SegmentSpec&) const = default;
};

struct TrainingExample {
  std::string id;
  std::vector<int> phonemes;       // K
  MatrixF mel;                     // L x 80
  std::vector<int> durations;      // K, sum = L
  std::vector<float> pitch_ph;     // K, Hz (0 if unvoiced)
  std::vector<float> energy_ph;    // K
  std::vector<int> word_index;     // K, kNoWord for silences
  std::optional<SegmentSpec> segmentation;  // frozen split for evaluation
  std::vector<float> waveform;     // optional ground-truth audio at 22050 Hz

  int num_phonemes() const { return static_cast<int>(phonemes.size()); }
  int num_frames() const { return static_cast<int>(mel.rows()); }
  // Distinct word indices in order of appearance.
  std::vector<int> words() const;
};

// Throws InvalidInput naming the utterance when sizes disagree, a duration is
// < 1, or the durations do not sum to the mel length.
void validate_example(const TrainingExample& ex);

struct VarianceTargets {
  std::vector<int> durations;
  std::vector<float> pitch_ph;
  std::vector<float> energy_ph;
};

// Per-phoneme duration, mean voiced F0 (0 when the span is fully unvoiced)
// and mean energy.
VarianceTargets phoneme_variance_targets(const std::vector<AlignmentEntry>& align,
                                         const dsp::PitchTrack& pitch,
                                         const dsp::EnergyTrack& energy);

// Builds the spec for an insertion span over phonemes [i.begin, i.end).
SegmentSpec make_segment_spec(const TrainingExample& ex, Range phones_i, Range words_i = {});

// Phoneme span [first phone of word words[s], last phone of word words[s+w-1]].
Range phonemes_of_words(const TrainingExample& ex, int first_word, int last_word);

// Draws w ~ U{1..min(max_words, W)} and a start word uniformly, redrawing both
// until B and A together keep at least one frame. Throws NoContextAvailable if
// no choice leaves context.
SegmentSpec sample_segmentation(const TrainingExample& ex, Rng& rng,
                                int max_words = kMaxInsertWords);

// Everything the generator consumes for one example.
struct ModelInput {
  MatrixF x_in;                              // (L_B + L_A) x 80
  std::vector<Segment> audio_segments;       // kBefore / kAfter per x_in row
  std::vector<int> phonemes;                 // K
  std::vector<Segment> phoneme_segments;     // K
};

ModelInput apply_segmentation(const TrainingExample& ex, const SegmentSpec& spec);

struct Replacement {
  ModelInput input;
  // Split of the original utterance: I is the replaced span.
  SegmentSpec original;
};

// Replaces words [word_begin, word_end) (positions in ex.words()) with
// `phonemes`. word_begin == word_end inserts before that word; empty
// `phonemes` deletes. Throws InvalidInput for a bad word range and
// NoContextAvailable when no audio context remains.
Replacement make_replacement(const TrainingExample& ex, int word_begin, int word_end,
                             const std::vector<int>& phonemes);

// Copies rows [r.begin, r.end) of `m`.
MatrixF slice_rows(const MatrixF& m, Range r);

MatrixF to_float(const dsp::MatrixD& m);
dsp::MatrixD to_double(const MatrixF& m);

}  // namespace rptts::corpus

#endif  // RPTTS_CORPUS_EXAMPLE_H_

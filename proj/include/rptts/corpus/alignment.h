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

// Forced-alignment interchange. One utterance per JSON line:
//
//   {"id": "...", "end_s": 2.4,
//    "words": [{"w": "word", "phones": [{"p": "AH0", "start_s": 0.0, "end_s": 0.1}]}]}
//
// Times convert to mel frames as round(t * 22050 / 256) with ties to even.
// Gaps between phones (and before the first phone) become explicit silence
// entries so the frame spans are contiguous. The optional top-level "end_s"
// marks the end of the audio; frames after the last phone become silence.

#ifndef RPTTS_CORPUS_ALIGNMENT_H_
#define RPTTS_CORPUS_ALIGNMENT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "rptts/corpus/phonemes.h"

namespace rptts::corpus {

inline constexpr int kNoWord = -1;

struct AlignmentEntry {
  int phoneme_id = 0;
  int start_frame = 0;  // inclusive
  int end_frame = 0;    // exclusive
  int word_index = kNoWord;

  int frames() const { return end_frame - start_frame; }
  bool operator==(const AlignmentEntry&) const = default;
};

struct UtteranceAlignment {
  std::string id;
  std::vector<std::string> words;
  std::vector<AlignmentEntry> entries;

  int num_frames() const { return entries.empty() ? 0 : entries.back().end_frame; }
};

int seconds_to_frame(double seconds, int sample_rate = 22050, int hop = 256);
double frame_to_seconds(int frame, int sample_rate = 22050, int hop = 256);

// Gaps between phones, and the tail up to an optional top-level "end_s",
// become silence entries.
// Throws CorruptAlignment for empty files, malformed lines, overlapping or
// inverted intervals and phones that round to zero frames; UnknownPhoneme for
// symbols missing from `inventory`.
std::vector<UtteranceAlignment> load_alignment(const std::filesystem::path& path,
                                               const PhonemeInventory& inventory);

// Writes word phones only; silence entries are implied by the gaps.
void write_alignment(const std::filesystem::path& path,
                     const std::vector<UtteranceAlignment>& utterances,
                     const PhonemeInventory& inventory);

// Throws CorruptAlignment unless spans start at 0, are non-empty and abut.
void validate_alignment(const std::vector<AlignmentEntry>& entries, const std::string& id);

// Makes the alignment end exactly at `num_frames`: pads with silence or
// truncates spans past the end (e.g. after trimming long audio).
std::vector<AlignmentEntry> fit_alignment_to_frames(std::vector<AlignmentEntry> entries,
                                                    int num_frames, int silence_id);

}  // namespace rptts::corpus

#endif  // RPTTS_CORPUS_ALIGNMENT_H_

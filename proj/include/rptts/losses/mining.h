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

// Window provenance and triplet mining for the style losses. Everything here
// works on indices only, so it is shared by both precisions.

#ifndef RPTTS_LOSSES_MINING_H_
#define RPTTS_LOSSES_MINING_H_

#include <vector>

namespace rptts::losses {

struct WindowSource {
  int example = 0;           // batch index of the utterance the window came from
  bool synthesized = false;  // cut from the generator output
  int offset = 0;            // first frame within its segment (may be negative when padded)

  bool operator==(const WindowSource&) const = default;
};

struct Triplet {
  int anchor = 0;
  int positive = 0;
  int negative = 0;

  bool operator==(const Triplet&) const = default;
};

// Start frames for windows of `len` frames every `hop` frames over a segment
// of `length` frames. A segment shorter than `len` gets one window at offset
// -((len - length) / 2): the segment is centered in a padded canvas, with the
// odd frame of padding after it.
std::vector<int> window_starts(int length, int len, int hop);

// Anchors are real windows, positives the other real windows of the same
// utterance, negatives real windows of other utterances and every synthesized
// window.
std::vector<Triplet> mine_triplets_style(const std::vector<WindowSource>& table);

// Anchors are synthesized windows, positives the real windows of the matching
// utterance, negatives any window of another utterance.
std::vector<Triplet> mine_triplets_generator(const std::vector<WindowSource>& table);

}  // namespace rptts::losses

#endif  // RPTTS_LOSSES_MINING_H_

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

#ifndef RPTTS_CORPUS_PHONEMES_H_
#define RPTTS_CORPUS_PHONEMES_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rptts::corpus {

inline constexpr std::string_view kSilenceSymbol = "sil";
inline constexpr int kNumToyPhonemes = 12;

// Dense phoneme ids 0..size-1 with PAD = 0 and UNK = 1.
class PhonemeInventory {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  // PAD, UNK, silence markers, ARPAbet (vowels with and without stress
  // digits) and the toy-corpus pseudo-phonemes "ph00".."ph11".
  static const PhonemeInventory& standard();

  // symbols[0] and symbols[1] are taken as PAD and UNK.
  explicit PhonemeInventory(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& symbol(int id) const;
  std::optional<int> find(std::string_view symbol) const;
  // Throws UnknownPhoneme.
  int id(std::string_view symbol) const;
  int silence_id() const { return id(kSilenceSymbol); }

  // Space-separated symbols -> ids; throws UnknownPhoneme.
  std::vector<int> parse(std::string_view text) const;

  static std::string toy_symbol(int index);

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace rptts::corpus

#endif  // RPTTS_CORPUS_PHONEMES_H_

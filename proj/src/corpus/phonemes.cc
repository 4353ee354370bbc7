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

#include "rptts/corpus/phonemes.h"

#include <cstdio>
#include <sstream>

#include "rptts/common/error.h"

namespace rptts::corpus {

const PhonemeInventory& PhonemeInventory::standard() {
  static const PhonemeInventory inventory = [] {
    std::vector<std::string> s = {"<pad>", "<unk>", std::string(kSilenceSymbol), "sp", "spn"};
    for (const char* c : {"B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
                          "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"}) {
      s.emplace_back(c);
    }
    for (const char* v : {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY",
                          "OW", "OY", "UH", "UW"}) {
      s.emplace_back(v);
      for (const char* stress : {"0", "1", "2"}) s.push_back(std::string(v) + stress);
    }
    for (int i = 0; i < kNumToyPhonemes; ++i) s.push_back(toy_symbol(i));
    return PhonemeInventory(std::move(s));
  }();
  return inventory;
}

PhonemeInventory::PhonemeInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) fail(ErrorCode::kInvalidInput, "inventory needs PAD and UNK");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!ids_.emplace(symbols_[i], static_cast<int>(i)).second) {
      fail(ErrorCode::kInvalidInput, "duplicate phoneme symbol '" + symbols_[i] + "'");
    }
  }
}

const std::string& PhonemeInventory::symbol(int id) const {
  if (id < 0 || id >= size()) {
    fail(ErrorCode::kUnknownPhoneme, "phoneme id " + std::to_string(id) + " out of range");
  }
  return symbols_[id];
}

std::optional<int> PhonemeInventory::find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int PhonemeInventory::id(std::string_view symbol) const {
  if (auto found = find(symbol)) return *found;
  fail(ErrorCode::kUnknownPhoneme, "unknown phoneme '" + std::string(symbol) + "'");
}

std::vector<int> PhonemeInventory::parse(std::string_view text) const {
  std::vector<int> ids;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) ids.push_back(id(token));
  return ids;
}

std::string PhonemeInventory::toy_symbol(int index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "ph%02d", index);
  return buf;
}

}  // namespace rptts::corpus

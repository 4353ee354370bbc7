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

#include "rptts/corpus/alignment.h"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rptts/common/error.h"

namespace rptts::corpus {
namespace {

using nlohmann::json;

[[noreturn]] void corrupt(const std::string& where, const std::string& what) {
  fail(ErrorCode::kCorruptAlignment, where + ": " + what);
}

UtteranceAlignment parse_line(const json& j, const PhonemeInventory& inventory,
                              const std::string& where) {
  UtteranceAlignment utt;
  if (!j.is_object() || !j.contains("id") || !j.contains("words") || !j["words"].is_array()) {
    corrupt(where, "expected {\"id\", \"words\"}");
  }
  utt.id = j["id"].get<std::string>();
  const int silence = inventory.silence_id();
  double prev_end_s = 0.0;
  int prev_end_frame = 0;
  for (const auto& word : j["words"]) {
    if (!word.contains("w") || !word.contains("phones") || !word["phones"].is_array()) {
      corrupt(where, "word entries need \"w\" and \"phones\"");
    }
    const int word_index = static_cast<int>(utt.words.size());
    utt.words.push_back(word["w"].get<std::string>());
    for (const auto& phone : word["phones"]) {
      if (!phone.contains("p") || !phone.contains("start_s") || !phone.contains("end_s")) {
        corrupt(where, "phone entries need \"p\", \"start_s\", \"end_s\"");
      }
      const auto symbol = phone["p"].get<std::string>();
      const double start_s = phone["start_s"].get<double>();
      const double end_s = phone["end_s"].get<double>();
      if (!(end_s > start_s) || start_s < 0.0) {
        corrupt(where, "phone '" + symbol + "' has an empty or inverted interval");
      }
      if (start_s < prev_end_s - 1e-9) {
        corrupt(where, "phone '" + symbol + "' overlaps the previous interval");
      }
      const int id = inventory.id(symbol);
      const int start = seconds_to_frame(start_s);
      const int end = seconds_to_frame(end_s);
      if (end <= start) corrupt(where, "phone '" + symbol + "' rounds to zero frames");
      if (start > prev_end_frame) {
        utt.entries.push_back({silence, prev_end_frame, start, kNoWord});
      }
      utt.entries.push_back({id, std::max(start, prev_end_frame), end, word_index});
      prev_end_s = end_s;
      prev_end_frame = end;
    }
  }
  if (utt.entries.empty()) corrupt(where, "utterance '" + utt.id + "' has no phones");
  if (j.contains("end_s")) {
    const int end = seconds_to_frame(j["end_s"].get<double>());
    if (end < prev_end_frame) corrupt(where, "\"end_s\" precedes the last phone");
    if (end > prev_end_frame) utt.entries.push_back({silence, prev_end_frame, end, kNoWord});
  }
  validate_alignment(utt.entries, utt.id);
  return utt;
}

}  // namespace

int seconds_to_frame(double seconds, int sample_rate, int hop) {
  // nearbyint under the default rounding mode breaks ties toward even.
  return static_cast<int>(std::nearbyint(seconds * sample_rate / hop));
}

double frame_to_seconds(int frame, int sample_rate, int hop) {
  return static_cast<double>(frame) * hop / sample_rate;
}

std::vector<UtteranceAlignment> load_alignment(const std::filesystem::path& path,
                                               const PhonemeInventory& inventory) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open alignment " + path.string());
  std::vector<UtteranceAlignment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      corrupt(where, e.what());
    }
    try {
      out.push_back(parse_line(j, inventory, where));
    } catch (const json::exception& e) {
      corrupt(where, e.what());
    }
  }
  if (out.empty()) corrupt(path.string(), "no utterances");
  return out;
}

void write_alignment(const std::filesystem::path& path,
                     const std::vector<UtteranceAlignment>& utterances,
                     const PhonemeInventory& inventory) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write alignment " + path.string());
  for (const auto& utt : utterances) {
    json words = json::array();
    for (std::size_t w = 0; w < utt.words.size(); ++w) {
      json phones = json::array();
      for (const auto& e : utt.entries) {
        if (e.word_index != static_cast<int>(w)) continue;
        phones.push_back({{"p", inventory.symbol(e.phoneme_id)},
                          {"start_s", frame_to_seconds(e.start_frame)},
                          {"end_s", frame_to_seconds(e.end_frame)}});
      }
      words.push_back({{"w", utt.words[w]}, {"phones", std::move(phones)}});
    }
    out << json{{"id", utt.id}, {"words", std::move(words)},
                {"end_s", frame_to_seconds(utt.num_frames())}}
               .dump()
        << "\n";
  }
}

void validate_alignment(const std::vector<AlignmentEntry>& entries, const std::string& id) {
  int expected = 0;
  for (const auto& e : entries) {
    if (e.start_frame != expected) {
      corrupt(id, "spans are not contiguous at frame " + std::to_string(e.start_frame));
    }
    if (e.end_frame <= e.start_frame) corrupt(id, "empty span");
    expected = e.end_frame;
  }
}

std::vector<AlignmentEntry> fit_alignment_to_frames(std::vector<AlignmentEntry> entries,
                                                    int num_frames, int silence_id) {
  while (!entries.empty() && entries.back().start_frame >= num_frames) entries.pop_back();
  if (entries.empty()) fail(ErrorCode::kCorruptAlignment, "alignment starts past the audio");
  auto& last = entries.back();
  if (last.end_frame > num_frames) {
    last.end_frame = num_frames;
  } else if (last.end_frame < num_frames) {
    entries.push_back({silence_id, last.end_frame, num_frames, kNoWord});
  }
  return entries;
}

}  // namespace rptts::corpus

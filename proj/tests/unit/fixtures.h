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

#ifndef RPTTS_TESTS_UNIT_FIXTURES_H_
#define RPTTS_TESTS_UNIT_FIXTURES_H_

#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rptts/corpus/alignment.h"
#include "rptts/corpus/example.h"

namespace rptts::testing {

// Example with one phoneme per entry of `durations`; `words[k]` is the word
// index of phoneme k (kNoWord for silence). Mel rows are random.
inline corpus::TrainingExample make_example(const std::vector<int>& durations,
                                            const std::vector<int>& words,
                                            std::uint64_t seed = 1, int n_mels = 80,
                                            const std::string& id = "ex") {
  corpus::TrainingExample ex;
  ex.id = id;
  const int k = static_cast<int>(durations.size());
  const int l = std::accumulate(durations.begin(), durations.end(), 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-4.0f, 0.0f);
  ex.mel.resize(l, n_mels);
  for (int r = 0; r < l; ++r) {
    for (int c = 0; c < n_mels; ++c) ex.mel(r, c) = u(rng);
  }
  ex.durations = durations;
  ex.word_index = words;
  for (int i = 0; i < k; ++i) {
    ex.phonemes.push_back(5 + (i % 7));
    ex.pitch_ph.push_back(i % 3 == 0 ? 0.0f : 100.0f + 5.0f * i);
    ex.energy_ph.push_back(0.5f + 0.1f * i);
  }
  return ex;
}

// Words of one phoneme each, `n` words with the given per-phoneme duration.
inline corpus::TrainingExample one_phone_words(int n, int duration = 3, std::uint64_t seed = 1) {
  std::vector<int> durations(n, duration), words(n);
  std::iota(words.begin(), words.end(), 0);
  return make_example(durations, words, seed);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("rptts_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace rptts::testing

#endif  // RPTTS_TESTS_UNIT_FIXTURES_H_

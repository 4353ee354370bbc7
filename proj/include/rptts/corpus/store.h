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

// Feature store: little-endian binary, magic "RPTS1".
//
//   magic[5] | u32 n_mels | u32 count | count x record
//   record = str id | u32 K | u32 L | f32 mel[L*n_mels] | u32 durations[K]
//          | f32 pitch_ph[K] | f32 energy_ph[K] | u32 phonemes[K]
//          | i32 word_index[K] | u8 has_seg [| 6 x (u32 begin, u32 end) | u32 w0 | u32 w1]
//          | u32 n_samples | f32 waveform[n_samples]

#ifndef RPTTS_CORPUS_STORE_H_
#define RPTTS_CORPUS_STORE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "rptts/corpus/example.h"

namespace rptts::corpus {

inline constexpr char kStoreMagic[5] = {'R', 'P', 'T', 'S', '1'};

struct FeatureStore {
  int n_mels = 80;
  std::vector<TrainingExample> examples;

  // nullptr when absent.
  const TrainingExample* find(const std::string& id) const;
};

// Throws IoError when the file cannot be created. Writers need exclusive
// access to `path`.
void write_store(const std::filesystem::path& path, const FeatureStore& store);

// Throws StoreVersionMismatch on a bad magic and CorruptStore on truncation or
// inconsistent records.
FeatureStore read_store(const std::filesystem::path& path);

}  // namespace rptts::corpus

#endif  // RPTTS_CORPUS_STORE_H_

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

// Checkpoint container: little-endian binary, magic "RPCK1".
//
//   magic[5] | str meta | u32 n_arrays | n_arrays x (str name | u32 ndim |
//   u32 dims[ndim] | f32 data[prod(dims)]) | u32 n_blobs | n_blobs x (str name | str bytes)
//
// `meta` is the human-readable configuration the state was produced with.

#ifndef RPTTS_NN_CHECKPOINT_IO_H_
#define RPTTS_NN_CHECKPOINT_IO_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rptts::ckpt {

inline constexpr char kCheckpointMagic[5] = {'R', 'P', 'C', 'K', '1'};

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
  bool operator==(const NamedArray&) const = default;
};

struct CheckpointData {
  std::string meta;
  std::vector<NamedArray> arrays;
  std::vector<std::pair<std::string, std::string>> blobs;

  const NamedArray* find_array(const std::string& name) const;
  const std::string* find_blob(const std::string& name) const;
  bool operator==(const CheckpointData&) const = default;
};

// Writes to a temporary sibling and renames, so readers never observe a
// partial file.
void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data);

// Throws CheckpointVersionMismatch on a bad magic, CorruptCheckpoint on
// truncation or trailing bytes.
CheckpointData read_checkpoint(const std::filesystem::path& path);

}  // namespace rptts::ckpt

#endif  // RPTTS_NN_CHECKPOINT_IO_H_

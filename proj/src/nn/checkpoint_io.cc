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

#include "rptts/nn/checkpoint_io.h"

#include <cstring>
#include <fstream>

#include "rptts/common/binary_io.h"
#include "rptts/common/error.h"

namespace rptts::ckpt {

const NamedArray* CheckpointData::find_array(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const std::string* CheckpointData::find_blob(const std::string& name) const {
  for (const auto& [n, b] : blobs) {
    if (n == name) return &b;
  }
  return nullptr;
}

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIoError, "cannot write checkpoint " + tmp.string());
    io::BinaryWriter w(out);
    w.bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
    w.str(data.meta);
    w.u32(static_cast<std::uint32_t>(data.arrays.size()));
    for (const auto& a : data.arrays) {
      std::size_t n = 1;
      for (int d : a.shape) n *= static_cast<std::size_t>(d);
      if (n != a.data.size()) {
        fail(ErrorCode::kInvalidInput, "array " + a.name + " does not match its shape");
      }
      w.str(a.name);
      w.u32(static_cast<std::uint32_t>(a.shape.size()));
      for (int d : a.shape) w.u32(static_cast<std::uint32_t>(d));
      w.array<float>(a.data);
    }
    w.u32(static_cast<std::uint32_t>(data.blobs.size()));
    for (const auto& [name, bytes] : data.blobs) {
      w.str(name);
      w.str(bytes);
    }
    out.flush();
    if (!w.ok()) fail(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot move checkpoint into " + path.string());
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open checkpoint " + path.string());
  char magic[sizeof(kCheckpointMagic)] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(magic)) ||
      std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::kCheckpointVersionMismatch, path.string() + " is not an RPCK1 checkpoint");
  }
  io::BinaryReader r(in, ErrorCode::kCorruptCheckpoint);
  CheckpointData data;
  data.meta = r.str();
  const std::uint32_t n_arrays = r.u32();
  for (std::uint32_t i = 0; i < n_arrays; ++i) {
    NamedArray a;
    a.name = r.str(1 << 16);
    const std::uint32_t ndim = r.u32();
    if (ndim > 8) fail(ErrorCode::kCorruptCheckpoint, "implausible rank for " + a.name);
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      const std::uint32_t dim = r.u32();
      if (dim > (1u << 28)) fail(ErrorCode::kCorruptCheckpoint, "implausible dim for " + a.name);
      a.shape.push_back(static_cast<int>(dim));
      n *= dim;
    }
    a.data = r.array<float>(n);
    data.arrays.push_back(std::move(a));
  }
  const std::uint32_t n_blobs = r.u32();
  for (std::uint32_t i = 0; i < n_blobs; ++i) {
    std::string name = r.str(1 << 16);
    data.blobs.emplace_back(std::move(name), r.str());
  }
  if (!r.at_eof()) fail(ErrorCode::kCorruptCheckpoint, "trailing bytes in " + path.string());
  return data;
}

}  // namespace rptts::ckpt

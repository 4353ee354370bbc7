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

#include "rptts/corpus/store.h"

#include <cstring>
#include <fstream>

#include "rptts/common/binary_io.h"
#include "rptts/common/error.h"

namespace rptts::corpus {
namespace {

template <typename To, typename From>
std::vector<To> convert(const std::vector<From>& v) {
  return std::vector<To>(v.begin(), v.end());
}

void write_range(io::BinaryWriter& w, Range r) {
  w.u32(static_cast<std::uint32_t>(r.begin));
  w.u32(static_cast<std::uint32_t>(r.end));
}

Range read_range(io::BinaryReader& r, int limit) {
  Range out{static_cast<int>(r.u32()), static_cast<int>(r.u32())};
  if (out.begin > out.end || out.end > limit) fail(ErrorCode::kCorruptStore, "bad range");
  return out;
}

}  // namespace

const TrainingExample* FeatureStore::find(const std::string& id) const {
  for (const auto& ex : examples) {
    if (ex.id == id) return &ex;
  }
  return nullptr;
}

void write_store(const std::filesystem::path& path, const FeatureStore& store) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write store " + path.string());
  io::BinaryWriter w(out);
  w.bytes(kStoreMagic, sizeof(kStoreMagic));
  w.u32(static_cast<std::uint32_t>(store.n_mels));
  w.u32(static_cast<std::uint32_t>(store.examples.size()));
  for (const auto& ex : store.examples) {
    validate_example(ex);
    if (ex.mel.cols() != store.n_mels) {
      fail(ErrorCode::kInvalidInput, "utterance '" + ex.id + "' has wrong mel width");
    }
    w.str(ex.id);
    w.u32(static_cast<std::uint32_t>(ex.num_phonemes()));
    w.u32(static_cast<std::uint32_t>(ex.num_frames()));
    w.array<float>({ex.mel.data(), static_cast<std::size_t>(ex.mel.size())});
    w.array<std::uint32_t>(convert<std::uint32_t>(ex.durations));
    w.array<float>(ex.pitch_ph);
    w.array<float>(ex.energy_ph);
    w.array<std::uint32_t>(convert<std::uint32_t>(ex.phonemes));
    w.array<std::int32_t>(convert<std::int32_t>(ex.word_index));
    w.u8(ex.segmentation ? 1 : 0);
    if (ex.segmentation) {
      const auto& s = *ex.segmentation;
      for (Range r : {s.phones_b, s.phones_i, s.phones_a, s.frames_b, s.frames_i, s.frames_a,
                      s.words_i}) {
        write_range(w, r);
      }
    }
    w.u32(static_cast<std::uint32_t>(ex.waveform.size()));
    w.array<float>(ex.waveform);
  }
  out.flush();
  if (!w.ok()) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

FeatureStore read_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open store " + path.string());
  char magic[sizeof(kStoreMagic)] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(magic)) ||
      std::memcmp(magic, kStoreMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::kStoreVersionMismatch, path.string() + " is not an RPTS1 store");
  }
  io::BinaryReader r(in, ErrorCode::kCorruptStore);
  FeatureStore store;
  store.n_mels = static_cast<int>(r.u32());
  if (store.n_mels <= 0 || store.n_mels > 4096) fail(ErrorCode::kCorruptStore, "bad n_mels");
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    TrainingExample ex;
    ex.id = r.str(1 << 16);
    const std::uint32_t k = r.u32();
    const std::uint32_t l = r.u32();
    if (k == 0 || l == 0 || k > (1u << 20) || l > (1u << 20)) {
      fail(ErrorCode::kCorruptStore, "record '" + ex.id + "' has implausible sizes");
    }
    auto mel = r.array<float>(static_cast<std::size_t>(l) * store.n_mels);
    ex.mel = Eigen::Map<MatrixF>(mel.data(), l, store.n_mels);
    ex.durations = convert<int>(r.array<std::uint32_t>(k));
    ex.pitch_ph = r.array<float>(k);
    ex.energy_ph = r.array<float>(k);
    ex.phonemes = convert<int>(r.array<std::uint32_t>(k));
    ex.word_index = convert<int>(r.array<std::int32_t>(k));
    if (r.u8() != 0) {
      SegmentSpec s;
      const int kk = static_cast<int>(k), ll = static_cast<int>(l);
      s.phones_b = read_range(r, kk);
      s.phones_i = read_range(r, kk);
      s.phones_a = read_range(r, kk);
      s.frames_b = read_range(r, ll);
      s.frames_i = read_range(r, ll);
      s.frames_a = read_range(r, ll);
      s.words_i = read_range(r, 1 << 20);
      ex.segmentation = s;
    }
    ex.waveform = r.array<float>(r.u32());
    try {
      validate_example(ex);
    } catch (const Error& e) {
      fail(ErrorCode::kCorruptStore, e.what());
    }
    store.examples.push_back(std::move(ex));
  }
  return store;
}

}  // namespace rptts::corpus

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

// Little-endian primitive readers/writers shared by the feature store and
// checkpoint formats. Host byte order is assumed little-endian (checked at
// compile time).

#ifndef RPTTS_COMMON_BINARY_IO_H_
#define RPTTS_COMMON_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rptts/common/error.h"

namespace rptts::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void i32(std::int32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f32(float v) { bytes(&v, 4); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  template <typename T>
  void array(std::span<const T> values) {
    bytes(values.data(), values.size_bytes());
  }

  bool ok() const { return static_cast<bool>(out_); }

 private:
  std::ostream& out_;
};

// Reads fail with `error_code` (CorruptStore, CorruptCheckpoint, ...) on
// truncation so each format reports its own error kind.
class BinaryReader {
 public:
  BinaryReader(std::istream& in, ErrorCode error_code)
      : in_(in), error_code_(error_code) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      fail(error_code_, "unexpected end of file");
    }
  }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
  std::int32_t i32() { std::int32_t v; bytes(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
  float f32() { float v; bytes(&v, 4); return v; }

  std::string str(std::size_t max_len = 1u << 26) {
    const std::uint32_t n = u32();
    if (n > max_len) fail(error_code_, "string length out of range");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

  template <typename T>
  std::vector<T> array(std::size_t n, std::size_t max_n = 1u << 28) {
    if (n > max_n) fail(error_code_, "array length out of range");
    std::vector<T> v(n);
    bytes(v.data(), n * sizeof(T));
    return v;
  }

  bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
  ErrorCode error_code_;
};

}  // namespace rptts::io

#endif  // RPTTS_COMMON_BINARY_IO_H_

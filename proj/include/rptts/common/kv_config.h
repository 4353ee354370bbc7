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

#ifndef RPTTS_COMMON_KV_CONFIG_H_
#define RPTTS_COMMON_KV_CONFIG_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rptts {

// Flat key-value configuration with optional `[section]` headers. Keys are
// stored fully qualified ("section.key"). Lines starting with '#' or ';' are
// comments.
//
//   [model]
//   d = 64
//   enc_blocks = 2
class KvConfig {
 public:
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  long long get_int64(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long long> get_int_list(const std::string& key,
                                      const std::vector<long long>& fallback) const;

  // Overlays every entry of `other` on top of this config.
  void merge(const KvConfig& other);

  // Throws InvalidConfig naming the first key not present in `known`.
  void reject_unknown(const std::set<std::string>& known) const;

  // Canonical text: sections in lexical order, one "key = value" per line.
  std::string to_text() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace rptts

#endif  // RPTTS_COMMON_KV_CONFIG_H_

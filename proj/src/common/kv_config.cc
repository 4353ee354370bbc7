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

#include "rptts/common/kv_config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rptts/common/error.h"

namespace rptts {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::kInvalidConfig, "key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

KvConfig KvConfig::parse(std::string_view text) {
  KvConfig config;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(ErrorCode::kInvalidConfig,
             "line " + std::to_string(line_no) + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kInvalidConfig,
           "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      fail(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": empty key");
    }
    config.set(section.empty() ? key : section + "." + key, value);
  }
  return config;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void KvConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

const std::string& KvConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::kInvalidConfig, "missing key '" + key + "'");
  return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

int KvConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? parse_number<int>(key, get(key)) : fallback;
}

long long KvConfig::get_int64(const std::string& key, long long fallback) const {
  return has(key) ? parse_number<long long>(key, get(key)) : fallback;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_number<double>(key, get(key)) : fallback;
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::kInvalidConfig, "key '" + key + "': expected boolean, got '" + v + "'");
}

std::vector<long long> KvConfig::get_int_list(const std::string& key,
                                              const std::vector<long long>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<long long> out;
  std::string_view rest = get(key);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string item(trim(rest.substr(0, comma)));
    if (!item.empty()) out.push_back(parse_number<long long>(key, item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void KvConfig::merge(const KvConfig& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

void KvConfig::reject_unknown(const std::set<std::string>& known) const {
  for (const auto& [k, v] : entries_) {
    if (!known.count(k)) fail(ErrorCode::kInvalidConfig, "unknown config key '" + k + "'");
  }
}

std::string KvConfig::to_text() const {
  std::ostringstream out;
  // Unsectioned keys must precede the first header to round-trip.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [key, value] : entries_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      out << key << " = " << value << "\n";
    } else {
      sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
    }
  }
  bool first = out.tellp() == 0;
  for (const auto& [section, items] : sections) {
    out << (first ? "" : "\n") << "[" << section << "]\n";
    first = false;
    for (const auto& [name, value] : items) out << name << " = " << value << "\n";
  }
  return out.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace rptts

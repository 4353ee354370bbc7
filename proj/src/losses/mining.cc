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

#include "rptts/losses/mining.h"

#include "rptts/common/error.h"

namespace rptts::losses {

std::vector<int> window_starts(int length, int len, int hop) {
  if (length < 1 || len < 1 || hop < 1) {
    fail(ErrorCode::kInvalidInput, "window sampling needs positive sizes");
  }
  if (length < len) return {-((len - length) / 2)};
  std::vector<int> starts;
  for (int s = 0; s + len <= length; s += hop) starts.push_back(s);
  return starts;
}

std::vector<Triplet> mine_triplets_style(const std::vector<WindowSource>& table) {
  std::vector<Triplet> out;
  const int n = static_cast<int>(table.size());
  for (int a = 0; a < n; ++a) {
    if (table[a].synthesized) continue;
    for (int p = 0; p < n; ++p) {
      if (p == a || table[p].synthesized || table[p].example != table[a].example) continue;
      for (int q = 0; q < n; ++q) {
        if (table[q].synthesized || table[q].example != table[a].example) {
          out.push_back({a, p, q});
        }
      }
    }
  }
  return out;
}

std::vector<Triplet> mine_triplets_generator(const std::vector<WindowSource>& table) {
  std::vector<Triplet> out;
  const int n = static_cast<int>(table.size());
  for (int a = 0; a < n; ++a) {
    if (!table[a].synthesized) continue;
    for (int p = 0; p < n; ++p) {
      if (table[p].synthesized || table[p].example != table[a].example) continue;
      for (int q = 0; q < n; ++q) {
        if (table[q].example != table[a].example) out.push_back({a, p, q});
      }
    }
  }
  return out;
}

}  // namespace rptts::losses

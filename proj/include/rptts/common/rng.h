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

#ifndef RPTTS_COMMON_RNG_H_
#define RPTTS_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

namespace rptts {

// Every random decision takes an explicit generator; there is no global RNG.
using Rng = std::mt19937_64;

inline std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

inline Rng rng_from_state(const std::string& state) {
  Rng rng;
  std::istringstream in(state);
  in >> rng;
  return rng;
}

// FNV-1a; used for content hashes and per-utterance seeds.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace rptts

#endif  // RPTTS_COMMON_RNG_H_

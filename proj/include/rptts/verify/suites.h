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

// Oracle suites shared by the CLI and the acceptance runner. The interface is
// precision-free; the gradient suite itself runs in double precision.

#ifndef RPTTS_VERIFY_SUITES_H_
#define RPTTS_VERIFY_SUITES_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace rptts::verify {

struct CaseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CaseResult> cases;

  bool passed() const;
  int failures() const;
  void print(std::ostream& out) const;
};

// Finite differences (h = 1e-3, relative tolerance 1e-4) for every
// differentiable op, layer, network and loss on toy shapes.
SuiteResult run_grad_suite(std::uint64_t seed = 1);

// Miners against set-based enumeration for every batch of at most 4
// utterances with at most 4 windows each, plus the fixed 2+2 battery.
SuiteResult run_mining_suite(std::uint64_t seed = 1);

// Dynamic program against exhaustive path enumeration for n, m <= 8.
SuiteResult run_dtw_suite(std::uint64_t seed = 1, int matrices = 200);

// Cepstra against a direct cosine-sum DCT.
SuiteResult run_mfcc_suite(std::uint64_t seed = 1);

}  // namespace rptts::verify

#endif  // RPTTS_VERIFY_SUITES_H_

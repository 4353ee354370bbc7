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

#include "fft.h"

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace rptts::dsp::detail {
namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

PlanPair plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair pair{fftw_plan_dft_r2c_1d(n, real.data(), c, flags),
                fftw_plan_dft_c2r_1d(n, c, real.data(), flags)};
  cache.emplace(n, pair);
  return pair;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  PlanPair p = plans_for(n);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(const std::complex<double>* in, double* out) const {
  // c2r overwrites its input.
  std::vector<std::complex<double>> scratch(in, in + n_ / 2 + 1);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] *= scale;
}

}  // namespace rptts::dsp::detail

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

#ifndef RPTTS_SRC_DSP_FFT_H_
#define RPTTS_SRC_DSP_FFT_H_

#include <complex>

namespace rptts::dsp::detail {

// Thin FFTW wrapper. Plans are created once per size under a global lock
// (FFTW's planner is not thread-safe); execution uses the new-array API and
// is safe to call concurrently.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }

  // n real samples -> n/2 + 1 complex bins.
  void forward(const double* in, std::complex<double>* out) const;
  // n/2 + 1 bins -> n real samples, scaled by 1/n.
  void inverse(const std::complex<double>* in, double* out) const;

 private:
  int n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace rptts::dsp::detail

#endif  // RPTTS_SRC_DSP_FFT_H_

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

#ifndef RPTTS_DSP_TYPES_H_
#define RPTTS_DSP_TYPES_H_

#include <vector>

#include <Eigen/Core>

namespace rptts::dsp {

using MatrixD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kSampleRate = 22050;
inline constexpr double kMaxSeconds = 10.0;

struct Waveform {
  std::vector<float> samples;
  int sample_rate = kSampleRate;
};

struct SpectrogramConfig {
  int sample_rate = kSampleRate;
  int n_fft = 1024;
  int hop = 256;
  int win = 1024;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  // Clamp floor before the log; log(log_floor) is also the padding value
  // used by the discriminators.
  double log_floor = 1e-5;

  int n_bins() const { return n_fft / 2 + 1; }
  // Throws InvalidConfig unless hop <= win <= n_fft, fmin < fmax <= sr/2.
  void validate() const;
};

// L x n_mels natural-log mel magnitudes.
struct MelSpectrogram {
  MatrixD frames;
  SpectrogramConfig config;

  int num_frames() const { return static_cast<int>(frames.rows()); }
};

// L x 13 cepstra, c0..c12.
struct MfccSequence {
  MatrixD frames;
};

// Per-frame F0 in Hz; 0 marks unvoiced frames.
struct PitchTrack {
  std::vector<double> values;
};

struct EnergyTrack {
  std::vector<double> values;
};

}  // namespace rptts::dsp

#endif  // RPTTS_DSP_TYPES_H_

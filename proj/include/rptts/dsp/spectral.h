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

// Spectral frontend. Every function here is pure and thread-safe.
//
// Framing convention: centered STFT with reflect padding of n_fft/2 on both
// sides and a periodic Hann window, so frame i is centered on sample i*hop and
// a waveform of N samples yields exactly 1 + floor(N / hop) frames.

#ifndef RPTTS_DSP_SPECTRAL_H_
#define RPTTS_DSP_SPECTRAL_H_

#include <span>

#include "rptts/dsp/types.h"

namespace rptts::dsp {

inline constexpr int kNumMfcc = 13;
inline constexpr int kDefaultGriffinLimIterations = 60;

int num_frames(std::size_t num_samples, int hop);

// L x (n_fft/2 + 1) magnitudes. Throws InvalidInput on an empty waveform.
MatrixD stft_magnitude(const Waveform& w, const SpectrogramConfig& cfg);

// n_mels x (n_fft/2 + 1) Slaney-scale triangular filters with Slaney area
// normalization.
MatrixD mel_filterbank(const SpectrogramConfig& cfg);

// Center frequency in Hz of each mel filter (n_mels values, ascending).
std::vector<double> mel_center_frequencies(const SpectrogramConfig& cfg);

MelSpectrogram mel_spectrogram(const Waveform& w, const SpectrogramConfig& cfg);

// Same as above but from a precomputed magnitude matrix.
MelSpectrogram mel_from_magnitude(const MatrixD& magnitude, const SpectrogramConfig& cfg);

// Non-negative linear magnitude S (L x n_bins) with filterbank * S close to
// exp(mel), by multiplicative updates started from the clamped
// pseudo-inverse.
MatrixD mel_to_magnitude(const MelSpectrogram& mel, int iterations = 100);

// Phase reconstruction from a log-mel spectrogram, using mel_to_magnitude as
// the target magnitude. Output has (L - 1) * hop samples.
Waveform griffin_lim(const MelSpectrogram& mel, int iterations = kDefaultGriffinLimIterations);

// Orthonormal DCT-II over each log-mel row, first 13 coefficients.
MfccSequence mfcc(const MelSpectrogram& mel);

// num_coeffs x n orthonormal DCT-II basis (row k = k-th cosine).
MatrixD dct_matrix(int num_coeffs, int n);

struct F0Options {
  double fmin = 60.0;
  double fmax = 600.0;
  double threshold = 0.15;
  int integration_window = 512;
};

// YIN-style F0 tracker aligned to the mel frames of `cfg`.
PitchTrack estimate_f0(const Waveform& w, const SpectrogramConfig& cfg,
                       const F0Options& options = {});

// Row-wise L2 norm of an STFT magnitude matrix.
EnergyTrack frame_energy(const MatrixD& stft_mag);

}  // namespace rptts::dsp

#endif  // RPTTS_DSP_SPECTRAL_H_

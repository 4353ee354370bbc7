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

#include "rptts/dsp/spectral.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/QR>

#include "fft.h"
#include "rptts/common/error.h"

namespace rptts::dsp {
namespace {

using Complex = std::complex<double>;
using ComplexFrames = std::vector<std::vector<Complex>>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Mirror index into [0, n) without repeating the edge sample (numpy "reflect").
std::size_t reflect_index(long long idx, std::size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * (static_cast<long long>(n) - 1);
  long long m = idx % period;
  if (m < 0) m += period;
  if (m >= static_cast<long long>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

// Periodic Hann of length `win`, zero-padded and centered in n_fft.
std::vector<double> analysis_window(const SpectrogramConfig& cfg) {
  std::vector<double> w(cfg.n_fft, 0.0);
  const int offset = (cfg.n_fft - cfg.win) / 2;
  for (int i = 0; i < cfg.win; ++i) {
    w[offset + i] = 0.5 - 0.5 * std::cos(kTwoPi * i / cfg.win);
  }
  return w;
}

ComplexFrames stft_complex(std::span<const double> x, const SpectrogramConfig& cfg) {
  const int frames = num_frames(x.size(), cfg.hop);
  const int pad = cfg.n_fft / 2;
  const auto window = analysis_window(cfg);
  detail::RealFft fft(cfg.n_fft);
  ComplexFrames out(frames, std::vector<Complex>(cfg.n_bins()));
  std::vector<double> buf(cfg.n_fft);
  for (int i = 0; i < frames; ++i) {
    const long long start = static_cast<long long>(i) * cfg.hop - pad;
    for (int j = 0; j < cfg.n_fft; ++j) {
      buf[j] = x[reflect_index(start + j, x.size())] * window[j];
    }
    fft.forward(buf.data(), out[i].data());
  }
  return out;
}

// Windowed overlap-add inverse with squared-window normalization; returns
// (L - 1) * hop samples aligned so frame i is centered on sample i * hop.
std::vector<double> istft(const ComplexFrames& spec, const SpectrogramConfig& cfg) {
  const int frames = static_cast<int>(spec.size());
  const int pad = cfg.n_fft / 2;
  const std::size_t out_len = static_cast<std::size_t>(frames - 1) * cfg.hop;
  const std::size_t buf_len = static_cast<std::size_t>(frames - 1) * cfg.hop + cfg.n_fft;
  const auto window = analysis_window(cfg);
  detail::RealFft fft(cfg.n_fft);
  std::vector<double> acc(buf_len, 0.0), norm(buf_len, 0.0), frame(cfg.n_fft);
  for (int i = 0; i < frames; ++i) {
    fft.inverse(spec[i].data(), frame.data());
    const std::size_t off = static_cast<std::size_t>(i) * cfg.hop;
    for (int j = 0; j < cfg.n_fft; ++j) {
      acc[off + j] += frame[j] * window[j];
      norm[off + j] += window[j] * window[j];
    }
  }
  std::vector<double> y(out_len);
  for (std::size_t t = 0; t < out_len; ++t) {
    const double n = norm[t + pad];
    y[t] = n > 1e-10 ? acc[t + pad] / n : 0.0;
  }
  return y;
}

double hz_to_mel(double hz) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  return hz < min_log_hz ? hz / f_sp : min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double mel_to_hz(double mel) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  return mel < min_log_mel ? mel * f_sp : min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

std::vector<double> mel_edges(const SpectrogramConfig& cfg) {
  const double lo = hz_to_mel(cfg.fmin);
  const double hi = hz_to_mel(cfg.fmax);
  std::vector<double> edges(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * i / (cfg.n_mels + 1));
  }
  return edges;
}

std::vector<double> to_double(std::span<const float> s) { return {s.begin(), s.end()}; }

}  // namespace

void SpectrogramConfig::validate() const {
  if (n_fft <= 0 || hop <= 0 || win <= 0 || n_mels <= 0 || sample_rate <= 0) {
    fail(ErrorCode::kInvalidConfig, "spectrogram sizes must be positive");
  }
  if (hop > win || win > n_fft) fail(ErrorCode::kInvalidConfig, "require hop <= win <= n_fft");
  if (!(fmin < fmax)) fail(ErrorCode::kInvalidConfig, "fmin must be below fmax");
  if (fmin < 0.0 || fmax > sample_rate / 2.0) {
    fail(ErrorCode::kInvalidConfig, "mel range must lie within [0, sample_rate / 2]");
  }
  if (!(log_floor > 0.0)) fail(ErrorCode::kInvalidConfig, "log_floor must be positive");
}

int num_frames(std::size_t num_samples, int hop) {
  return 1 + static_cast<int>(num_samples / static_cast<std::size_t>(hop));
}

MatrixD stft_magnitude(const Waveform& w, const SpectrogramConfig& cfg) {
  cfg.validate();
  if (w.samples.empty()) fail(ErrorCode::kInvalidInput, "empty waveform");
  const auto x = to_double(w.samples);
  const auto spec = stft_complex(x, cfg);
  MatrixD mag(spec.size(), cfg.n_bins());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (int k = 0; k < cfg.n_bins(); ++k) mag(i, k) = std::abs(spec[i][k]);
  }
  return mag;
}

std::vector<double> mel_center_frequencies(const SpectrogramConfig& cfg) {
  const auto edges = mel_edges(cfg);
  return {edges.begin() + 1, edges.end() - 1};
}

MatrixD mel_filterbank(const SpectrogramConfig& cfg) {
  cfg.validate();
  const auto edges = mel_edges(cfg);
  const int bins = cfg.n_bins();
  MatrixD fb = MatrixD::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    const double enorm = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      const double lower = (f - left) / (center - left);
      const double upper = (right - f) / (right - center);
      fb(m, k) = std::max(0.0, std::min(lower, upper)) * enorm;
    }
  }
  return fb;
}

MelSpectrogram mel_from_magnitude(const MatrixD& magnitude, const SpectrogramConfig& cfg) {
  const MatrixD fb = mel_filterbank(cfg);
  MelSpectrogram mel;
  mel.config = cfg;
  mel.frames = (magnitude * fb.transpose()).array().max(cfg.log_floor).log();
  return mel;
}

MelSpectrogram mel_spectrogram(const Waveform& w, const SpectrogramConfig& cfg) {
  return mel_from_magnitude(stft_magnitude(w, cfg), cfg);
}

MatrixD mel_to_magnitude(const MelSpectrogram& mel, int iterations) {
  const MatrixD fb = mel_filterbank(mel.config);
  const MatrixD pinv = Eigen::CompleteOrthogonalDecomposition<MatrixD>(fb).pseudoInverse();
  const MatrixD target = mel.frames.array().exp().matrix();
  // Zeros never move under multiplicative updates, so start slightly above.
  MatrixD s = (target * pinv.transpose()).array().max(1e-8);
  const MatrixD numerator = target * fb;
  for (int it = 0; it < iterations; ++it) {
    const MatrixD denominator = (s * fb.transpose()) * fb;
    s = s.array() * numerator.array() / (denominator.array() + 1e-12);
  }
  return s;
}

Waveform griffin_lim(const MelSpectrogram& mel, int iterations) {
  if (iterations < 1) fail(ErrorCode::kInvalidInput, "griffin_lim needs iterations >= 1");
  if (mel.frames.rows() < 1) fail(ErrorCode::kInvalidInput, "empty mel spectrogram");
  const SpectrogramConfig& cfg = mel.config;
  const MatrixD magnitude = mel_to_magnitude(mel);

  const int frames = static_cast<int>(magnitude.rows());
  const int bins = cfg.n_bins();
  // Zero initial phase; random phases leave frame-to-frame inconsistencies
  // that later iterations do not remove on stationary tones.
  ComplexFrames spec(frames, std::vector<Complex>(bins));
  for (int i = 0; i < frames; ++i) {
    for (int k = 0; k < bins; ++k) spec[i][k] = Complex(magnitude(i, k), 0.0);
  }

  std::vector<double> y = istft(spec, cfg);
  for (int it = 0; it < iterations && !y.empty(); ++it) {
    const ComplexFrames rebuilt = stft_complex(y, cfg);
    for (int i = 0; i < frames; ++i) {
      for (int k = 0; k < bins; ++k) {
        const double a = std::abs(rebuilt[i][k]);
        const Complex phase = a > 1e-12 ? rebuilt[i][k] / a : Complex(1.0, 0.0);
        spec[i][k] = magnitude(i, k) * phase;
      }
    }
    y = istft(spec, cfg);
  }

  Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.samples.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    out.samples[t] = static_cast<float>(std::clamp(y[t], -1.0, 1.0));
  }
  return out;
}

MatrixD dct_matrix(int num_coeffs, int n) {
  MatrixD basis(num_coeffs, n);
  for (int k = 0; k < num_coeffs; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < n; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  return basis;
}

MfccSequence mfcc(const MelSpectrogram& mel) {
  const MatrixD basis = dct_matrix(kNumMfcc, static_cast<int>(mel.frames.cols()));
  return MfccSequence{mel.frames * basis.transpose()};
}

PitchTrack estimate_f0(const Waveform& w, const SpectrogramConfig& cfg,
                       const F0Options& options) {
  const int frames = num_frames(w.samples.size(), cfg.hop);
  const int width = options.integration_window;
  const int tau_min = std::max(2, static_cast<int>(std::floor(cfg.sample_rate / options.fmax)));
  const int tau_max = static_cast<int>(std::ceil(cfg.sample_rate / options.fmin));
  const long long n = static_cast<long long>(w.samples.size());

  PitchTrack track;
  track.values.assign(frames, 0.0);
  std::vector<double> seg(width + tau_max + 1);
  std::vector<double> diff(tau_max + 2), cmnd(tau_max + 2);

  for (int i = 0; i < frames; ++i) {
    const long long start = static_cast<long long>(i) * cfg.hop - width / 2;
    double energy = 0.0;
    for (std::size_t j = 0; j < seg.size(); ++j) {
      const long long idx = start + static_cast<long long>(j);
      seg[j] = (idx >= 0 && idx < n) ? w.samples[idx] : 0.0;
      if (static_cast<int>(j) < width) energy += seg[j] * seg[j];
    }
    if (energy < 1e-8 * width) continue;

    for (int tau = 1; tau <= tau_max; ++tau) {
      double d = 0.0;
      for (int j = 0; j < width; ++j) {
        const double delta = seg[j] - seg[j + tau];
        d += delta * delta;
      }
      diff[tau] = d;
    }
    cmnd[0] = 1.0;
    double running = 0.0;
    for (int tau = 1; tau <= tau_max; ++tau) {
      running += diff[tau];
      cmnd[tau] = running > 0.0 ? diff[tau] * tau / running : 1.0;
    }

    int best = -1;
    for (int tau = tau_min; tau <= tau_max; ++tau) {
      if (cmnd[tau] < options.threshold) {
        while (tau + 1 <= tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
        best = tau;
        break;
      }
    }
    if (best < 0) continue;

    double refined = best;
    if (best > 1 && best < tau_max) {
      const double a = cmnd[best - 1], b = cmnd[best], c = cmnd[best + 1];
      const double denom = a - 2.0 * b + c;
      if (std::abs(denom) > 1e-12) refined = best + 0.5 * (a - c) / denom;
    }
    const double f0 = cfg.sample_rate / refined;
    if (f0 >= options.fmin && f0 <= options.fmax) track.values[i] = f0;
  }
  return track;
}

EnergyTrack frame_energy(const MatrixD& stft_mag) {
  EnergyTrack e;
  e.values.resize(stft_mag.rows());
  for (Eigen::Index i = 0; i < stft_mag.rows(); ++i) e.values[i] = stft_mag.row(i).norm();
  return e;
}

}  // namespace rptts::dsp

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

// Alignment and distortion measures, the average-mel baseline and stitching.

#ifndef RPTTS_EVAL_METRICS_H_
#define RPTTS_EVAL_METRICS_H_

#include <functional>
#include <utility>
#include <vector>

#include "rptts/corpus/example.h"
#include "rptts/dsp/types.h"

namespace rptts::eval {

struct DtwResult {
  double cost = 0.0;
  std::vector<std::pair<int, int>> path;  // (0,0) .. (n-1, m-1)
};

// Minimal-cost monotone path with steps (1,0), (0,1), (1,1). Ties prefer the
// diagonal, then (1,0). Throws InvalidInput when n or m is 0.
DtwResult dtw(int n, int m, const std::function<double(int, int)>& cost);
DtwResult dtw(const dsp::MatrixD& cost);

// 10 * sqrt(2) / ln(10).
double mcd_scale();

// Distortion of one aligned frame pair over c1..c12.
double frame_distortion(const dsp::MatrixD& a, int i, const dsp::MatrixD& b, int j);

// DTW-aligned mel-cepstral distortion: path cost divided by path length.
double mcd(const dsp::MfccSequence& a, const dsp::MfccSequence& b);

// Mel with the inserted span restored to its ground-truth length and filled
// with the column mean of the context frames. `x_in` holds the B then A rows.
corpus::MatrixF average_mel_fill(const corpus::MatrixF& x_in, const corpus::SegmentSpec& spec);

inline constexpr double kCrossfadeSeconds = 0.005;

// Ground-truth audio for the B and A frame spans around `insert` (which
// replaces the I span). Each joint is a linear crossfade over the first and
// last 5 ms of the insert, blending from and to the ground truth that the
// insert replaces. Output length is B samples + insert length + A samples.
dsp::Waveform stitch(const dsp::Waveform& insert, const dsp::Waveform& ground_truth,
                     const corpus::SegmentSpec& spec, int hop = 256,
                     double crossfade_seconds = kCrossfadeSeconds);

}  // namespace rptts::eval

#endif  // RPTTS_EVAL_METRICS_H_

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

#ifndef RPTTS_EVAL_EVALUATE_H_
#define RPTTS_EVAL_EVALUATE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "rptts/corpus/example.h"
#include "rptts/dsp/spectral.h"
#include "rptts/model/generator.h"

namespace rptts::eval {

inline constexpr const char* kMethodModel = "model";
inline constexpr const char* kMethodAverageMel = "average-mel";
inline constexpr const char* kMethodGtMel = "gt-mel-vocoder";

// Insert-length buckets by phoneme count: short < 10, medium 10..20, long > 20.
std::string length_bucket(int insert_phonemes);

struct EvalRecord {
  std::string id;
  std::string method;
  double mcd = 0.0;
  int insert_frames = 0;    // ground-truth L_I
  int insert_words = 0;
  int insert_phonemes = 0;
  int output_frames = 0;    // frames of the synthesized mel
};

struct EvalAggregate {
  std::string method;
  std::string subset;  // "all" or a length bucket
  int count = 0;
  double mean_mcd = 0.0;
};

struct EvalReport {
  std::vector<EvalRecord> records;

  // Means per method over all records and per length bucket.
  std::vector<EvalAggregate> aggregates() const;
  double mean(const std::string& method) const;
  void write_csv(const std::filesystem::path& path) const;
  std::string summary_text() const;
};

struct EvalOptions {
  std::vector<std::string> methods = {kMethodModel, kMethodAverageMel, kMethodGtMel};
  int griffin_lim_iterations = dsp::kDefaultGriffinLimIterations;
  // Compare only the frames of the stitched insert instead of the utterance.
  bool region_only = false;
  std::filesystem::path stitched_dir;  // empty: no WAVs written
  int jobs = 1;
  dsp::SpectrogramConfig spectrogram;
};

// Vocodes the I span of `mel` (rows [begin, end)) and returns exactly
// (end - begin) * hop samples cut from a vocoding of the whole mel.
dsp::Waveform vocode_span(const corpus::MatrixF& mel, int begin, int end,
                          const dsp::SpectrogramConfig& cfg, int iterations);

// Every example needs a frozen segmentation (MissingSegmentation otherwise)
// and its waveform. `generator` may be null unless "model" is requested.
// Records are ordered by example, then by method as listed.
EvalReport evaluate_corpus(const std::vector<corpus::TrainingExample>& examples,
                           const model::Generator* generator, const EvalOptions& options);

}  // namespace rptts::eval

#endif  // RPTTS_EVAL_EVALUATE_H_

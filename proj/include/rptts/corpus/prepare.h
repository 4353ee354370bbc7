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

#ifndef RPTTS_CORPUS_PREPARE_H_
#define RPTTS_CORPUS_PREPARE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "rptts/corpus/alignment.h"
#include "rptts/corpus/store.h"
#include "rptts/dsp/types.h"

namespace rptts::corpus {

struct PrepareOptions {
  dsp::SpectrogramConfig spectrogram;
  bool keep_waveform = true;
  // Freeze one B/I/A split per utterance, seeded by a hash of its id.
  bool freeze_segmentation = true;
};

struct PrepareReport {
  struct Line {
    std::string id;
    bool ok = false;
    std::string message;
  };
  std::vector<Line> lines;
  int valid() const;
};

// Mel, durations and per-phoneme pitch/energy for one utterance.
TrainingExample build_example(const UtteranceAlignment& alignment, const dsp::Waveform& wave,
                              const PrepareOptions& options, int silence_id);

// Pairs every alignment record with <audio_dir>/<id>.wav. Utterances that
// fail validation are reported (with their id) and skipped. Throws
// InvalidInput when `audio_dir` holds no .wav files.
FeatureStore prepare_corpus(const std::filesystem::path& audio_dir,
                            const std::filesystem::path& alignment_path,
                            const PrepareOptions& options, PrepareReport* report = nullptr);

}  // namespace rptts::corpus

#endif  // RPTTS_CORPUS_PREPARE_H_

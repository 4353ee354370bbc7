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

// Synthetic speech-like corpus with exact alignments.
//
// Pseudo-phonemes ph00..ph09 are harmonic sources shaped by a fixed
// three-formant envelope; ph10 and ph11 are resonant noise bursts. A speaker
// is a base F0, a formant scale and a spectral tilt. Each utterance is
// T * 256 - 1 samples long so its mel has exactly T frames and every phone
// boundary falls on a frame boundary.

#ifndef RPTTS_CORPUS_TOY_H_
#define RPTTS_CORPUS_TOY_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rptts/corpus/alignment.h"
#include "rptts/corpus/phonemes.h"
#include "rptts/dsp/types.h"

namespace rptts::corpus {

struct ToyOptions {
  int n_utterances = 8;
  int n_speakers = 4;
  std::uint64_t seed = 7;
  double min_seconds = 1.0;
  double max_seconds = 4.0;
  double pause_probability = 0.3;
  int lexicon_size = 16;
};

struct ToyUtterance {
  std::string id;
  int speaker = 0;
  dsp::Waveform wave;
  std::string transcript;
  // Includes leading, inter-word and trailing silences; ends at the mel length.
  UtteranceAlignment alignment;
};

std::vector<ToyUtterance> generate_toy_corpus(const ToyOptions& options);
std::vector<ToyUtterance> generate_toy_corpus(int n_utterances, int n_speakers,
                                              std::uint64_t seed);

struct ToyCorpusPaths {
  std::filesystem::path audio_dir;    // <out>/wav/<id>.wav
  std::filesystem::path transcripts;  // <out>/transcripts.tsv
  std::filesystem::path alignment;    // <out>/alignment.jsonl
};

ToyCorpusPaths write_toy_corpus(const std::filesystem::path& out_dir,
                                const std::vector<ToyUtterance>& utterances,
                                const PhonemeInventory& inventory = PhonemeInventory::standard());

}  // namespace rptts::corpus

#endif  // RPTTS_CORPUS_TOY_H_

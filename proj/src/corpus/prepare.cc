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

#include "rptts/corpus/prepare.h"

#include <algorithm>

#include "rptts/common/error.h"
#include "rptts/common/rng.h"
#include "rptts/corpus/phonemes.h"
#include "rptts/dsp/spectral.h"
#include "rptts/dsp/wav.h"

namespace rptts::corpus {

int PrepareReport::valid() const {
  return static_cast<int>(std::count_if(lines.begin(), lines.end(),
                                        [](const Line& l) { return l.ok; }));
}

TrainingExample build_example(const UtteranceAlignment& alignment, const dsp::Waveform& wave,
                              const PrepareOptions& options, int silence_id) {
  const auto& cfg = options.spectrogram;
  const dsp::MatrixD mag = dsp::stft_magnitude(wave, cfg);
  const dsp::MelSpectrogram mel = dsp::mel_from_magnitude(mag, cfg);
  const dsp::PitchTrack f0 = dsp::estimate_f0(wave, cfg);
  const dsp::EnergyTrack energy = dsp::frame_energy(mag);

  const auto entries = fit_alignment_to_frames(alignment.entries, mel.num_frames(), silence_id);
  validate_alignment(entries, alignment.id);
  const VarianceTargets t = phoneme_variance_targets(entries, f0, energy);

  TrainingExample ex;
  ex.id = alignment.id;
  ex.mel = to_float(mel.frames);
  ex.durations = t.durations;
  ex.pitch_ph = t.pitch_ph;
  ex.energy_ph = t.energy_ph;
  for (const auto& e : entries) {
    ex.phonemes.push_back(e.phoneme_id);
    ex.word_index.push_back(e.word_index);
  }
  if (options.keep_waveform) ex.waveform = wave.samples;
  validate_example(ex);
  if (options.freeze_segmentation) {
    Rng rng(fnv1a(ex.id));
    ex.segmentation = sample_segmentation(ex, rng);
  }
  return ex;
}

FeatureStore prepare_corpus(const std::filesystem::path& audio_dir,
                            const std::filesystem::path& alignment_path,
                            const PrepareOptions& options, PrepareReport* report) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(audio_dir)) {
    fail(ErrorCode::kInvalidInput, "audio directory " + audio_dir.string() + " does not exist");
  }
  bool any_wav = false;
  for (const auto& entry : fs::directory_iterator(audio_dir)) {
    if (entry.path().extension() == ".wav") {
      any_wav = true;
      break;
    }
  }
  if (!any_wav) fail(ErrorCode::kInvalidInput, "no .wav files in " + audio_dir.string());

  const auto& inventory = PhonemeInventory::standard();
  const auto alignments = load_alignment(alignment_path, inventory);
  FeatureStore store;
  store.n_mels = options.spectrogram.n_mels;
  for (const auto& a : alignments) {
    PrepareReport::Line line{a.id, false, ""};
    try {
      const fs::path wav = audio_dir / (a.id + ".wav");
      if (!fs::exists(wav)) fail(ErrorCode::kIoError, "missing " + wav.string());
      store.examples.push_back(
          build_example(a, dsp::load_audio(wav), options, inventory.silence_id()));
      const auto& ex = store.examples.back();
      line.ok = true;
      line.message = "K=" + std::to_string(ex.num_phonemes()) +
                     " L=" + std::to_string(ex.num_frames()) + " sum(d)=L";
    } catch (const Error& e) {
      line.message = e.what();
    }
    if (report) report->lines.push_back(line);
  }
  return store;
}

}  // namespace rptts::corpus

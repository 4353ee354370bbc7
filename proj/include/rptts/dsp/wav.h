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

#ifndef RPTTS_DSP_WAV_H_
#define RPTTS_DSP_WAV_H_

#include <filesystem>

#include "rptts/dsp/types.h"

namespace rptts::dsp {

// Mono RIFF/WAVE reader: 16-bit PCM or 32-bit IEEE float (plain or
// WAVE_FORMAT_EXTENSIBLE). Multi-channel files are rejected with InvalidInput.
Waveform read_wav(const std::filesystem::path& path);

// 16-bit little-endian PCM mono; samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const Waveform& w);

// Windowed-sinc (Hann-tapered) band-limited resampler.
Waveform resample(const Waveform& w, int target_rate);

// read_wav + resample to 22050 Hz + trim to at most 10 s.
Waveform load_audio(const std::filesystem::path& path);

}  // namespace rptts::dsp

#endif  // RPTTS_DSP_WAV_H_

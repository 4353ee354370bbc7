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

#include "rptts/dsp/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <vector>

#include "rptts/common/binary_io.h"
#include "rptts/common/error.h"

namespace rptts::dsp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const char* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

std::uint32_t le32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string();
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    fail(ErrorCode::kInvalidInput, where + ": not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const char* samples = nullptr;
  std::size_t sample_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = data.data() + pos;
    const std::size_t size = le32(id + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, data.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (avail < 16) fail(ErrorCode::kInvalidInput, where + ": short fmt chunk");
      format = le16(id + 8);
      channels = le16(id + 10);
      rate = le32(id + 12);
      bits = le16(id + 22);
      if (format == kFormatExtensible && avail >= 26) format = le16(id + 32);
    } else if (std::memcmp(id, "data", 4) == 0) {
      samples = data.data() + body;
      sample_bytes = avail;
    }
    pos = body + size + (size & 1);
  }
  if (samples == nullptr || rate == 0) fail(ErrorCode::kInvalidInput, where + ": missing chunks");
  if (channels != 1) {
    fail(ErrorCode::kInvalidInput,
         where + ": expected mono audio, got " + std::to_string(channels) + " channels");
  }

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = sample_bytes / 2;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t s;
      std::memcpy(&s, samples + 2 * i, 2);
      w.samples[i] = static_cast<float>(s) / 32768.0f;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = sample_bytes / 4;
    w.samples.resize(n);
    std::memcpy(w.samples.data(), samples, n * 4);
  } else {
    fail(ErrorCode::kInvalidInput, where + ": unsupported sample format " +
                                       std::to_string(format) + "/" + std::to_string(bits));
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  io::BinaryWriter bw(out);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  bw.bytes("RIFF", 4);
  bw.u32(36 + data_bytes);
  bw.bytes("WAVEfmt ", 8);
  bw.u32(16);
  const std::uint16_t fmt_fields[2] = {kFormatPcm, 1};
  bw.bytes(fmt_fields, 4);
  bw.u32(static_cast<std::uint32_t>(w.sample_rate));
  bw.u32(static_cast<std::uint32_t>(w.sample_rate) * 2);
  const std::uint16_t align_bits[2] = {2, 16};
  bw.bytes(align_bits, 4);
  bw.bytes("data", 4);
  bw.u32(data_bytes);
  for (float s : w.samples) {
    const double clipped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
    bw.bytes(&v, 2);
  }
  if (!bw.ok()) fail(ErrorCode::kIoError, "short write to " + path.string());
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) fail(ErrorCode::kInvalidInput, "target rate must be positive");
  if (w.sample_rate == target_rate || w.samples.empty()) {
    Waveform out = w;
    out.sample_rate = target_rate;
    return out;
  }
  const double ratio = static_cast<double>(target_rate) / w.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to the input Nyquist
  constexpr int kZeroCrossings = 16;
  const double half_width = kZeroCrossings / cutoff;
  const auto n_in = static_cast<long long>(w.samples.size());
  const auto n_out = static_cast<std::size_t>(std::floor(n_in * ratio));

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double center = static_cast<double>(i) / ratio;
    const auto lo = static_cast<long long>(std::ceil(center - half_width));
    const auto hi = static_cast<long long>(std::floor(center + half_width));
    double acc = 0.0;
    for (long long k = std::max(0LL, lo); k <= std::min(n_in - 1, hi); ++k) {
      const double t = (center - k) * cutoff;
      const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
      const double taper = 0.5 + 0.5 * std::cos(std::numbers::pi * (center - k) / half_width);
      acc += w.samples[k] * sinc * taper;
    }
    out.samples[i] = static_cast<float>(acc * cutoff);
  }
  return out;
}

Waveform load_audio(const std::filesystem::path& path) {
  Waveform w = resample(read_wav(path), kSampleRate);
  const auto max_samples = static_cast<std::size_t>(kMaxSeconds * kSampleRate);
  if (w.samples.size() > max_samples) w.samples.resize(max_samples);
  return w;
}

}  // namespace rptts::dsp

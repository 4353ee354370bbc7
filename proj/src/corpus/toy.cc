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

#include "rptts/corpus/toy.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "rptts/common/error.h"
#include "rptts/common/rng.h"
#include "rptts/dsp/wav.h"

namespace rptts::corpus {
namespace {

constexpr int kHop = 256;
constexpr int kSr = dsp::kSampleRate;
constexpr int kNumVoiced = 10;
constexpr int kBlend = 128;  // samples on each side of a phone boundary
constexpr double kMaxHarmonicHz = 5000.0;

struct Formants {
  std::array<double, 3> freq;
  std::array<double, 3> gain;
  double amplitude;
};

// ph00..ph09: vowel-like envelopes.
constexpr std::array<Formants, kNumVoiced> kVoiced = {{
    {{730, 1090, 2440}, {1.0, 0.50, 0.20}, 0.60},
    {{270, 2290, 3010}, {1.0, 0.30, 0.25}, 0.50},
    {{530, 1840, 2480}, {1.0, 0.45, 0.20}, 0.55},
    {{300, 870, 2240}, {1.0, 0.35, 0.10}, 0.50},
    {{660, 1720, 2410}, {1.0, 0.50, 0.20}, 0.60},
    {{490, 1350, 1690}, {1.0, 0.60, 0.40}, 0.45},
    {{570, 840, 2410}, {1.0, 0.55, 0.15}, 0.55},
    {{390, 1990, 2550}, {1.0, 0.40, 0.25}, 0.50},
    {{250, 600, 2200}, {1.0, 0.20, 0.10}, 0.35},   // nasal-like
    {{450, 1100, 2700}, {1.0, 0.30, 0.30}, 0.30},  // weak
}};

struct NoiseBand {
  double center;
  double bandwidth;
  double amplitude;
};
constexpr std::array<NoiseBand, 2> kNoise = {{{4200, 900, 0.12}, {6500, 1400, 0.10}}};

struct Speaker {
  double f0;
  double formant_scale;
  double tilt;  // per-harmonic amplitude factor
  double rate;  // duration multiplier
};
constexpr std::array<Speaker, 4> kSpeakers = {{
    {110, 0.92, 0.97, 1.10},
    {150, 1.00, 0.95, 1.00},
    {205, 1.08, 0.93, 0.90},
    {245, 1.15, 0.91, 0.95},
}};

Speaker speaker_for(int s) {
  if (s < static_cast<int>(kSpeakers.size())) return kSpeakers[s];
  // Extra speakers interpolate deterministically between the fixed ones.
  Rng rng(0x5eedULL + static_cast<std::uint64_t>(s));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {100 + 160 * u(rng), 0.9 + 0.3 * u(rng), 0.90 + 0.08 * u(rng), 0.9 + 0.2 * u(rng)};
}

struct Lexicon {
  std::vector<std::vector<int>> words;  // toy phoneme indices 0..11
  std::array<int, kNumToyPhonemes> base_frames;
};

const Lexicon& lexicon(int size) {
  static thread_local std::vector<std::pair<int, Lexicon>> cache;
  for (const auto& [n, lex] : cache) {
    if (n == size) return lex;
  }
  Lexicon lex;
  Rng rng(1234);
  std::uniform_int_distribution<int> len(2, 4), voiced(0, kNumVoiced - 1),
      any(0, kNumToyPhonemes - 1), frames(5, 11);
  for (int i = 0; i < size; ++i) {
    std::vector<int> w;
    const int n = len(rng);
    for (int j = 0; j < n; ++j) w.push_back(j == 1 ? voiced(rng) : any(rng));
    lex.words.push_back(std::move(w));
  }
  for (auto& f : lex.base_frames) f = frames(rng);
  cache.emplace_back(size, std::move(lex));
  return cache.back().second;
}

struct PhonePlan {
  int toy;  // -1 = silence
  int start_frame;
  int end_frame;
  int word;
  double f0_scale;
};

// Per-phone synthesis parameters.
struct Voice {
  std::vector<double> harmonic;  // amplitude per harmonic index 1..H
  std::array<double, 2> noise{};
  double f0 = 0.0;
};

Voice voice_for(const PhonePlan& p, const Speaker& spk, int n_harmonics) {
  Voice v;
  v.harmonic.assign(n_harmonics, 0.0);
  if (p.toy < 0) return v;
  v.f0 = spk.f0 * p.f0_scale;
  if (p.toy >= kNumVoiced) {
    v.noise[p.toy - kNumVoiced] = kNoise[p.toy - kNumVoiced].amplitude;
    return v;
  }
  const Formants& f = kVoiced[p.toy];
  double norm = 0.0;
  for (int h = 0; h < n_harmonics; ++h) {
    const double hz = (h + 1) * v.f0;
    if (hz > kMaxHarmonicHz) break;
    double a = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double center = f.freq[k] * spk.formant_scale;
      const double bw = 90.0 + 0.06 * center;
      a += f.gain[k] * std::exp(-0.5 * std::pow((hz - center) / bw, 2));
    }
    a = (a + 0.02) * std::pow(spk.tilt, h);
    v.harmonic[h] = a;
    norm += a;
  }
  if (norm > 0.0) {
    for (auto& a : v.harmonic) a *= f.amplitude / norm * 3.0;
  }
  return v;
}

// Two-pole resonator driven by white noise.
struct Resonator {
  double a1, a2, gain;
  double y1 = 0.0, y2 = 0.0;

  Resonator(double center, double bandwidth) {
    const double r = std::exp(-std::numbers::pi * bandwidth / kSr);
    a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * center / kSr);
    a2 = -r * r;
    gain = 1.0 - r;
  }
  double step(double x) {
    const double y = gain * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

dsp::Waveform synthesize(const std::vector<PhonePlan>& plan, int total_frames,
                         const Speaker& spk, Rng& rng) {
  const int n = total_frames * kHop - 1;
  const int n_harmonics = static_cast<int>(kMaxHarmonicHz / 60.0);
  std::vector<Voice> voices;
  for (const auto& p : plan) voices.push_back(voice_for(p, spk, n_harmonics));

  std::normal_distribution<double> white(0.0, 1.0);
  std::vector<Resonator> res;
  for (const auto& b : kNoise) res.emplace_back(b.center, b.bandwidth);
  const double vibrato_phase = std::uniform_real_distribution<double>(0.0, 6.28)(rng);

  std::vector<double> out(n, 0.0);
  std::vector<double> harm(n_harmonics);
  double phase = 0.0;
  std::size_t j = 0;
  for (int t = 0; t < n; ++t) {
    while (j + 1 < plan.size() && t >= plan[j].end_frame * kHop) ++j;
    const int s = plan[j].start_frame * kHop, e = plan[j].end_frame * kHop;
    // Blend weight toward the neighbouring phone near each boundary.
    std::size_t other = j;
    double alpha = 1.0;
    if (j > 0 && t < s + kBlend) {
      other = j - 1;
      alpha = 0.5 + 0.5 * (t - s) / kBlend;
    } else if (j + 1 < plan.size() && t >= e - kBlend) {
      other = j + 1;
      alpha = 0.5 + 0.5 * (e - t) / kBlend;
    }
    const Voice& a = voices[j];
    const Voice& b = voices[other];
    double f0 = a.f0 > 0 && b.f0 > 0 ? alpha * a.f0 + (1 - alpha) * b.f0
                                     : (a.f0 > 0 ? a.f0 : b.f0);
    f0 *= 1.0 + 0.04 * std::sin(2.0 * std::numbers::pi * t / (1.3 * kSr) + vibrato_phase);
    double sample = 0.0;
    if (f0 > 0.0) {
      phase += 2.0 * std::numbers::pi * f0 / kSr;
      if (phase > 2.0 * std::numbers::pi * 1024) phase -= 2.0 * std::numbers::pi * 1024;
      for (int h = 0; h < n_harmonics; ++h) {
        const double amp = alpha * a.harmonic[h] + (1 - alpha) * b.harmonic[h];
        if (amp == 0.0) continue;
        if ((h + 1) * f0 > kMaxHarmonicHz) break;
        sample += amp * std::sin((h + 1) * phase);
      }
    }
    for (int k = 0; k < 2; ++k) {
      const double g = alpha * a.noise[k] + (1 - alpha) * b.noise[k];
      const double y = res[k].step(white(rng));
      sample += g * y * 8.0;
    }
    out[t] = sample;
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  dsp::Waveform w;
  w.samples.resize(n);
  const double scale = peak > 0.0 ? 0.6 / peak : 0.0;
  for (int t = 0; t < n; ++t) w.samples[t] = static_cast<float>(out[t] * scale);
  return w;
}

}  // namespace

std::vector<ToyUtterance> generate_toy_corpus(const ToyOptions& o) {
  if (o.n_utterances < 1) fail(ErrorCode::kInvalidInput, "toy corpus needs n_utterances >= 1");
  if (o.n_speakers < 1) fail(ErrorCode::kInvalidInput, "toy corpus needs n_speakers >= 1");
  if (o.lexicon_size < 1) fail(ErrorCode::kInvalidInput, "toy corpus needs a lexicon");
  const auto& inventory = PhonemeInventory::standard();
  const int silence = inventory.silence_id();
  std::vector<int> toy_ids;
  for (int i = 0; i < kNumToyPhonemes; ++i) {
    toy_ids.push_back(inventory.id(PhonemeInventory::toy_symbol(i)));
  }
  const Lexicon& lex = lexicon(o.lexicon_size);
  const int min_frames = static_cast<int>(std::ceil(o.min_seconds * kSr / kHop));
  const int max_frames = static_cast<int>(std::floor(o.max_seconds * kSr / kHop));

  Rng rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ToyUtterance> out;
  for (int u = 0; u < o.n_utterances; ++u) {
    ToyUtterance utt;
    utt.speaker = u % o.n_speakers;
    char id[32];
    std::snprintf(id, sizeof(id), "spk%d_utt%03d", utt.speaker, u);
    utt.id = id;
    const Speaker spk = speaker_for(utt.speaker);
    const int target =
        std::uniform_int_distribution<int>(min_frames + 10, max_frames - 10)(rng);

    std::vector<PhonePlan> plan;
    int frame = std::uniform_int_distribution<int>(3, 8)(rng);
    plan.push_back({-1, 0, frame, kNoWord, 1.0});
    int word = 0;
    for (;;) {
      const auto& phones = lex.words[std::uniform_int_distribution<int>(
          0, static_cast<int>(lex.words.size()) - 1)(rng)];
      std::vector<PhonePlan> wp;
      int f = frame;
      for (int p : phones) {
        const int jitter = std::uniform_int_distribution<int>(-1, 1)(rng);
        const int len = std::max(3, static_cast<int>(std::lround(lex.base_frames[p] * spk.rate)) +
                                        jitter);
        wp.push_back({p, f, f + len, word, 1.0 + 0.05 * (unit(rng) - 0.5) + 0.01 * (p % 5)});
        f += len;
      }
      const int trailing = 4;
      if (word >= 3 && f + trailing > target) break;
      if (f + trailing > max_frames) break;
      plan.insert(plan.end(), wp.begin(), wp.end());
      utt.alignment.words.push_back("w" + std::to_string(&phones - lex.words.data()));
      frame = f;
      ++word;
      if (unit(rng) < o.pause_probability) {
        const int pause = std::uniform_int_distribution<int>(4, 12)(rng);
        plan.push_back({-1, frame, frame + pause, kNoWord, 1.0});
        frame += pause;
      }
    }
    if (plan.back().toy >= 0) {
      const int tail = std::uniform_int_distribution<int>(3, 8)(rng);
      plan.push_back({-1, frame, frame + tail, kNoWord, 1.0});
      frame += tail;
    }
    if (frame < min_frames) {
      plan.back().end_frame += min_frames - frame;
      frame = min_frames;
    }

    utt.wave = synthesize(plan, frame, spk, rng);
    utt.alignment.id = utt.id;
    for (const auto& p : plan) {
      utt.alignment.entries.push_back(
          {p.toy < 0 ? silence : toy_ids[p.toy], p.start_frame, p.end_frame, p.word});
    }
    for (std::size_t w = 0; w < utt.alignment.words.size(); ++w) {
      if (w > 0) utt.transcript += ' ';
      utt.transcript += utt.alignment.words[w];
    }
    validate_alignment(utt.alignment.entries, utt.id);
    out.push_back(std::move(utt));
  }
  return out;
}

std::vector<ToyUtterance> generate_toy_corpus(int n_utterances, int n_speakers,
                                              std::uint64_t seed) {
  ToyOptions o;
  o.n_utterances = n_utterances;
  o.n_speakers = n_speakers;
  o.seed = seed;
  return generate_toy_corpus(o);
}

ToyCorpusPaths write_toy_corpus(const std::filesystem::path& out_dir,
                                const std::vector<ToyUtterance>& utterances,
                                const PhonemeInventory& inventory) {
  ToyCorpusPaths paths{out_dir / "wav", out_dir / "transcripts.tsv", out_dir / "alignment.jsonl"};
  std::error_code ec;
  std::filesystem::create_directories(paths.audio_dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + paths.audio_dir.string());
  std::ofstream tsv(paths.transcripts);
  if (!tsv) fail(ErrorCode::kIoError, "cannot write " + paths.transcripts.string());
  std::vector<UtteranceAlignment> aligns;
  for (const auto& u : utterances) {
    dsp::write_wav(paths.audio_dir / (u.id + ".wav"), u.wave);
    tsv << u.id << '\t' << u.transcript << '\n';
    aligns.push_back(u.alignment);
  }
  write_alignment(paths.alignment, aligns, inventory);
  return paths;
}

}  // namespace rptts::corpus

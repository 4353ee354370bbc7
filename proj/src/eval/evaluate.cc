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

#include "rptts/eval/evaluate.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "rptts/common/error.h"
#include "rptts/common/kv_config.h"
#include "rptts/dsp/wav.h"
#include "rptts/eval/metrics.h"

namespace rptts::eval {
namespace {

dsp::MfccSequence cepstra(const dsp::Waveform& w, const dsp::SpectrogramConfig& cfg, int begin,
                          int end) {
  dsp::MelSpectrogram mel = dsp::mel_spectrogram(w, cfg);
  end = std::min(end, mel.num_frames());
  begin = std::min(begin, end - 1);
  if (begin > 0 || end < mel.num_frames()) {
    mel.frames = mel.frames.middleRows(begin, end - begin).eval();
  }
  return dsp::mfcc(mel);
}

EvalRecord evaluate_one(const corpus::TrainingExample& ex, const std::string& method,
                        const model::Generator* generator, const EvalOptions& opt) {
  const corpus::SegmentSpec& spec = *ex.segmentation;
  const int hop = opt.spectrogram.hop;
  EvalRecord rec;
  rec.id = ex.id;
  rec.method = method;
  rec.insert_frames = spec.frames_i.size();
  rec.insert_words = spec.words_i.size();
  rec.insert_phonemes = spec.phones_i.size();

  dsp::Waveform insert;
  if (method == kMethodModel) {
    if (generator == nullptr) fail(ErrorCode::kInvalidInput, "method 'model' needs a checkpoint");
    corpus::MatrixF mel;
    int l_b = 0, l_i = 0;
    {
      nn::NoGradGuard no_grad;
      const auto out = generator->forward_infer(corpus::apply_segmentation(ex, spec), {});
      mel = model::to_matrix(out.mel);
      l_b = out.l_b;
      l_i = out.l_i;
    }
    rec.output_frames = static_cast<int>(mel.rows());
    insert = vocode_span(mel, l_b, l_b + l_i, opt.spectrogram, opt.griffin_lim_iterations);
  } else if (method == kMethodAverageMel) {
    const corpus::MatrixF mel =
        average_mel_fill(corpus::apply_segmentation(ex, spec).x_in, spec);
    rec.output_frames = static_cast<int>(mel.rows());
    insert = vocode_span(mel, spec.frames_i.begin, spec.frames_i.end, opt.spectrogram,
                         opt.griffin_lim_iterations);
  } else if (method == kMethodGtMel) {
    rec.output_frames = ex.num_frames();
    insert = vocode_span(ex.mel, spec.frames_i.begin, spec.frames_i.end, opt.spectrogram,
                         opt.griffin_lim_iterations);
  } else {
    fail(ErrorCode::kInvalidInput, "unknown evaluation method '" + method + "'");
  }

  dsp::Waveform gt;
  gt.samples = ex.waveform;
  const dsp::Waveform stitched = stitch(insert, gt, spec, hop);
  if (!opt.stitched_dir.empty()) {
    std::filesystem::create_directories(opt.stitched_dir);
    dsp::write_wav(opt.stitched_dir / (ex.id + "." + method + ".wav"), stitched);
  }
  if (opt.region_only) {
    const int b = spec.frames_b.size();
    const int ins_frames = std::max<int>(1, static_cast<int>(insert.samples.size()) / hop);
    rec.mcd = mcd(cepstra(stitched, opt.spectrogram, b, b + ins_frames),
                  cepstra(gt, opt.spectrogram, spec.frames_i.begin,
                          std::max(spec.frames_i.end, spec.frames_i.begin + 1)));
  } else {
    rec.mcd = mcd(cepstra(stitched, opt.spectrogram, 0, 1 << 30),
                  cepstra(gt, opt.spectrogram, 0, 1 << 30));
  }
  return rec;
}

}  // namespace

std::string length_bucket(int insert_phonemes) {
  if (insert_phonemes < 10) return "short";
  if (insert_phonemes <= 20) return "medium";
  return "long";
}

std::vector<EvalAggregate> EvalReport::aggregates() const {
  std::vector<std::string> methods;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  std::vector<EvalAggregate> out;
  for (const auto& m : methods) {
    for (const char* subset : {"all", "short", "medium", "long"}) {
      EvalAggregate a{m, subset, 0, 0.0};
      for (const auto& r : records) {
        if (r.method != m) continue;
        if (a.subset != "all" && length_bucket(r.insert_phonemes) != a.subset) continue;
        a.mean_mcd += r.mcd;
        ++a.count;
      }
      if (a.count == 0) continue;
      a.mean_mcd /= a.count;
      out.push_back(a);
    }
  }
  return out;
}

double EvalReport::mean(const std::string& method) const {
  for (const auto& a : aggregates()) {
    if (a.method == method && a.subset == "all") return a.mean_mcd;
  }
  fail(ErrorCode::kInvalidInput, "no records for method '" + method + "'");
}

void EvalReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out << "id,method,mcd,insert_frames,insert_words,insert_phonemes,output_frames\n";
  for (const auto& r : records) {
    out << r.id << ',' << r.method << ',' << format_double(r.mcd) << ',' << r.insert_frames
        << ',' << r.insert_words << ',' << r.insert_phonemes << ',' << r.output_frames << "\n";
  }
}

std::string EvalReport::summary_text() const {
  std::ostringstream out;
  out << "method,subset,count,mean_mcd\n";
  for (const auto& a : aggregates()) {
    out << a.method << ',' << a.subset << ',' << a.count << ',' << format_double(a.mean_mcd)
        << "\n";
  }
  return out.str();
}

dsp::Waveform vocode_span(const corpus::MatrixF& mel, int begin, int end,
                          const dsp::SpectrogramConfig& cfg, int iterations) {
  if (begin < 0 || end < begin || end > mel.rows()) {
    fail(ErrorCode::kInvalidInput, "vocode span out of range");
  }
  dsp::Waveform out;
  if (end == begin) return out;
  dsp::MelSpectrogram m;
  m.frames = corpus::to_double(mel);
  m.config = cfg;
  const dsp::Waveform full = dsp::griffin_lim(m, iterations);
  const long from = static_cast<long>(begin) * cfg.hop;
  const long to = static_cast<long>(end) * cfg.hop;
  out.samples.assign(to - from, 0.0f);
  for (long s = from; s < std::min<long>(to, full.samples.size()); ++s) {
    out.samples[s - from] = full.samples[s];
  }
  return out;
}

EvalReport evaluate_corpus(const std::vector<corpus::TrainingExample>& examples,
                           const model::Generator* generator, const EvalOptions& options) {
  for (const auto& ex : examples) {
    if (!ex.segmentation) {
      fail(ErrorCode::kMissingSegmentation, "'" + ex.id + "' has no frozen segmentation");
    }
    if (ex.waveform.empty()) {
      fail(ErrorCode::kInvalidInput, "'" + ex.id + "' has no stored waveform");
    }
  }
  const std::size_t per = options.methods.size();
  std::vector<EvalRecord> records(examples.size() * per);
  std::vector<std::exception_ptr> errors(records.size());
  auto work = [&](std::size_t k) {
    try {
      records[k] = evaluate_one(examples[k / per], options.methods[k % per], generator, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t k = 0; k < records.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < records.size(); k += jobs) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return {std::move(records)};
}

}  // namespace rptts::eval

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

#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "rptts/common/error.h"
#include "rptts/common/kv_config.h"
#include "rptts/corpus/alignment.h"
#include "rptts/corpus/phonemes.h"
#include "rptts/corpus/prepare.h"
#include "rptts/corpus/store.h"
#include "rptts/corpus/toy.h"
#include "rptts/dsp/wav.h"
#include "rptts/eval/evaluate.h"
#include "rptts/eval/metrics.h"
#include "rptts/train/trainer.h"
#include "rptts/verify/suites.h"

namespace rptts::cli {
namespace {

namespace fs = std::filesystem;

struct ToyArgs {
  std::string out;
  int utterances = 8;
  int speakers = 4;
  std::uint64_t seed = 7;
};

struct PrepareArgs {
  std::string audio, align, out;
};

struct TrainArgs {
  std::string store, config, out, resume;
  bool desk_scale = false;
  long long stop_after = -1;
};

struct InsertArgs {
  std::string checkpoint, wav, align, id, replace, out;
  int gl_iters = dsp::kDefaultGriffinLimIterations;
};

struct EvalArgs {
  std::string checkpoint, store, methods = "model,average-mel,gt-mel-vocoder", out,
                                  stitched_dir;
  bool assert_ordering = false;
  bool region_only = false;
  int jobs = 1;
  int gl_iters = dsp::kDefaultGriffinLimIterations;
};

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 1;
};

void echo(std::ostream& out, const std::string& command, const KvConfig& kv) {
  out << "# " << command << " resolved configuration\n" << kv.to_text();
  if (kv.entries().empty() || kv.to_text().back() != '\n') out << '\n';
  out << "# end configuration\n";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

int cmd_toygen(const ToyArgs& a, std::ostream& out) {
  KvConfig kv;
  kv.set("toygen.out", a.out);
  kv.set("toygen.utterances", std::to_string(a.utterances));
  kv.set("toygen.speakers", std::to_string(a.speakers));
  kv.set("toygen.seed", std::to_string(a.seed));
  echo(out, "toygen", kv);
  corpus::ToyOptions opts;
  opts.n_utterances = a.utterances;
  opts.n_speakers = a.speakers;
  opts.seed = a.seed;
  const auto utts = corpus::generate_toy_corpus(opts);
  const auto paths = corpus::write_toy_corpus(a.out, utts);
  out << "audio " << paths.audio_dir.string() << "\n"
      << "transcripts " << paths.transcripts.string() << "\n"
      << "alignment " << paths.alignment.string() << "\n"
      << "utterances " << utts.size() << "\n";
  return 0;
}

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  corpus::PrepareOptions opts;
  KvConfig kv;
  kv.set("prepare.audio", a.audio);
  kv.set("prepare.align", a.align);
  kv.set("prepare.out", a.out);
  kv.set("prepare.keep_waveform", opts.keep_waveform ? "true" : "false");
  kv.set("prepare.freeze_segmentation", opts.freeze_segmentation ? "true" : "false");
  echo(out, "prepare", kv);
  corpus::PrepareReport report;
  const corpus::FeatureStore store = corpus::prepare_corpus(a.audio, a.align, opts, &report);
  for (const auto& line : report.lines) {
    out << (line.ok ? "ok   " : "skip ") << line.id;
    if (!line.message.empty()) out << ": " << line.message;
    out << '\n';
  }
  out << "valid " << report.valid() << " of " << report.lines.size() << '\n';
  if (store.examples.empty()) {
    fail(ErrorCode::kInvalidInput, "no valid utterances under " + a.audio);
  }
  corpus::write_store(a.out, store);
  out << "store " << a.out << '\n';
  return 0;
}

train::TrainConfig resolve_train_config(const std::string& config_path, bool desk) {
  const train::TrainConfig base = desk ? train::TrainConfig::desk() : train::TrainConfig::full_scale();
  if (config_path.empty()) return base;
  return train::TrainConfig::from_kv(KvConfig::load(config_path), base);
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const train::TrainConfig config = resolve_train_config(a.config, a.desk_scale);
  config.validate();
  echo(out, "train", config.to_kv());
  const corpus::FeatureStore store = corpus::read_store(a.store);
  train::TrainState state = a.resume.empty() ? train::init_state(config, store.examples)
                                             : train::load_checkpoint(a.resume, config);
  if (!a.resume.empty()) out << "resumed " << a.resume << " at step " << state.step << '\n';
  train::LoopOptions loop;
  loop.out_dir = a.out;
  loop.stop_after = a.stop_after;
  loop.log = &out;
  train::train_loop(state, store.examples, loop);
  out << "finished at step " << state.step << '\n';
  return 0;
}

// "i:j:phones" with phones separated by spaces.
struct ReplaceSpec {
  int begin = 0, end = 0;
  std::vector<int> phonemes;
};

ReplaceSpec parse_replace(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos) {
    fail(ErrorCode::kInvalidInput, "--replace expects i:j:phones, got '" + text + "'");
  }
  ReplaceSpec r;
  try {
    r.begin = std::stoi(text.substr(0, c1));
    r.end = std::stoi(text.substr(c1 + 1, c2 - c1 - 1));
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidInput, "--replace word indices must be integers: '" + text + "'");
  }
  r.phonemes = corpus::PhonemeInventory::standard().parse(text.substr(c2 + 1));
  return r;
}

int cmd_insert(const InsertArgs& a, std::ostream& out) {
  const ReplaceSpec rep = parse_replace(a.replace);
  const std::string id = a.id.empty() ? fs::path(a.wav).stem().string() : a.id;
  KvConfig kv;
  kv.set("insert.checkpoint", a.checkpoint);
  kv.set("insert.wav", a.wav);
  kv.set("insert.align", a.align);
  kv.set("insert.id", id);
  kv.set("insert.replace", a.replace);
  kv.set("insert.out", a.out);
  kv.set("insert.gl_iters", std::to_string(a.gl_iters));
  echo(out, "insert", kv);

  const auto& inventory = corpus::PhonemeInventory::standard();
  const auto alignments = corpus::load_alignment(a.align, inventory);
  const auto it = std::find_if(alignments.begin(), alignments.end(),
                               [&](const corpus::UtteranceAlignment& u) { return u.id == id; });
  if (it == alignments.end()) fail(ErrorCode::kInvalidInput, "no alignment for '" + id + "'");
  corpus::PrepareOptions popts;
  popts.freeze_segmentation = false;
  const dsp::Waveform wave = dsp::load_audio(a.wav);
  const corpus::TrainingExample ex =
      corpus::build_example(*it, wave, popts, inventory.silence_id());
  const corpus::Replacement r = corpus::make_replacement(ex, rep.begin, rep.end, rep.phonemes);

  const train::TrainState state = train::load_checkpoint(a.checkpoint);
  model::GeneratorOutput g;
  {
    nn::NoGradGuard no_grad;
    g = state.models->g.forward_infer(r.input, nn::Context{});
  }
  const dsp::SpectrogramConfig& spec = popts.spectrogram;
  const dsp::Waveform insert =
      eval::vocode_span(model::to_matrix(g.mel), g.l_b, g.l_b + g.l_i, spec, a.gl_iters);
  dsp::Waveform gt;
  gt.samples = ex.waveform;
  gt.sample_rate = spec.sample_rate;
  const dsp::Waveform result = eval::stitch(insert, gt, r.original, spec.hop);
  dsp::write_wav(a.out, result);

  out << "predicted durations";
  for (std::size_t k = 0; k < r.input.phoneme_segments.size(); ++k) {
    if (r.input.phoneme_segments[k] != corpus::Segment::kInsert) continue;
    out << ' ' << inventory.symbol(r.input.phonemes[k]) << '='
        << g.variance.durations_used[k];
  }
  out << "\nL_b " << g.l_b << " L_i " << g.l_i << " L_a " << g.l_a << "\nL_out "
      << g.l_b + g.l_i + g.l_a << "\nsamples " << result.samples.size() << "\nwrote " << a.out
      << '\n';
  return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  eval::EvalOptions opts;
  opts.methods = split(a.methods, ',');
  opts.region_only = a.region_only;
  opts.jobs = a.jobs;
  opts.griffin_lim_iterations = a.gl_iters;
  opts.stitched_dir = a.stitched_dir;
  for (const auto& m : opts.methods) {
    if (m != eval::kMethodModel && m != eval::kMethodAverageMel && m != eval::kMethodGtMel) {
      fail(ErrorCode::kInvalidConfig, "unknown method '" + m + "'");
    }
  }
  const bool needs_model =
      std::find(opts.methods.begin(), opts.methods.end(), eval::kMethodModel) != opts.methods.end();
  if (needs_model && a.checkpoint.empty()) {
    fail(ErrorCode::kInvalidConfig, "method 'model' needs --checkpoint");
  }
  KvConfig kv;
  kv.set("eval.checkpoint", a.checkpoint);
  kv.set("eval.store", a.store);
  kv.set("eval.methods", a.methods);
  kv.set("eval.out", a.out);
  kv.set("eval.region_only", a.region_only ? "true" : "false");
  kv.set("eval.stitched_dir", a.stitched_dir);
  kv.set("eval.jobs", std::to_string(a.jobs));
  kv.set("eval.gl_iters", std::to_string(a.gl_iters));
  kv.set("eval.assert_ordering", a.assert_ordering ? "true" : "false");
  echo(out, "eval", kv);

  const corpus::FeatureStore store = corpus::read_store(a.store);
  std::optional<train::TrainState> state;
  if (needs_model) state.emplace(train::load_checkpoint(a.checkpoint));
  const eval::EvalReport report =
      eval::evaluate_corpus(store.examples, state ? &state->models->g : nullptr, opts);
  if (!a.out.empty()) {
    report.write_csv(a.out);
    out << "wrote " << a.out << '\n';
  }
  out << report.summary_text();
  if (a.assert_ordering) {
    const double gt = report.mean(eval::kMethodGtMel);
    const double model = report.mean(eval::kMethodModel);
    const double avg = report.mean(eval::kMethodAverageMel);
    const bool ok = gt < model && model < avg;
    out << "ordering " << (ok ? "holds" : "VIOLATED") << ": gt-mel-vocoder " << gt
        << " < model " << model << " < average-mel " << avg << '\n';
    if (!ok) return 1;
  }
  return 0;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  KvConfig kv;
  kv.set("verify.suite", a.suite);
  kv.set("verify.seed", std::to_string(a.seed));
  echo(out, "verify", kv);
  const bool all = a.suite == "all";
  bool ok = true;
  auto report = [&](const verify::SuiteResult& r) {
    r.print(out);
    ok = ok && r.passed();
  };
  if (all || a.suite == "grads") report(verify::run_grad_suite(a.seed));
  if (all || a.suite == "mining") report(verify::run_mining_suite(a.seed));
  if (all || a.suite == "dtw") report(verify::run_dtw_suite(a.seed));
  if (all || a.suite == "mfcc") report(verify::run_mfcc_suite(a.seed));
  out << (ok ? "verify: all suites passed" : "verify: FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speech editing: insert or replace words inside a recording", "rptts"};
  app.require_subcommand(1);

  ToyArgs toy;
  auto* toygen = app.add_subcommand("toygen", "Write a synthetic toy corpus");
  toygen->add_option("--out", toy.out, "Output directory")->required();
  toygen->add_option("--utterances", toy.utterances)->check(CLI::PositiveNumber);
  toygen->add_option("--speakers", toy.speakers)->check(CLI::PositiveNumber);
  toygen->add_option("--seed", toy.seed);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "Extract features into a store");
  prepare->add_option("--audio", prep.audio, "Directory of <id>.wav")->required();
  prepare->add_option("--align", prep.align, "Alignment JSONL")->required();
  prepare->add_option("--out", prep.out, "Store path")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train the generator and its critics");
  train->add_option("--store", tr.store)->required();
  train->add_option("--config", tr.config, "key = value overrides");
  train->add_option("--out", tr.out, "Checkpoint and metrics directory")->required();
  train->add_flag("--desk-scale", tr.desk_scale, "Small model and short schedule");
  train->add_option("--resume", tr.resume, "Checkpoint to continue from");
  train->add_option("--stop-after", tr.stop_after, "Stop once this step is reached");

  InsertArgs ins;
  auto* insert = app.add_subcommand("insert", "Replace or insert words in a recording");
  insert->add_option("--checkpoint", ins.checkpoint)->required();
  insert->add_option("--wav", ins.wav)->required();
  insert->add_option("--align", ins.align)->required();
  insert->add_option("--id", ins.id, "Alignment record (default: wav stem)");
  insert->add_option("--replace", ins.replace, "i:j:phones replaces words [i, j)")->required();
  insert->add_option("--out", ins.out)->required();
  insert->add_option("--gl-iters", ins.gl_iters)->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* evaluate = app.add_subcommand("eval", "Mel cepstral distortion of each method");
  evaluate->add_option("--checkpoint", ev.checkpoint);
  evaluate->add_option("--store", ev.store)->required();
  evaluate->add_option("--methods", ev.methods, "Comma separated");
  evaluate->add_option("--out", ev.out, "Per-utterance CSV");
  evaluate->add_flag("--assert-ordering", ev.assert_ordering);
  evaluate->add_flag("--region-only", ev.region_only);
  evaluate->add_option("--stitched-dir", ev.stitched_dir);
  evaluate->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber);
  evaluate->add_option("--gl-iters", ev.gl_iters)->check(CLI::PositiveNumber);

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run the built-in correctness suites");
  verify->add_option("--suite", ver.suite)
      ->check(CLI::IsMember({"grads", "mining", "dtw", "mfcc", "all"}));
  verify->add_option("--seed", ver.seed);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*toygen) return cmd_toygen(toy, out);
    if (*prepare) return cmd_prepare(prep, out);
    if (*train) return cmd_train(tr, out);
    if (*insert) return cmd_insert(ins, out);
    if (*evaluate) return cmd_eval(ev, out);
    if (*verify) return cmd_verify(ver, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rptts::cli

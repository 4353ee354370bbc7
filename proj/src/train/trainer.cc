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

#include "rptts/train/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rptts/common/error.h"
#include "rptts/losses/losses.h"
#include "rptts/nn/checkpoint_io.h"

namespace rptts::train {
namespace {

using nn::Tensor;

constexpr std::uint64_t kStreamSalt = 0x9e3779b97f4a7c15ULL;

double finite_or_throw(const Tensor& t, long long step, const char* what) {
  const double v = static_cast<double>(t.item());
  if (!std::isfinite(v)) {
    fail(ErrorCode::kNonFiniteLoss,
         "step " + std::to_string(step) + ": " + what + " = " + std::to_string(v));
  }
  return v;
}

void check_finite_values(const Tensor& t, long long step, const std::string& id) {
  for (auto v : t.values()) {
    if (!std::isfinite(static_cast<double>(v))) {
      fail(ErrorCode::kNonFiniteLoss,
           "step " + std::to_string(step) + ": generator output for '" + id + "' is not finite");
    }
  }
}

struct Sample {
  const corpus::TrainingExample* ex = nullptr;
  corpus::SegmentSpec spec;
  model::Teacher teacher;
  Tensor real;  // (L, d_mel), constant
  model::GeneratorOutput out;
};

std::vector<nn::ParamStore*> stores(Models& m) {
  return {&m.g.params(), &m.dg.params(), &m.dl.params(), &m.fs.params()};
}

void hash_all(Models& m, std::uint64_t* out) {
  const auto s = stores(m);
  for (int i = 0; i < 4; ++i) out[i] = s[i]->hash();
}

// Runs `body` as one sub-step, recording hashes when asked.
template <typename F>
void sub_step(Models& m, const char* name, std::vector<SubStepHashes>* hashes, F&& body) {
  SubStepHashes h;
  h.name = name;
  if (hashes) hash_all(m, h.before);
  body();
  if (hashes) {
    hash_all(m, h.after);
    hashes->push_back(h);
  }
}

// Only `active` accumulates parameter gradients.
void train_only(Models& m, nn::ParamStore* active) {
  for (auto* s : stores(m)) {
    s->zero_grad();
    s->set_trainable(s == active);
  }
}

void optimizer_step(nn::ParamStore& ps, nn::Adam& adam, double lr, double clip) {
  if (clip > 0.0) ps.clip_grad_norm(clip);
  adam.step(ps, lr);
  ps.zero_grad();
}

Tensor mean_of(const std::vector<Tensor>& xs) {
  return nn::scale(nn::add_all(xs), nn::Real(1) / static_cast<nn::Real>(xs.size()));
}

Tensor insert_rows(const Tensor& mel, const corpus::Range& r) {
  return nn::slice_rows(mel, r.begin, r.end);
}

void append_windows(losses::Windows w, int example, bool synthesized, std::vector<Tensor>& out,
                    std::vector<losses::WindowSource>* table) {
  for (std::size_t j = 0; j < w.windows.size(); ++j) {
    out.push_back(std::move(w.windows[j]));
    if (table) table->push_back({example, synthesized, w.offsets[j]});
  }
}

}  // namespace

Models::Models(const model::ModelConfig& cfg, Rng& init_rng)
    : g(cfg, init_rng), dg("dg", cfg, init_rng), dl("dl", cfg, init_rng), fs(cfg, init_rng) {}

TrainState init_state(const TrainConfig& config,
                      const std::vector<corpus::TrainingExample>& examples) {
  config.validate();
  if (examples.empty()) fail(ErrorCode::kInvalidInput, "training needs at least one example");
  TrainState s;
  s.config = config;
  Rng init_rng(config.seed);
  s.models = std::make_unique<Models>(config.model, init_rng);
  s.models->g.stats = model::NormStats::fit(examples);
  s.adam_g = nn::Adam(s.models->g.params());
  s.adam_dg = nn::Adam(s.models->dg.params());
  s.adam_dl = nn::Adam(s.models->dl.params());
  s.adam_fs = nn::Adam(s.models->fs.params());
  s.rng = Rng(config.seed ^ kStreamSalt);
  return s;
}

std::string metrics_csv_header() {
  return "step,phase,rec,pitch,energy,duration,adv_global,feat_global,adv_local,feat_local,"
         "style,d_global,d_local,style_extractor,total,lr_generator,lr_aux,grad_norm,windows,"
         "wall_ms";
}

std::string metrics_csv_row(const StepMetrics& m) {
  std::ostringstream out;
  out << m.step << ',' << m.phase;
  for (double v : {m.rec, m.pitch, m.energy, m.duration, m.adv_global, m.feat_global,
                   m.adv_local, m.feat_local, m.style, m.d_global, m.d_local, m.style_extractor,
                   m.total, m.lr_generator, m.lr_aux, m.grad_norm}) {
    out << ',' << format_double(v);
  }
  out << ',' << m.windows << ',' << format_double(m.wall_ms);
  return out.str();
}

std::vector<int> draw_batch(TrainState& state, int n_examples) {
  if (n_examples < 1) fail(ErrorCode::kInvalidInput, "cannot draw a batch from no examples");
  const int b = state.config.batch_size;
  std::vector<int> idx(n_examples);
  for (int i = 0; i < n_examples; ++i) idx[i] = i;
  std::vector<int> batch;
  while (static_cast<int>(batch.size()) < b) {
    const int take = std::min(b - static_cast<int>(batch.size()), n_examples);
    for (int i = 0; i < take; ++i) {
      const int j = std::uniform_int_distribution<int>(i, n_examples - 1)(state.rng);
      std::swap(idx[i], idx[j]);
      batch.push_back(idx[i]);
    }
  }
  return batch;
}

StepMetrics train_step(TrainState& state, const std::vector<corpus::TrainingExample>& examples,
                       const std::vector<int>& batch, std::vector<SubStepHashes>* hashes) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainConfig& cfg = state.config;
  const auto& mc = cfg.model;
  const auto& w = cfg.weights;
  Models& m = *state.models;
  const long long step = state.step;
  StepMetrics met;
  met.step = step + 1;
  met.phase = cfg.phase_of(step);
  met.lr_generator = nn::lr_at(cfg.generator_lr, step);
  met.lr_aux = nn::lr_at(cfg.aux_lr, step);
  const auto pad = static_cast<nn::Real>(std::log(mc.log_floor));
  const auto n_batch = static_cast<nn::Real>(batch.size());
  if (batch.empty()) fail(ErrorCode::kInvalidInput, "empty batch");

  // Generator forward passes, reused by every sub-step of this iteration.
  train_only(m, &m.g.params());
  nn::Context ctx{true, &state.rng};
  std::vector<Sample> samples;
  for (int b : batch) {
    Sample s;
    s.ex = &examples.at(b);
    s.spec = corpus::sample_segmentation(*s.ex, state.rng);
    s.teacher = model::make_teacher(*s.ex, m.g.stats);
    s.real = model::to_tensor(s.ex->mel);
    s.out = m.g.forward(corpus::apply_segmentation(*s.ex, s.spec), model::Mode::kTrain,
                        &s.teacher, ctx);
    check_finite_values(s.out.mel, met.step, s.ex->id);
    samples.push_back(std::move(s));
  }

  losses::LossParts parts;
  {
    std::vector<Tensor> rec, pitch, energy, duration;
    for (const auto& s : samples) {
      rec.push_back(losses::l1_reconstruction(s.real, s.out.mel, s.spec.frames_i,
                                              static_cast<nn::Real>(w.lambda1)));
      auto v = losses::variance_losses(s.out.variance, s.teacher);
      pitch.push_back(v.pitch);
      energy.push_back(v.energy);
      duration.push_back(v.duration);
    }
    parts.rec = mean_of(rec);
    parts.pitch = mean_of(pitch);
    parts.energy = mean_of(energy);
    parts.duration = mean_of(duration);
  }

  if (met.phase == 2) {
    std::vector<Tensor> real_mels, fake_mels_detached;
    std::vector<Tensor> real_local, fake_local_detached;
    std::vector<Tensor> style_real, style_fake_detached;
    std::vector<losses::WindowSource> style_table;
    int max_len = 1;
    for (int b = 0; b < static_cast<int>(samples.size()); ++b) {
      const auto& s = samples[b];
      const Tensor fake = s.out.mel.detach();
      real_mels.push_back(s.real);
      fake_mels_detached.push_back(fake);
      max_len = std::max(max_len, s.real.rows());
      const auto real_i = losses::sample_windows(insert_rows(s.real, s.spec.frames_i),
                                                 mc.window_len, mc.window_hop, pad);
      const int j = static_cast<int>(real_i.windows.size());
      append_windows(real_i, b, false, real_local, nullptr);
      append_windows(losses::sample_windows(insert_rows(fake, s.spec.frames_i), mc.window_len,
                                            mc.window_hop, pad),
                     b, true, fake_local_detached, nullptr);
      append_windows(
          losses::sample_windows_random(s.real, mc.window_len, std::max(2, j), state.rng, pad), b,
          false, style_real, &style_table);
    }
    std::vector<losses::WindowSource> synth_table;
    for (int b = 0; b < static_cast<int>(samples.size()); ++b) {
      const auto& s = samples[b];
      append_windows(losses::sample_windows(insert_rows(fake_mels_detached[b], s.spec.frames_i),
                                            mc.window_len, mc.window_hop, pad),
                     b, true, style_fake_detached, &synth_table);
    }
    style_table.insert(style_table.end(), synth_table.begin(), synth_table.end());
    met.windows = static_cast<int>(real_local.size());
    const auto n_windows = static_cast<nn::Real>(real_local.size());

    sub_step(m, "dg", hashes, [&] {
      train_only(m, &m.dg.params());
      const auto real = m.dg.global(real_mels, max_len);
      const auto fake = m.dg.global(fake_mels_detached, max_len);
      Tensor loss = losses::lsgan_d(real.scores, fake.scores);
      met.d_global = finite_or_throw(loss, met.step, "d_global");
      loss.backward();
      optimizer_step(m.dg.params(), state.adam_dg, met.lr_aux, cfg.grad_clip);
    });

    sub_step(m, "dl", hashes, [&] {
      train_only(m, &m.dl.params());
      const auto real = m.dl.local(real_local);
      const auto fake = m.dl.local(fake_local_detached);
      Tensor loss = losses::lsgan_d(real.scores, fake.scores, n_batch);
      met.d_local = finite_or_throw(loss, met.step, "d_local");
      loss.backward();
      optimizer_step(m.dl.params(), state.adam_dl, met.lr_aux, cfg.grad_clip);
    });

    sub_step(m, "fs", hashes, [&] {
      train_only(m, &m.fs.params());
      std::vector<Tensor> all = style_real;
      all.insert(all.end(), style_fake_detached.begin(), style_fake_detached.end());
      const auto triplets = losses::mine_triplets_style(style_table);
      if (triplets.empty()) return;
      Tensor loss = losses::triplet_loss(m.fs(all), triplets, static_cast<nn::Real>(w.margin));
      met.style_extractor = finite_or_throw(loss, met.step, "style_extractor");
      loss.backward();
      optimizer_step(m.fs.params(), state.adam_fs, met.lr_aux, cfg.grad_clip);
    });

    // Generator-side adversarial and style terms through the updated networks.
    train_only(m, &m.g.params());
    std::vector<Tensor> fake_mels, fake_local, style_fake;
    for (const auto& s : samples) {
      fake_mels.push_back(s.out.mel);
      append_windows(losses::sample_windows(insert_rows(s.out.mel, s.spec.frames_i),
                                            mc.window_len, mc.window_hop, pad),
                     0, true, fake_local, nullptr);
    }
    style_fake = fake_local;
    std::vector<Tensor> real_g_feats, real_l_feats;
    Tensor real_style;
    {
      nn::NoGradGuard no_grad;
      real_g_feats = m.dg.global(real_mels, max_len).features;
      real_l_feats = m.dl.local(real_local).features;
      real_style = m.fs(style_real);
    }
    const auto fake_g = m.dg.global(fake_mels, max_len);
    parts.adv_global = losses::lsgan_g(fake_g.scores);
    parts.feat_global = losses::feature_matching(real_g_feats, fake_g.features);
    const auto fake_l = m.dl.local(fake_local);
    parts.adv_local = losses::lsgan_g(fake_l.scores, n_batch);
    parts.feat_local = losses::feature_matching(real_l_feats, fake_l.features,
                                                n_windows / n_batch);
    const auto triplets = losses::mine_triplets_generator(style_table);
    if (!triplets.empty()) {
      const Tensor emb = nn::concat_rows({real_style, m.fs(style_fake)});
      parts.style = losses::triplet_loss(emb, triplets, static_cast<nn::Real>(w.margin));
    }
    met.adv_global = finite_or_throw(parts.adv_global, met.step, "adv_global");
    met.feat_global = finite_or_throw(parts.feat_global, met.step, "feat_global");
    met.adv_local = finite_or_throw(parts.adv_local, met.step, "adv_local");
    met.feat_local = finite_or_throw(parts.feat_local, met.step, "feat_local");
    if (parts.style.defined()) met.style = finite_or_throw(parts.style, met.step, "style");
  }

  met.rec = finite_or_throw(parts.rec, met.step, "rec");
  met.pitch = finite_or_throw(parts.pitch, met.step, "pitch");
  met.energy = finite_or_throw(parts.energy, met.step, "energy");
  met.duration = finite_or_throw(parts.duration, met.step, "duration");
  sub_step(m, "g", hashes, [&] {
    Tensor total = losses::total_generator_loss(parts, w, met.phase);
    met.total = finite_or_throw(total, met.step, "total");
    total.backward();
    met.grad_norm = m.g.params().grad_norm();
    if (!std::isfinite(met.grad_norm)) {
      fail(ErrorCode::kNonFiniteLoss, "step " + std::to_string(met.step) + ": generator gradient");
    }
    optimizer_step(m.g.params(), state.adam_g, met.lr_generator, cfg.grad_clip);
  });
  for (auto* s : stores(m)) s->set_trainable(true);

  state.step += 1;
  if (!cfg.deterministic) {
    met.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
  }
  return met;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, long long step) {
  return dir / ("ckpt_" + std::to_string(step) + ".bin");
}

std::vector<StepMetrics> train_loop(TrainState& state,
                                    const std::vector<corpus::TrainingExample>& examples,
                                    const LoopOptions& options) {
  if (examples.empty()) fail(ErrorCode::kInvalidInput, "training store is empty");
  const TrainConfig& cfg = state.config;
  const long long end = options.stop_after >= 0
                            ? std::min(options.stop_after, cfg.total_steps())
                            : cfg.total_steps();
  std::ofstream csv;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    const auto path = options.out_dir / "metrics.csv";
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    csv.open(path, std::ios::app);
    if (!csv) fail(ErrorCode::kIoError, "cannot write " + path.string());
    if (fresh) csv << metrics_csv_header() << "\n";
  }
  std::vector<StepMetrics> out;
  while (state.step < end) {
    const auto batch = draw_batch(state, static_cast<int>(examples.size()));
    const StepMetrics met = train_step(state, examples, batch);
    out.push_back(met);
    if (csv.is_open()) csv << metrics_csv_row(met) << "\n" << std::flush;
    if (options.on_step) options.on_step(met);
    if (options.log && (met.step % 50 == 0 || met.step == 1)) {
      *options.log << "step " << met.step << " phase " << met.phase << " rec " << met.rec
                   << " total " << met.total << "\n" << std::flush;
    }
    if (!options.out_dir.empty() && cfg.checkpoint_every > 0 &&
        state.step % cfg.checkpoint_every == 0) {
      save_checkpoint(state, checkpoint_path(options.out_dir, state.step));
    }
  }
  if (!options.out_dir.empty()) {
    if (state.step == cfg.total_steps()) {
      save_checkpoint(state, options.out_dir / "final.bin");
    } else if (cfg.checkpoint_every <= 0 || state.step % cfg.checkpoint_every != 0) {
      // Stopped early: leave a resumable checkpoint.
      save_checkpoint(state, checkpoint_path(options.out_dir, state.step));
    }
  }
  return out;
}

namespace {

const char* const kStorePrefixes[4] = {"g", "dg", "dl", "fs"};

std::vector<nn::Adam*> adams(TrainState& s) {
  return {&s.adam_g, &s.adam_dg, &s.adam_dl, &s.adam_fs};
}

ckpt::NamedArray to_array(const std::string& name, const nn::Shape& shape,
                          const std::vector<nn::Real>& v) {
  ckpt::NamedArray a;
  a.name = name;
  a.shape.assign(shape.begin(), shape.end());
  a.data.assign(v.begin(), v.end());
  return a;
}

void from_array(const ckpt::CheckpointData& d, const std::string& name, std::vector<nn::Real>& v) {
  const auto* a = d.find_array(name);
  if (a == nullptr) fail(ErrorCode::kCorruptCheckpoint, "missing array " + name);
  if (a->data.size() != v.size()) fail(ErrorCode::kCorruptCheckpoint, "size mismatch for " + name);
  std::copy(a->data.begin(), a->data.end(), v.begin());
}

const std::string& blob(const ckpt::CheckpointData& d, const std::string& name) {
  const auto* b = d.find_blob(name);
  if (b == nullptr) fail(ErrorCode::kCorruptCheckpoint, "missing entry " + name);
  return *b;
}

std::string stats_text(const model::NormStats& s) {
  KvConfig kv;
  auto put = [&](const std::string& p, const model::VarianceStats& v) {
    kv.set(p + ".mean", format_double(v.mean));
    kv.set(p + ".std", format_double(v.std));
    kv.set(p + ".min", format_double(v.min));
    kv.set(p + ".max", format_double(v.max));
  };
  put("pitch", s.pitch);
  put("energy", s.energy);
  return kv.to_text();
}

model::NormStats parse_stats(const std::string& text) {
  const KvConfig kv = KvConfig::parse(text);
  model::NormStats s;
  auto get = [&](const std::string& p, model::VarianceStats& v) {
    v.mean = kv.get_double(p + ".mean", v.mean);
    v.std = kv.get_double(p + ".std", v.std);
    v.min = kv.get_double(p + ".min", v.min);
    v.max = kv.get_double(p + ".max", v.max);
  };
  get("pitch", s.pitch);
  get("energy", s.energy);
  return s;
}

std::string model_keys_text(const TrainConfig& c) {
  KvConfig kv;
  c.model.write(kv);
  return kv.to_text();
}

}  // namespace

void save_checkpoint(const TrainState& state, const std::filesystem::path& path) {
  auto& s = const_cast<TrainState&>(state);
  ckpt::CheckpointData d;
  d.meta = state.config.to_kv().to_text();
  const auto st = stores(*s.models);
  const auto ad = adams(s);
  for (int i = 0; i < 4; ++i) {
    const auto& entries = st[i]->entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& [name, t] = entries[k];
      d.arrays.push_back(to_array(name, t.shape(), t.values()));
      const std::string p = std::string("adam.") + kStorePrefixes[i];
      d.arrays.push_back(to_array(p + ".m." + name, t.shape(), ad[i]->first_moments()[k]));
      d.arrays.push_back(to_array(p + ".v." + name, t.shape(), ad[i]->second_moments()[k]));
    }
    d.blobs.emplace_back(std::string("adam.") + kStorePrefixes[i] + ".t",
                         std::to_string(ad[i]->steps()));
  }
  d.blobs.emplace_back("step", std::to_string(state.step));
  d.blobs.emplace_back("rng", rng_state(state.rng));
  d.blobs.emplace_back("stats", stats_text(state.models->g.stats));
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  ckpt::write_checkpoint(path, d);
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  const ckpt::CheckpointData d = ckpt::read_checkpoint(path);
  TrainConfig cfg;
  try {
    cfg = TrainConfig::from_kv(KvConfig::parse(d.meta), TrainConfig());
  } catch (const Error& e) {
    fail(ErrorCode::kCorruptCheckpoint, path.string() + ": bad configuration: " + e.what());
  }
  TrainState s;
  s.config = cfg;
  Rng scratch(0);
  s.models = std::make_unique<Models>(cfg.model, scratch);
  const auto st = stores(*s.models);
  for (int i = 0; i < 4; ++i) *adams(s)[i] = nn::Adam(*st[i]);
  const auto ad = adams(s);
  for (int i = 0; i < 4; ++i) {
    auto& entries = st[i]->entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      auto& [name, t] = entries[k];
      from_array(d, name, t.values());
      const std::string p = std::string("adam.") + kStorePrefixes[i];
      from_array(d, p + ".m." + name, ad[i]->first_moments()[k]);
      from_array(d, p + ".v." + name, ad[i]->second_moments()[k]);
    }
    ad[i]->set_steps(std::stol(blob(d, std::string("adam.") + kStorePrefixes[i] + ".t")));
  }
  s.step = std::stoll(blob(d, "step"));
  s.rng = rng_from_state(blob(d, "rng"));
  s.models->g.stats = parse_stats(blob(d, "stats"));
  return s;
}

TrainState load_checkpoint(const std::filesystem::path& path, const TrainConfig& expected) {
  TrainState s = load_checkpoint(path);
  if (model_keys_text(s.config) != model_keys_text(expected)) {
    fail(ErrorCode::kConfigMismatch,
         path.string() + " was trained with a different model configuration");
  }
  s.config = expected;
  return s;
}

}  // namespace rptts::train

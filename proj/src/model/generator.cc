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

#include "rptts/model/generator.h"

#include <algorithm>
#include <cmath>

#include "rptts/common/error.h"

namespace rptts::model {
inline namespace RPTTS_PREC_NS {
namespace {

using corpus::Segment;

std::vector<int> segment_ids(const std::vector<Segment>& segments, bool audio) {
  std::vector<int> ids;
  ids.reserve(segments.size());
  for (Segment s : segments) {
    if (audio) {
      if (s == Segment::kInsert) fail(ErrorCode::kInvalidInput, "audio frames cannot be in I");
      ids.push_back(s == Segment::kBefore ? 0 : 1);
    } else {
      ids.push_back(static_cast<int>(s));
    }
  }
  return ids;
}

}  // namespace

Teacher make_teacher(const corpus::TrainingExample& ex, const NormStats& stats) {
  Teacher t;
  for (float p : ex.pitch_ph) t.pitch.push_back(static_cast<Real>(stats.pitch.normalize(p)));
  for (float e : ex.energy_ph) t.energy.push_back(static_cast<Real>(stats.energy.normalize(e)));
  t.durations = ex.durations;
  return t;
}

std::vector<Real> log_duration_targets(const std::vector<int>& durations) {
  std::vector<Real> out;
  out.reserve(durations.size());
  for (int d : durations) out.push_back(static_cast<Real>(std::log(d + 1.0)));
  return out;
}

std::vector<int> durations_from_log(const Tensor& log_dur) {
  std::vector<int> out;
  out.reserve(log_dur.size());
  for (Real v : log_dur.values()) {
    const double d = std::nearbyint(std::exp(static_cast<double>(v)) - 1.0);
    out.push_back(static_cast<int>(std::clamp(d, 1.0, 1e4)));
  }
  return out;
}

VariancePredictor::VariancePredictor(nn::ParamStore& ps, const std::string& name,
                                     const ModelConfig& cfg, Rng& rng)
    : conv1_(ps, name + ".conv1", cfg.d, cfg.predictor_filter, cfg.predictor_kernel, rng),
      conv2_(ps, name + ".conv2", cfg.predictor_filter, cfg.predictor_filter,
             cfg.predictor_kernel, rng),
      ln1_(ps, name + ".ln1", cfg.predictor_filter),
      ln2_(ps, name + ".ln2", cfg.predictor_filter),
      head_(ps, name + ".head", cfg.predictor_filter, 1, rng),
      dropout_(static_cast<Real>(cfg.predictor_dropout)) {}

Tensor VariancePredictor::operator()(const Tensor& h, const Context& ctx) const {
  Tensor x = nn::dropout(ln1_(nn::relu(conv1_(h))), dropout_, ctx);
  x = nn::dropout(ln2_(nn::relu(conv2_(x))), dropout_, ctx);
  const Tensor y = head_(x);
  return nn::reshape(y, {y.rows()});
}

Tensor length_regulate(const Tensor& h, const std::vector<int>& durations) {
  if (static_cast<int>(durations.size()) != h.rows()) {
    fail(ErrorCode::kShapeError, "length regulator: " + std::to_string(durations.size()) +
                                     " durations for " + std::to_string(h.rows()) + " rows");
  }
  std::vector<int> idx;
  for (std::size_t k = 0; k < durations.size(); ++k) {
    if (durations[k] < 0) fail(ErrorCode::kInvalidInput, "negative duration");
    idx.insert(idx.end(), durations[k], static_cast<int>(k));
  }
  return nn::gather_rows(h, idx);
}

Tensor splice(const Tensor& x_bar_in, const Tensor& z_bar, int l_b, corpus::Range z_rows_i) {
  if (x_bar_in.ndim() != 2 || z_bar.ndim() != 2 || x_bar_in.cols() != z_bar.cols()) {
    fail(ErrorCode::kShapeError, "splice: width mismatch");
  }
  if (l_b < 0 || l_b > x_bar_in.rows() || z_rows_i.begin < 0 || z_rows_i.end > z_bar.rows() ||
      z_rows_i.begin > z_rows_i.end) {
    fail(ErrorCode::kShapeError, "splice: range out of bounds");
  }
  return nn::concat_rows({nn::slice_rows(x_bar_in, 0, l_b),
                          nn::slice_rows(z_bar, z_rows_i.begin, z_rows_i.end),
                          nn::slice_rows(x_bar_in, l_b, x_bar_in.rows())});
}

Tensor to_tensor(const corpus::MatrixF& m) {
  std::vector<Real> v(m.data(), m.data() + m.size());
  return Tensor::from({static_cast<int>(m.rows()), static_cast<int>(m.cols())}, std::move(v));
}

corpus::MatrixF to_matrix(const Tensor& t) {
  corpus::MatrixF m(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.size(); ++i) m.data()[i] = static_cast<float>(t.at(i));
  return m;
}

Generator::Generator(const ModelConfig& cfg, Rng& rng) : cfg_(cfg), params_("g") {
  cfg_.validate();
  const nn::FftBlockConfig block{cfg.d, cfg.heads, cfg.d_k, cfg.d_v, cfg.ffn_filter,
                                 cfg.ffn_kernel, cfg.dropout};
  mel_in_ = nn::Linear(params_, "audio_encoder.mel_in", cfg.d_mel, cfg.d, rng);
  audio_segment_ = nn::Embedding(params_, "audio_encoder.segment", 2, cfg.d, rng);
  for (int i = 0; i < cfg.enc_blocks; ++i) {
    audio_blocks_.emplace_back(params_, "audio_encoder.block" + std::to_string(i), block, rng);
  }
  phoneme_embed_ = nn::Embedding(params_, "phoneme_encoder.embed", cfg.n_phonemes, cfg.d, rng);
  text_segment_ = nn::Embedding(params_, "phoneme_encoder.segment", 3, cfg.d, rng);
  for (int i = 0; i < cfg.enc_blocks; ++i) {
    phoneme_blocks_.emplace_back(params_, "phoneme_encoder.block" + std::to_string(i), block,
                                 rng);
  }
  cross_attn_ = nn::MultiHeadAttention(params_, "cross_attention", cfg.d, cfg.heads, cfg.d_k,
                                       cfg.d_v, rng);
  pitch_pred_ = VariancePredictor(params_, "variance.pitch", cfg, rng);
  energy_pred_ = VariancePredictor(params_, "variance.energy", cfg, rng);
  duration_pred_ = VariancePredictor(params_, "variance.duration", cfg, rng);
  pitch_embed_ = nn::Embedding(params_, "variance.pitch_embed", cfg.n_bins, cfg.d, rng);
  energy_embed_ = nn::Embedding(params_, "variance.energy_embed", cfg.n_bins, cfg.d, rng);
  for (int i = 0; i < cfg.dec_blocks; ++i) {
    decoder_blocks_.emplace_back(params_, "decoder.block" + std::to_string(i), block, rng);
  }
  mel_out_ = nn::Linear(params_, "decoder.mel_out", cfg.d, cfg.d_mel, rng);
}

Tensor Generator::encode_audio(const Tensor& x_in, const std::vector<Segment>& segments,
                               const Context& ctx) const {
  if (x_in.ndim() != 2 || x_in.cols() != cfg_.d_mel) {
    fail(ErrorCode::kShapeError, "encode_audio expects (L, " + std::to_string(cfg_.d_mel) +
                                     "), got " + nn::shape_string(x_in.shape()));
  }
  if (x_in.rows() < 1) fail(ErrorCode::kShapeError, "encode_audio needs at least one frame");
  if (static_cast<int>(segments.size()) != x_in.rows()) {
    fail(ErrorCode::kShapeError, "encode_audio: one segment label per frame");
  }
  Tensor h = nn::add(mel_in_(x_in), audio_segment_(segment_ids(segments, true)));
  h = nn::add(h, nn::sinusoidal_positional_encoding(x_in.rows(), cfg_.d));
  for (const auto& b : audio_blocks_) h = b(h, ctx);
  return h;
}

Tensor Generator::encode_phonemes(const std::vector<int>& ids,
                                  const std::vector<Segment>& segments,
                                  const Context& ctx) const {
  if (ids.empty()) fail(ErrorCode::kShapeError, "encode_phonemes needs K >= 1");
  if (segments.size() != ids.size()) {
    fail(ErrorCode::kShapeError, "encode_phonemes: one segment label per phoneme");
  }
  Tensor h = nn::add(phoneme_embed_(ids), text_segment_(segment_ids(segments, false)));
  h = nn::add(h, nn::sinusoidal_positional_encoding(static_cast<int>(ids.size()), cfg_.d));
  for (const auto& b : phoneme_blocks_) h = b(h, ctx);
  return h;
}

Tensor Generator::cross_modal_attention(const Tensor& t_bar, const Tensor& x_bar,
                                        std::vector<Tensor>* weights) const {
  return nn::add(t_bar, cross_attn_(t_bar, x_bar, weights));
}

AdaptorOutput Generator::variance_adaptor(const Tensor& t_ca, Mode mode, const Teacher* teacher,
                                          const Context& ctx) const {
  const int k = t_ca.rows();
  if (mode == Mode::kTrain) {
    if (teacher == nullptr) fail(ErrorCode::kTeacherMissing, "train mode needs teacher values");
    if (static_cast<int>(teacher->pitch.size()) != k ||
        static_cast<int>(teacher->energy.size()) != k ||
        static_cast<int>(teacher->durations.size()) != k) {
      fail(ErrorCode::kShapeError, "teacher values do not match the phoneme count");
    }
  }
  AdaptorOutput out;
  auto& var = out.variance;
  auto buckets = [&](const std::vector<Real>& z, const VarianceStats& s) {
    std::vector<int> idx;
    for (Real v : z) idx.push_back(s.bucket(v, cfg_.n_bins));
    return idx;
  };

  var.pitch_pred = pitch_pred_(t_ca, ctx);
  const std::vector<Real>& pitch_used =
      mode == Mode::kTrain ? teacher->pitch : var.pitch_pred.values();
  const Tensor e_pitch = pitch_embed_(buckets(pitch_used, stats.pitch));
  const Tensor h_pitch = nn::add(t_ca, e_pitch);

  var.energy_pred = energy_pred_(h_pitch, ctx);
  const std::vector<Real>& energy_used =
      mode == Mode::kTrain ? teacher->energy : var.energy_pred.values();
  const Tensor e_energy = energy_embed_(buckets(energy_used, stats.energy));
  const Tensor h = nn::add(h_pitch, e_energy);

  var.log_dur_pred = duration_pred_(h, ctx);
  var.durations_used =
      mode == Mode::kTrain ? teacher->durations : durations_from_log(var.log_dur_pred);
  out.z_bar = length_regulate(h, var.durations_used);
  return out;
}

Tensor Generator::decode(const Tensor& z_hat, const Context& ctx) const {
  if (z_hat.ndim() != 2 || z_hat.cols() != cfg_.d || z_hat.rows() < 1) {
    fail(ErrorCode::kShapeError, "decode expects (L, d), got " + nn::shape_string(z_hat.shape()));
  }
  Tensor h = nn::add(z_hat, nn::sinusoidal_positional_encoding(z_hat.rows(), cfg_.d));
  for (const auto& b : decoder_blocks_) h = b(h, ctx);
  return mel_out_(h);
}

GeneratorOutput Generator::forward(const corpus::ModelInput& in, Mode mode,
                                   const Teacher* teacher, const Context& ctx) const {
  int l_b = 0;
  for (Segment s : in.audio_segments) l_b += s == Segment::kBefore ? 1 : 0;
  // Phoneme segments are ordered B*, I*, A*.
  corpus::Range phones_i;
  for (Segment s : in.phoneme_segments) {
    phones_i.begin += s == Segment::kBefore ? 1 : 0;
    phones_i.end += s != Segment::kAfter ? 1 : 0;
  }

  const Tensor x_bar = encode_audio(to_tensor(in.x_in), in.audio_segments, ctx);
  const Tensor t_bar = encode_phonemes(in.phonemes, in.phoneme_segments, ctx);
  const Tensor t_ca = cross_modal_attention(t_bar, x_bar);
  AdaptorOutput adapted = variance_adaptor(t_ca, mode, teacher, ctx);

  int z_begin = 0, z_end = 0;
  for (int k = 0; k < phones_i.end; ++k) {
    if (k < phones_i.begin) z_begin += adapted.variance.durations_used[k];
    z_end += adapted.variance.durations_used[k];
  }
  GeneratorOutput out;
  out.l_b = l_b;
  out.l_i = z_end - z_begin;
  out.l_a = x_bar.rows() - l_b;
  out.mel = decode(splice(x_bar, adapted.z_bar, l_b, {z_begin, z_end}), ctx);
  out.variance = std::move(adapted.variance);
  return out;
}

GeneratorOutput Generator::forward_train(const corpus::TrainingExample& ex,
                                         const corpus::SegmentSpec& spec,
                                         const Context& ctx) const {
  const Teacher teacher = make_teacher(ex, stats);
  return forward(corpus::apply_segmentation(ex, spec), Mode::kTrain, &teacher, ctx);
}

GeneratorOutput Generator::forward_infer(const corpus::ModelInput& in, const Context& ctx) const {
  return forward(in, Mode::kInfer, nullptr, ctx);
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::model

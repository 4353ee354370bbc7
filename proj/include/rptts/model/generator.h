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

// The insertion generator: audio and phoneme encoders, cross-modal
// attention, variance adaptor, splice and decoder.

#ifndef RPTTS_MODEL_GENERATOR_H_
#define RPTTS_MODEL_GENERATOR_H_

#include <vector>

#include "rptts/corpus/example.h"
#include "rptts/model/config.h"
#include "rptts/model/variance_stats.h"
#include "rptts/nn/layers.h"

namespace rptts::model {
inline namespace RPTTS_PREC_NS {

using nn::Context;
using nn::Real;
using nn::Tensor;

enum class Mode { kTrain, kInfer };

// Ground-truth variance values used in train mode; pitch and energy are
// already normalized.
struct Teacher {
  std::vector<Real> pitch;
  std::vector<Real> energy;
  std::vector<int> durations;
};

Teacher make_teacher(const corpus::TrainingExample& ex, const NormStats& stats);

// log(d + 1), the duration predictor's target domain.
std::vector<Real> log_duration_targets(const std::vector<int>& durations);
// max(1, round(exp(log_d) - 1)) per phoneme.
std::vector<int> durations_from_log(const Tensor& log_dur);

struct VarianceOutputs {
  Tensor pitch_pred;    // (K)
  Tensor energy_pred;   // (K)
  Tensor log_dur_pred;  // (K)
  std::vector<int> durations_used;
};

struct AdaptorOutput {
  Tensor z_bar;  // (sum(durations_used), d)
  VarianceOutputs variance;
};

struct GeneratorOutput {
  Tensor mel;  // (l_b + l_i + l_a, d_mel)
  VarianceOutputs variance;
  int l_b = 0;
  int l_i = 0;
  int l_a = 0;
};

// Conv1d -> ReLU -> LN -> Dropout, twice, then a linear head to one scalar
// per phoneme.
class VariancePredictor {
 public:
  VariancePredictor() = default;
  VariancePredictor(nn::ParamStore& ps, const std::string& name, const ModelConfig& cfg,
                    Rng& rng);
  Tensor operator()(const Tensor& h, const Context& ctx) const;

 private:
  nn::Conv1d conv1_, conv2_;
  nn::LayerNorm ln1_, ln2_;
  nn::Linear head_;
  Real dropout_ = 0;
};

// Replicates row k of `h` durations[k] times.
Tensor length_regulate(const Tensor& h, const std::vector<int>& durations);

// Rows (x_bar_in[0, l_b), z_bar[z_rows_i], x_bar_in[l_b, end)).
Tensor splice(const Tensor& x_bar_in, const Tensor& z_bar, int l_b, corpus::Range z_rows_i);

Tensor to_tensor(const corpus::MatrixF& m);
corpus::MatrixF to_matrix(const Tensor& t);

class Generator {
 public:
  Generator(const ModelConfig& cfg, Rng& rng);
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  // Normalization of pitch/energy values; fitted on the training store.
  NormStats stats;

  Tensor encode_audio(const Tensor& x_in, const std::vector<corpus::Segment>& segments,
                      const Context& ctx) const;
  Tensor encode_phonemes(const std::vector<int>& ids,
                         const std::vector<corpus::Segment>& segments, const Context& ctx) const;
  // T_CA = T_bar + MHA(queries T_bar, keys/values X_bar).
  Tensor cross_modal_attention(const Tensor& t_bar, const Tensor& x_bar,
                               std::vector<Tensor>* weights = nullptr) const;
  // Throws TeacherMissing in train mode without `teacher`.
  AdaptorOutput variance_adaptor(const Tensor& t_ca, Mode mode, const Teacher* teacher,
                                 const Context& ctx) const;
  Tensor decode(const Tensor& z_hat, const Context& ctx) const;

  GeneratorOutput forward(const corpus::ModelInput& in, Mode mode, const Teacher* teacher,
                          const Context& ctx) const;
  // Teacher-forced; output length equals the ground-truth mel length.
  GeneratorOutput forward_train(const corpus::TrainingExample& ex,
                                const corpus::SegmentSpec& spec, const Context& ctx) const;
  // Predicted durations; output length is l_b + sum of predicted I durations + l_a.
  GeneratorOutput forward_infer(const corpus::ModelInput& in, const Context& ctx) const;

 private:
  ModelConfig cfg_;
  nn::ParamStore params_;
  nn::Linear mel_in_;
  nn::Embedding audio_segment_;   // rows: B, A
  nn::Embedding phoneme_embed_;
  nn::Embedding text_segment_;    // rows: B, I, A
  std::vector<nn::FftBlock> audio_blocks_, phoneme_blocks_, decoder_blocks_;
  nn::MultiHeadAttention cross_attn_;
  VariancePredictor pitch_pred_, energy_pred_, duration_pred_;
  nn::Embedding pitch_embed_, energy_embed_;
  nn::Linear mel_out_;
};

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::model

#endif  // RPTTS_MODEL_GENERATOR_H_

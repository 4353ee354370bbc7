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

#ifndef RPTTS_NN_PARAMS_H_
#define RPTTS_NN_PARAMS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rptts/common/rng.h"
#include "rptts/nn/tensor.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

// Named, ordered collection of trainable leaves. Names are unique and stable
// so checkpoints can be matched by name.
class ParamStore {
 public:
  explicit ParamStore(std::string prefix = "") : prefix_(std::move(prefix)) {}

  Tensor add(const std::string& name, const Shape& shape, std::vector<Real> values);
  // Xavier/Glorot uniform with the given fan sizes.
  Tensor add_xavier(const std::string& name, const Shape& shape, int fan_in, int fan_out,
                    Rng& rng);
  Tensor add_normal(const std::string& name, const Shape& shape, double stddev, Rng& rng);
  Tensor add_constant(const std::string& name, const Shape& shape, Real value);

  const std::vector<std::pair<std::string, Tensor>>& entries() const { return params_; }
  std::vector<std::pair<std::string, Tensor>>& entries() { return params_; }
  Tensor get(const std::string& name) const;
  std::size_t num_values() const;
  const std::string& prefix() const { return prefix_; }

  void zero_grad();
  // L2 norm over all present gradients.
  double grad_norm() const;
  // Rescales gradients so their global norm is at most `max_norm`.
  void clip_grad_norm(double max_norm);
  // FNV-1a over names and raw value bytes.
  std::uint64_t hash() const;
  // Enables or disables gradient tracking for every parameter.
  void set_trainable(bool trainable);

 private:
  std::string prefix_;
  std::vector<std::pair<std::string, Tensor>> params_;
};

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_PARAMS_H_

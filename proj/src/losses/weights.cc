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

#include "rptts/losses/weights.h"

#include "rptts/common/error.h"

namespace rptts::losses {
namespace {

template <typename W, typename F>
void for_each_field(W& w, F&& f) {
  f("lambda1", w.lambda1);
  f("adv_global", w.adv_global);
  f("feat_global", w.feat_global);
  f("adv_local", w.adv_local);
  f("feat_local", w.feat_local);
  f("style", w.style);
  f("margin", w.margin);
  f("variance", w.variance);
}

}  // namespace

void LossWeights::validate() const {
  LossWeights copy = *this;
  for_each_field(copy, [](const char* name, double v) {
    if (!(v >= 0.0)) fail(ErrorCode::kInvalidConfig, std::string("loss.") + name + " must be >= 0");
  });
}

void LossWeights::write(KvConfig& kv) const {
  LossWeights copy = *this;
  for_each_field(copy, [&](const char* name, double v) {
    kv.set(std::string("loss.") + name, format_double(v));
  });
}

LossWeights LossWeights::read(const KvConfig& kv, const LossWeights& defaults) {
  LossWeights w = defaults;
  for_each_field(w, [&](const char* name, double& v) {
    v = kv.get_double(std::string("loss.") + name, v);
  });
  w.validate();
  return w;
}

std::set<std::string> LossWeights::keys() {
  std::set<std::string> out;
  LossWeights w;
  for_each_field(w, [&](const char* name, double) { out.insert(std::string("loss.") + name); });
  return out;
}

}  // namespace rptts::losses

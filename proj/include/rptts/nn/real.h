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

// The differentiable modules are compiled twice: single precision for
// training and double precision for gradient checking. Each build lives in
// its own inline namespace so both can be linked into one binary.

#ifndef RPTTS_NN_REAL_H_
#define RPTTS_NN_REAL_H_

#ifdef RPTTS_REAL_F64
#define RPTTS_PREC_NS f64
#else
#define RPTTS_PREC_NS f32
#endif

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {

#ifdef RPTTS_REAL_F64
using Real = double;
#else
using Real = float;
#endif

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

#endif  // RPTTS_NN_REAL_H_

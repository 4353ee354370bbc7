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

#include "rptts/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "rptts/common/error.h"

namespace rptts::nn {
inline namespace RPTTS_PREC_NS {
namespace {

using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<Mat>;
using CMapM = Eigen::Map<const Mat>;

[[noreturn]] void shape_error(const std::string& op, const std::string& what) {
  fail(ErrorCode::kShapeError, op + ": " + what);
}

void require_2d(const Tensor& t, const char* op) {
  if (t.ndim() != 2) shape_error(op, "expected a 2-D tensor, got " + shape_string(t.shape()));
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    shape_error(op, shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

Node& in(Node& n, std::size_t i) { return *n.inputs[i]; }

}  // namespace

int conv_out_size(int in_size, int kernel, int stride, int pad) {
  return (in_size + 2 * pad - kernel) / stride + 1;
}

Tensor matmul(const Tensor& a, const Tensor& b, bool ta, bool tb) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  const int m = ta ? a.cols() : a.rows();
  const int k = ta ? a.rows() : a.cols();
  const int kb = tb ? b.cols() : b.rows();
  const int n = tb ? b.rows() : b.cols();
  if (k != kb) {
    shape_error("matmul", shape_string(a.shape()) + (ta ? "^T" : "") + " x " +
                              shape_string(b.shape()) + (tb ? "^T" : ""));
  }
  std::vector<Real> out(static_cast<std::size_t>(m) * n);
  CMapM A(a.data(), a.rows(), a.cols());
  CMapM B(b.data(), b.rows(), b.cols());
  MapM C(out.data(), m, n);
  if (k == 0) {
    C.setZero();
  } else if (!ta && !tb) {
    C.noalias() = A * B;
  } else if (ta && !tb) {
    C.noalias() = A.transpose() * B;
  } else if (!ta && tb) {
    C.noalias() = A * B.transpose();
  } else {
    C.noalias() = A.transpose() * B.transpose();
  }
  return make_result({m, n}, std::move(out), {a, b}, [ta, tb, m, n, k](Node& self) {
    Node& na = in(self, 0);
    Node& nb = in(self, 1);
    if (k == 0) return;
    CMapM dC(self.grad.data(), m, n);
    const int ar = na.shape[0], ac = na.shape[1], br = nb.shape[0], bc = nb.shape[1];
    CMapM A(na.value.data(), ar, ac);
    CMapM B(nb.value.data(), br, bc);
    if (na.requires_grad) {
      MapM dA(na.grad_buffer().data(), ar, ac);
      if (!ta) {
        if (!tb) dA.noalias() += dC * B.transpose();
        else dA.noalias() += dC * B;
      } else {
        if (!tb) dA.noalias() += B * dC.transpose();
        else dA.noalias() += B.transpose() * dC.transpose();
      }
    }
    if (nb.requires_grad) {
      MapM dB(nb.grad_buffer().data(), br, bc);
      if (!tb) {
        if (!ta) dB.noalias() += A.transpose() * dC;
        else dB.noalias() += A * dC;
      } else {
        if (!ta) dB.noalias() += dC.transpose() * A;
        else dB.noalias() += dC.transpose() * A.transpose();
      }
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same(a, b, "add");
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (int j = 0; j < 2; ++j) {
      Node& x = in(self, j);
      if (!x.requires_grad) continue;
      auto& g = x.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same(a, b, "sub");
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (int j = 0; j < 2; ++j) {
      Node& x = in(self, j);
      if (!x.requires_grad) continue;
      auto& g = x.grad_buffer();
      const Real s = j == 0 ? Real(1) : Real(-1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same(a, b, "mul");
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& na = in(self, 0);
    Node& nb = in(self, 1);
    if (na.requires_grad) {
      auto& g = na.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * nb.value[i];
    }
    if (nb.requires_grad) {
      auto& g = nb.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * na.value[i];
    }
  });
}

Tensor scale(const Tensor& a, Real s) {
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * s;
  return make_result(a.shape(), std::move(out), {a}, [s](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
  });
}

Tensor add_scalar(const Tensor& a, Real s) {
  std::vector<Real> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + s;
  return make_result(a.shape(), std::move(out), {a}, [](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor add_rowvec(const Tensor& x, const Tensor& bias) {
  if (x.ndim() < 1) shape_error("add_rowvec", "scalar input");
  const int c = x.shape().back();
  if (static_cast<int>(bias.size()) != c) {
    shape_error("add_rowvec", shape_string(x.shape()) + " + " + shape_string(bias.shape()));
  }
  const std::size_t rows = c == 0 ? 0 : x.size() / c;
  std::vector<Real> out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (int j = 0; j < c; ++j) out[r * c + j] = x.at(r * c + j) + bias.at(j);
  }
  return make_result(x.shape(), std::move(out), {x, bias}, [rows, c](Node& self) {
    Node& nx = in(self, 0);
    Node& nb = in(self, 1);
    if (nx.requires_grad) {
      auto& g = nx.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (nb.requires_grad) {
      auto& g = nb.grad_buffer();
      for (std::size_t r = 0; r < rows; ++r) {
        for (int j = 0; j < c; ++j) g[j] += self.grad[r * c + j];
      }
    }
  });
}

Tensor relu(const Tensor& x) {
  std::vector<Real> out(x.size());
  const bool trace = kink::active();
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool on = x.at(i) > Real(0);
    out[i] = on ? x.at(i) : Real(0);
    if (trace) {
      bits = (bits << 1) | (on ? 1u : 0u);
      if ((i & 63) == 63) kink::record(bits), bits = 0;
    }
  }
  if (trace) kink::record(bits);
  return make_result(x.shape(), std::move(out), {x}, [](Node& self) {
    Node& nx = in(self, 0);
    auto& g = nx.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (nx.value[i] > Real(0)) g[i] += self.grad[i];
    }
  });
}

Tensor abs(const Tensor& x) {
  std::vector<Real> out(x.size());
  const bool trace = kink::active();
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::abs(x.at(i));
    if (trace) {
      const std::uint64_t s = x.at(i) > 0 ? 2 : (x.at(i) < 0 ? 1 : 0);
      bits = (bits << 2) | s;
      if ((i & 31) == 31) kink::record(bits), bits = 0;
    }
  }
  if (trace) kink::record(bits);
  return make_result(x.shape(), std::move(out), {x}, [](Node& self) {
    Node& nx = in(self, 0);
    auto& g = nx.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Real v = nx.value[i];
      g[i] += (v > 0 ? Real(1) : (v < 0 ? Real(-1) : Real(0))) * self.grad[i];
    }
  });
}

Tensor square(const Tensor& x) {
  std::vector<Real> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.at(i) * x.at(i);
  return make_result(x.shape(), std::move(out), {x}, [](Node& self) {
    Node& nx = in(self, 0);
    auto& g = nx.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += Real(2) * nx.value[i] * self.grad[i];
  });
}

Tensor sum(const Tensor& x) {
  Real s = 0;
  for (Real v : x.values()) s += v;
  return make_result({1}, {s}, {x}, [](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) shape_error("mean", "empty tensor");
  return scale(sum(x), Real(1) / static_cast<Real>(x.size()));
}

Tensor mean_abs_diff(const Tensor& a, const Tensor& b) { return mean(abs(sub(a, b))); }

Tensor mse(const Tensor& a, const Tensor& b) { return mean(square(sub(a, b))); }

Tensor stack_scalars(const std::vector<Tensor>& xs) {
  std::vector<Real> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.item());
  const int n = static_cast<int>(xs.size());
  return make_result({n}, std::move(out), xs, [](Node& self) {
    for (std::size_t i = 0; i < self.inputs.size(); ++i) {
      Node& x = in(self, i);
      if (x.requires_grad) x.grad_buffer()[0] += self.grad[i];
    }
  });
}

Tensor add_all(const std::vector<Tensor>& xs) {
  if (xs.empty()) return Tensor::scalar(0);
  Tensor acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
  return acc;
}

Tensor softmax_rows(const Tensor& x) {
  if (x.ndim() < 1) shape_error("softmax_rows", "scalar input");
  const int c = x.shape().back();
  const std::size_t rows = c == 0 ? 0 : x.size() / c;
  std::vector<Real> out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xi = x.data() + r * c;
    Real* yi = out.data() + r * c;
    const Real mx = *std::max_element(xi, xi + c);
    Real z = 0;
    for (int j = 0; j < c; ++j) z += (yi[j] = std::exp(xi[j] - mx));
    for (int j = 0; j < c; ++j) yi[j] /= z;
  }
  return make_result(x.shape(), std::move(out), {x}, [rows, c](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const Real* y = self.value.data() + r * c;
      const Real* dy = self.grad.data() + r * c;
      Real dot = 0;
      for (int j = 0; j < c; ++j) dot += y[j] * dy[j];
      for (int j = 0; j < c; ++j) g[r * c + j] += y[j] * (dy[j] - dot);
    }
  });
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real eps) {
  const int c = x.shape().back();
  if (static_cast<int>(gamma.size()) != c || static_cast<int>(beta.size()) != c) {
    shape_error("layer_norm_rows", "affine size does not match " + shape_string(x.shape()));
  }
  const std::size_t rows = x.size() / c;
  std::vector<Real> out(x.size());
  auto xhat = std::make_shared<std::vector<Real>>(x.size());
  auto inv_std = std::make_shared<std::vector<Real>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xi = x.data() + r * c;
    Real mu = 0;
    for (int j = 0; j < c; ++j) mu += xi[j];
    mu /= c;
    Real var = 0;
    for (int j = 0; j < c; ++j) var += (xi[j] - mu) * (xi[j] - mu);
    var /= c;
    const Real is = Real(1) / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (int j = 0; j < c; ++j) {
      const Real h = (xi[j] - mu) * is;
      (*xhat)[r * c + j] = h;
      out[r * c + j] = h * gamma.at(j) + beta.at(j);
    }
  }
  return make_result(x.shape(), std::move(out), {x, gamma, beta},
                     [rows, c, xhat, inv_std](Node& self) {
    Node& nx = in(self, 0);
    Node& ng = in(self, 1);
    Node& nb = in(self, 2);
    const Real* dy = self.grad.data();
    if (ng.requires_grad || nb.requires_grad) {
      auto& gg = ng.grad_buffer();
      auto& gb = nb.grad_buffer();
      for (std::size_t r = 0; r < rows; ++r) {
        for (int j = 0; j < c; ++j) {
          gg[j] += dy[r * c + j] * (*xhat)[r * c + j];
          gb[j] += dy[r * c + j];
        }
      }
    }
    if (nx.requires_grad) {
      auto& gx = nx.grad_buffer();
      std::vector<Real> dh(c);
      for (std::size_t r = 0; r < rows; ++r) {
        Real m1 = 0, m2 = 0;
        for (int j = 0; j < c; ++j) {
          dh[j] = dy[r * c + j] * ng.value[j];
          m1 += dh[j];
          m2 += dh[j] * (*xhat)[r * c + j];
        }
        m1 /= c;
        m2 /= c;
        for (int j = 0; j < c; ++j) {
          gx[r * c + j] += (*inv_std)[r] * (dh[j] - m1 - (*xhat)[r * c + j] * m2);
        }
      }
    }
  });
}

Tensor dropout(const Tensor& x, Real rate, Rng& rng) {
  if (rate <= Real(0)) return x;
  if (rate >= Real(1)) fail(ErrorCode::kInvalidInput, "dropout rate must be < 1");
  auto mask = std::make_shared<std::vector<Real>>(x.size());
  const Real keep_scale = Real(1) / (Real(1) - rate);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Real> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*mask)[i] = u(rng) >= rate ? keep_scale : Real(0);
    out[i] = x.at(i) * (*mask)[i];
  }
  return make_result(x.shape(), std::move(out), {x}, [mask](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (*mask)[i];
  });
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& idx) {
  require_2d(table, "gather_rows");
  const int n = table.rows(), d = table.cols();
  std::vector<Real> out(idx.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= n) {
      shape_error("gather_rows", "index " + std::to_string(idx[i]) + " out of " +
                                     std::to_string(n));
    }
    std::copy_n(table.data() + static_cast<std::size_t>(idx[i]) * d, d, out.data() + i * d);
  }
  return make_result({static_cast<int>(idx.size()), d}, std::move(out), {table},
                     [idx, d](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      Real* gr = g.data() + static_cast<std::size_t>(idx[i]) * d;
      const Real* src = self.grad.data() + i * d;
      for (int j = 0; j < d; ++j) gr[j] += src[j];
    }
  });
}

Tensor concat_rows(const std::vector<Tensor>& xs) {
  if (xs.empty()) shape_error("concat_rows", "no inputs");
  const int c = xs[0].cols();
  int rows = 0;
  for (const auto& x : xs) {
    require_2d(x, "concat_rows");
    if (x.cols() != c) shape_error("concat_rows", "column mismatch");
    rows += x.rows();
  }
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(rows) * c);
  for (const auto& x : xs) out.insert(out.end(), x.values().begin(), x.values().end());
  return make_result({rows, c}, std::move(out), xs, [](Node& self) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < self.inputs.size(); ++i) {
      Node& x = in(self, i);
      if (x.requires_grad) {
        auto& g = x.grad_buffer();
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += self.grad[off + j];
      }
      off += x.value.size();
    }
  });
}

Tensor slice_rows(const Tensor& x, int begin, int end) {
  require_2d(x, "slice_rows");
  if (begin < 0 || end > x.rows() || begin > end) shape_error("slice_rows", "range out of bounds");
  const int c = x.cols();
  std::vector<Real> out(x.data() + static_cast<std::size_t>(begin) * c,
                        x.data() + static_cast<std::size_t>(end) * c);
  return make_result({end - begin, c}, std::move(out), {x}, [begin, c](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    const std::size_t off = static_cast<std::size_t>(begin) * c;
    for (std::size_t j = 0; j < self.grad.size(); ++j) g[off + j] += self.grad[j];
  });
}

Tensor concat_cols(const std::vector<Tensor>& xs) {
  if (xs.empty()) shape_error("concat_cols", "no inputs");
  const int r = xs[0].rows();
  int cols = 0;
  for (const auto& x : xs) {
    require_2d(x, "concat_cols");
    if (x.rows() != r) shape_error("concat_cols", "row mismatch");
    cols += x.cols();
  }
  std::vector<Real> out(static_cast<std::size_t>(r) * cols);
  int c0 = 0;
  for (const auto& x : xs) {
    const int c = x.cols();
    for (int i = 0; i < r; ++i) {
      std::copy_n(x.data() + static_cast<std::size_t>(i) * c, c,
                  out.data() + static_cast<std::size_t>(i) * cols + c0);
    }
    c0 += c;
  }
  return make_result({r, cols}, std::move(out), xs, [r, cols](Node& self) {
    int c0 = 0;
    for (std::size_t k = 0; k < self.inputs.size(); ++k) {
      Node& x = in(self, k);
      const int c = x.shape[1];
      if (x.requires_grad) {
        auto& g = x.grad_buffer();
        for (int i = 0; i < r; ++i) {
          for (int j = 0; j < c; ++j) {
            g[static_cast<std::size_t>(i) * c + j] +=
                self.grad[static_cast<std::size_t>(i) * cols + c0 + j];
          }
        }
      }
      c0 += c;
    }
  });
}

Tensor slice_cols(const Tensor& x, int begin, int end) {
  require_2d(x, "slice_cols");
  if (begin < 0 || end > x.cols() || begin > end) shape_error("slice_cols", "range out of bounds");
  const int r = x.rows(), c = x.cols(), w = end - begin;
  std::vector<Real> out(static_cast<std::size_t>(r) * w);
  for (int i = 0; i < r; ++i) {
    std::copy_n(x.data() + static_cast<std::size_t>(i) * c + begin, w,
                out.data() + static_cast<std::size_t>(i) * w);
  }
  return make_result({r, w}, std::move(out), {x}, [r, c, w, begin](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < w; ++j) {
        g[static_cast<std::size_t>(i) * c + begin + j] +=
            self.grad[static_cast<std::size_t>(i) * w + j];
      }
    }
  });
}

Tensor reshape(const Tensor& x, const Shape& shape) {
  if (numel(shape) != x.size()) {
    shape_error("reshape", shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  return make_result(shape, x.values(), {x}, [](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor im2col_1d(const Tensor& x, int kernel) {
  require_2d(x, "im2col_1d");
  if (kernel < 1 || kernel % 2 == 0) shape_error("im2col_1d", "kernel must be odd");
  const int l = x.rows(), c = x.cols(), half = kernel / 2, w = kernel * c;
  std::vector<Real> out(static_cast<std::size_t>(l) * w, Real(0));
  for (int t = 0; t < l; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const int s = t + k - half;
      if (s < 0 || s >= l) continue;
      std::copy_n(x.data() + static_cast<std::size_t>(s) * c, c,
                  out.data() + static_cast<std::size_t>(t) * w + k * c);
    }
  }
  return make_result({l, w}, std::move(out), {x}, [l, c, kernel, half, w](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (int t = 0; t < l; ++t) {
      for (int k = 0; k < kernel; ++k) {
        const int s = t + k - half;
        if (s < 0 || s >= l) continue;
        Real* dst = g.data() + static_cast<std::size_t>(s) * c;
        const Real* src = self.grad.data() + static_cast<std::size_t>(t) * w + k * c;
        for (int j = 0; j < c; ++j) dst[j] += src[j];
      }
    }
  });
}

Tensor im2col_2d(const Tensor& x, int kh, int kw, int stride, int pad) {
  if (x.ndim() != 4) shape_error("im2col_2d", "expected NHWC, got " + shape_string(x.shape()));
  const int n = x.dim(0), h = x.dim(1), wd = x.dim(2), c = x.dim(3);
  const int ho = conv_out_size(h, kh, stride, pad), wo = conv_out_size(wd, kw, stride, pad);
  if (ho < 1 || wo < 1) shape_error("im2col_2d", "kernel larger than padded input");
  const int cols = kh * kw * c;
  const std::size_t rows = static_cast<std::size_t>(n) * ho * wo;
  std::vector<Real> out(rows * cols, Real(0));
  for (int b = 0; b < n; ++b) {
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        Real* dst = out.data() + ((static_cast<std::size_t>(b) * ho + oy) * wo + ox) * cols;
        for (int ky = 0; ky < kh; ++ky) {
          const int y = oy * stride - pad + ky;
          if (y < 0 || y >= h) continue;
          for (int kx = 0; kx < kw; ++kx) {
            const int xx = ox * stride - pad + kx;
            if (xx < 0 || xx >= wd) continue;
            std::copy_n(x.data() + ((static_cast<std::size_t>(b) * h + y) * wd + xx) * c, c,
                        dst + (ky * kw + kx) * c);
          }
        }
      }
    }
  }
  return make_result({static_cast<int>(rows), cols}, std::move(out), {x},
                     [=](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (int b = 0; b < n; ++b) {
      for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
          const Real* src =
              self.grad.data() + ((static_cast<std::size_t>(b) * ho + oy) * wo + ox) * cols;
          for (int ky = 0; ky < kh; ++ky) {
            const int y = oy * stride - pad + ky;
            if (y < 0 || y >= h) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int xx = ox * stride - pad + kx;
              if (xx < 0 || xx >= wd) continue;
              Real* dst = g.data() + ((static_cast<std::size_t>(b) * h + y) * wd + xx) * c;
              const Real* s = src + (ky * kw + kx) * c;
              for (int j = 0; j < c; ++j) dst[j] += s[j];
            }
          }
        }
      }
    }
  });
}

Tensor group_norm_nhwc(const Tensor& x, int groups, const Tensor& gamma, const Tensor& beta,
                       Real eps) {
  if (x.ndim() != 4) shape_error("group_norm_nhwc", "expected NHWC");
  const int n = x.dim(0), c = x.dim(3);
  const std::size_t hw = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  if (groups < 1 || c % groups != 0) shape_error("group_norm_nhwc", "channels not divisible");
  if (static_cast<int>(gamma.size()) != c || static_cast<int>(beta.size()) != c) {
    shape_error("group_norm_nhwc", "affine size mismatch");
  }
  const int cg = c / groups;
  const Real count = static_cast<Real>(hw * cg);
  std::vector<Real> out(x.size());
  auto xhat = std::make_shared<std::vector<Real>>(x.size());
  auto inv_std = std::make_shared<std::vector<Real>>(static_cast<std::size_t>(n) * groups);
  for (int b = 0; b < n; ++b) {
    const Real* xb = x.data() + static_cast<std::size_t>(b) * hw * c;
    for (int gi = 0; gi < groups; ++gi) {
      Real mu = 0;
      for (std::size_t p = 0; p < hw; ++p) {
        for (int j = gi * cg; j < (gi + 1) * cg; ++j) mu += xb[p * c + j];
      }
      mu /= count;
      Real var = 0;
      for (std::size_t p = 0; p < hw; ++p) {
        for (int j = gi * cg; j < (gi + 1) * cg; ++j) {
          const Real dlt = xb[p * c + j] - mu;
          var += dlt * dlt;
        }
      }
      var /= count;
      const Real is = Real(1) / std::sqrt(var + eps);
      (*inv_std)[static_cast<std::size_t>(b) * groups + gi] = is;
      for (std::size_t p = 0; p < hw; ++p) {
        for (int j = gi * cg; j < (gi + 1) * cg; ++j) {
          const std::size_t idx = static_cast<std::size_t>(b) * hw * c + p * c + j;
          const Real h = (xb[p * c + j] - mu) * is;
          (*xhat)[idx] = h;
          out[idx] = h * gamma.at(j) + beta.at(j);
        }
      }
    }
  }
  return make_result(x.shape(), std::move(out), {x, gamma, beta},
                     [=](Node& self) {
    Node& nx = in(self, 0);
    Node& ng = in(self, 1);
    Node& nb = in(self, 2);
    const Real* dy = self.grad.data();
    if (ng.requires_grad || nb.requires_grad) {
      auto& gg = ng.grad_buffer();
      auto& gb = nb.grad_buffer();
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const int j = static_cast<int>(i % c);
        gg[j] += dy[i] * (*xhat)[i];
        gb[j] += dy[i];
      }
    }
    if (!nx.requires_grad) return;
    auto& gx = nx.grad_buffer();
    for (int b = 0; b < n; ++b) {
      const std::size_t base = static_cast<std::size_t>(b) * hw * c;
      for (int gi = 0; gi < groups; ++gi) {
        Real m1 = 0, m2 = 0;
        for (std::size_t p = 0; p < hw; ++p) {
          for (int j = gi * cg; j < (gi + 1) * cg; ++j) {
            const std::size_t idx = base + p * c + j;
            const Real dh = dy[idx] * ng.value[j];
            m1 += dh;
            m2 += dh * (*xhat)[idx];
          }
        }
        m1 /= count;
        m2 /= count;
        const Real is = (*inv_std)[static_cast<std::size_t>(b) * groups + gi];
        for (std::size_t p = 0; p < hw; ++p) {
          for (int j = gi * cg; j < (gi + 1) * cg; ++j) {
            const std::size_t idx = base + p * c + j;
            const Real dh = dy[idx] * ng.value[j];
            gx[idx] += is * (dh - m1 - (*xhat)[idx] * m2);
          }
        }
      }
    }
  });
}

Tensor maxpool2d_nhwc(const Tensor& x, int kernel, int stride, int pad) {
  if (x.ndim() != 4) shape_error("maxpool2d_nhwc", "expected NHWC");
  const int n = x.dim(0), h = x.dim(1), wd = x.dim(2), c = x.dim(3);
  const int ho = conv_out_size(h, kernel, stride, pad), wo = conv_out_size(wd, kernel, stride, pad);
  if (ho < 1 || wo < 1) shape_error("maxpool2d_nhwc", "kernel larger than padded input");
  const std::size_t total = static_cast<std::size_t>(n) * ho * wo * c;
  std::vector<Real> out(total);
  auto arg = std::make_shared<std::vector<std::size_t>>(total);
  const bool trace = kink::active();
  for (int b = 0; b < n; ++b) {
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        for (int j = 0; j < c; ++j) {
          Real best = -std::numeric_limits<Real>::infinity();
          std::size_t best_i = 0;
          for (int ky = 0; ky < kernel; ++ky) {
            const int y = oy * stride - pad + ky;
            if (y < 0 || y >= h) continue;
            for (int kx = 0; kx < kernel; ++kx) {
              const int xx = ox * stride - pad + kx;
              if (xx < 0 || xx >= wd) continue;
              const std::size_t i = ((static_cast<std::size_t>(b) * h + y) * wd + xx) * c + j;
              if (x.at(i) > best) {
                best = x.at(i);
                best_i = i;
              }
            }
          }
          const std::size_t o = ((static_cast<std::size_t>(b) * ho + oy) * wo + ox) * c + j;
          out[o] = best;
          (*arg)[o] = best_i;
          if (trace) kink::record(best_i);
        }
      }
    }
  }
  return make_result({n, ho, wo, c}, std::move(out), {x}, [arg](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (std::size_t o = 0; o < self.grad.size(); ++o) g[(*arg)[o]] += self.grad[o];
  });
}

Tensor global_avg_pool_nhwc(const Tensor& x) {
  if (x.ndim() != 4) shape_error("global_avg_pool_nhwc", "expected NHWC");
  const int n = x.dim(0), c = x.dim(3);
  const std::size_t hw = static_cast<std::size_t>(x.dim(1)) * x.dim(2);
  std::vector<Real> out(static_cast<std::size_t>(n) * c, Real(0));
  for (int b = 0; b < n; ++b) {
    for (std::size_t p = 0; p < hw; ++p) {
      for (int j = 0; j < c; ++j) out[b * c + j] += x.at((b * hw + p) * c + j);
    }
  }
  const Real inv = Real(1) / static_cast<Real>(hw);
  for (auto& v : out) v *= inv;
  return make_result({n, c}, std::move(out), {x}, [n, c, hw, inv](Node& self) {
    auto& g = in(self, 0).grad_buffer();
    for (int b = 0; b < n; ++b) {
      for (std::size_t p = 0; p < hw; ++p) {
        for (int j = 0; j < c; ++j) g[(b * hw + p) * c + j] += self.grad[b * c + j] * inv;
      }
    }
  });
}

Tensor row_l2_distance(const Tensor& a, const Tensor& b) {
  require_same(a, b, "row_l2_distance");
  require_2d(a, "row_l2_distance");
  const int r = a.rows(), d = a.cols();
  std::vector<Real> out(r);
  for (int i = 0; i < r; ++i) {
    Real s = 0;
    for (int j = 0; j < d; ++j) {
      const Real t = a.at(static_cast<std::size_t>(i) * d + j) - b.at(static_cast<std::size_t>(i) * d + j);
      s += t * t;
    }
    out[i] = std::sqrt(s);
    kink::record(out[i] == Real(0) ? 1 : 0);
  }
  return make_result({r}, std::move(out), {a, b}, [r, d](Node& self) {
    Node& na = in(self, 0);
    Node& nb = in(self, 1);
    for (int i = 0; i < r; ++i) {
      const Real dist = self.value[i];
      if (dist == Real(0)) continue;
      const Real k = self.grad[i] / dist;
      for (int j = 0; j < d; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * d + j;
        const Real diff = na.value[idx] - nb.value[idx];
        if (na.requires_grad) na.grad_buffer()[idx] += k * diff;
        if (nb.requires_grad) nb.grad_buffer()[idx] -= k * diff;
      }
    }
  });
}

}  // namespace RPTTS_PREC_NS
}  // namespace rptts::nn

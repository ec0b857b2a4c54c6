// Copyright 2026 The Trajformer Authors
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

#include "trajformer/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace trajformer::ops
{
namespace
{

template <typename T>
void require_same_tape(Var<T> a, Var<T> b, const char * op)
{
  if (a.tape != b.tape) {
    throw ContractError(std::string(op) + ": operands recorded on different tapes");
  }
}

template <typename T>
void require_same_shape(Var<T> a, Var<T> b, const char * op)
{
  require_same_tape(a, b, op);
  if (a.shape() != b.shape()) {
    throw DimensionError(
      std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
      shape_string(b.shape()));
  }
}

template <typename T>
void require_rank2(Var<T> a, const char * op)
{
  if (a.shape().size() != 2) {
    throw DimensionError(std::string(op) + ": expected rank-2 operand, got " +
                         shape_string(a.shape()));
  }
}

// C[M x N] += A[M x K] . B[K x N]
template <typename T>
void gemm_nn(const T * a, const T * b, T * c, std::size_t m, std::size_t k, std::size_t n)
{
  for (std::size_t i = 0; i < m; ++i) {
    T * crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      if (av == T(0)) {
        continue;
      }
      const T * brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += av * brow[j];
      }
    }
  }
}

// C[M x K] += G[M x N] . B[K x N]^T
template <typename T>
void gemm_nt(const T * g, const T * b, T * c, std::size_t m, std::size_t n, std::size_t k)
{
  for (std::size_t i = 0; i < m; ++i) {
    const T * grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T * brow = b + p * n;
      T acc = T(0);
      for (std::size_t j = 0; j < n; ++j) {
        acc += grow[j] * brow[j];
      }
      c[i * k + p] += acc;
    }
  }
}

// C[K x N] += A[M x K]^T . G[M x N]
template <typename T>
void gemm_tn(const T * a, const T * g, T * c, std::size_t m, std::size_t k, std::size_t n)
{
  for (std::size_t i = 0; i < m; ++i) {
    const T * grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      if (av == T(0)) {
        continue;
      }
      T * crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        crow[j] += av * grow[j];
      }
    }
  }
}

// Shared shape of all unary elementwise ops: y = f(x), dx += dy * f'(x, y).
template <typename T, typename F, typename D>
Var<T> unary(Var<T> a, F f, D df, const char * op)
{
  const Tensor<T> & x = a.value();
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = f(x[i]);
  }
  const std::size_t aid = a.id;
  return a.tape->push(
    std::move(y), {a},
    [aid, df](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      const Tensor<T> & xv = t.value(aid);
      const Tensor<T> & yv = t.value(self);
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i] * df(xv[i], yv[i]);
      }
    },
    op);
}

}  // namespace

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b)
{
  require_same_tape(a, b, "matmul");
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw DimensionError(
      "matmul: inner dimensions differ, " + shape_string(a.shape()) + " . " +
      shape_string(b.shape()));
  }
  Tensor<T> c(Shape{m, n});
  gemm_nn(a.value().data().data(), b.value().data().data(), c.data().data(), m, k, n);
  const std::size_t aid = a.id;
  const std::size_t bid = b.id;
  return a.tape->push(
    std::move(c), {a, b},
    [aid, bid, m, k, n](Tape<T> & t, std::size_t self) {
      const T * g = t.grad(self).data().data();
      if (t.requires_grad(aid)) {
        gemm_nt(g, t.value(bid).data().data(), t.grad_mut(aid).data().data(), m, n, k);
      }
      if (t.requires_grad(bid)) {
        gemm_tn(t.value(aid).data().data(), g, t.grad_mut(bid).data().data(), m, k, n);
      }
    },
    "matmul");
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b)
{
  require_same_tape(a, b, "add");
  const bool broadcast = a.shape() != b.shape();
  if (broadcast && !(b.value().size() == a.value().cols() && b.value().rows() == 1)) {
    throw DimensionError(
      "add: shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  Tensor<T> y = a.value();
  const Tensor<T> & bv = b.value();
  const std::size_t n = bv.size();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += broadcast ? bv[i % n] : bv[i];
  }
  const std::size_t aid = a.id;
  const std::size_t bid = b.id;
  return a.tape->push(
    std::move(y), {a, b},
    [aid, bid, broadcast, n](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      if (t.requires_grad(aid)) {
        Tensor<T> & ga = t.grad_mut(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
        }
      }
      if (t.requires_grad(bid)) {
        Tensor<T> & gb = t.grad_mut(bid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gb[broadcast ? i % n : i] += g[i];
        }
      }
    },
    "add");
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b)
{
  require_same_shape(a, b, "sub");
  Tensor<T> y = a.value();
  const Tensor<T> & bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] -= bv[i];
  }
  const std::size_t aid = a.id;
  const std::size_t bid = b.id;
  return a.tape->push(
    std::move(y), {a, b},
    [aid, bid](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      if (t.requires_grad(aid)) {
        Tensor<T> & ga = t.grad_mut(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i];
        }
      }
      if (t.requires_grad(bid)) {
        Tensor<T> & gb = t.grad_mut(bid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gb[i] -= g[i];
        }
      }
    },
    "sub");
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b)
{
  require_same_shape(a, b, "mul");
  Tensor<T> y = a.value();
  const Tensor<T> & bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] *= bv[i];
  }
  const std::size_t aid = a.id;
  const std::size_t bid = b.id;
  return a.tape->push(
    std::move(y), {a, b},
    [aid, bid](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      if (t.requires_grad(aid)) {
        const Tensor<T> & bv = t.value(bid);
        Tensor<T> & ga = t.grad_mut(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * bv[i];
        }
      }
      if (t.requires_grad(bid)) {
        const Tensor<T> & av = t.value(aid);
        Tensor<T> & gb = t.grad_mut(bid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gb[i] += g[i] * av[i];
        }
      }
    },
    "mul");
}

template <typename T>
Var<T> div(Var<T> a, Var<T> b)
{
  require_same_shape(a, b, "div");
  Tensor<T> y = a.value();
  const Tensor<T> & bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] /= bv[i];
  }
  const std::size_t aid = a.id;
  const std::size_t bid = b.id;
  return a.tape->push(
    std::move(y), {a, b},
    [aid, bid](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      const Tensor<T> & bv = t.value(bid);
      if (t.requires_grad(aid)) {
        Tensor<T> & ga = t.grad_mut(aid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] / bv[i];
        }
      }
      if (t.requires_grad(bid)) {
        const Tensor<T> & yv = t.value(self);
        Tensor<T> & gb = t.grad_mut(bid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gb[i] -= g[i] * yv[i] / bv[i];
        }
      }
    },
    "div");
}

template <typename T>
Var<T> scale(Var<T> a, T c)
{
  return unary(a, [c](T x) { return c * x; }, [c](T, T) { return c; }, "scale");
}

template <typename T>
Var<T> add_scalar(Var<T> a, T c)
{
  return unary(a, [c](T x) { return x + c; }, [](T, T) { return T(1); }, "add_scalar");
}

template <typename T>
Var<T> transpose(Var<T> a)
{
  require_rank2(a, "transpose");
  const std::size_t m = a.shape()[0];
  const std::size_t n = a.shape()[1];
  const Tensor<T> & x = a.value();
  Tensor<T> y(Shape{n, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      y[j * m + i] = x[i * n + j];
    }
  }
  const std::size_t aid = a.id;
  return a.tape->push(
    std::move(y), {a},
    [aid, m, n](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          ga[i * n + j] += g[j * m + i];
        }
      }
    },
    "transpose");
}

template <typename T>
Var<T> softmax(Var<T> a, std::size_t axis)
{
  const Shape & shape = a.shape();
  if (axis >= shape.size()) {
    throw DimensionError(
      "softmax: axis " + std::to_string(axis) + " out of range for " + shape_string(shape));
  }
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (std::size_t i = 0; i < axis; ++i) {
    outer *= shape[i];
  }
  for (std::size_t i = axis + 1; i < shape.size(); ++i) {
    inner *= shape[i];
  }
  const std::size_t len = shape[axis];
  const Tensor<T> & x = a.value();
  Tensor<T> y(shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      T mx = x[base];
      for (std::size_t l = 1; l < len; ++l) {
        mx = std::max(mx, x[base + l * inner]);
      }
      T total = T(0);
      for (std::size_t l = 0; l < len; ++l) {
        const T e = std::exp(x[base + l * inner] - mx);
        y[base + l * inner] = e;
        total += e;
      }
      for (std::size_t l = 0; l < len; ++l) {
        y[base + l * inner] /= total;
      }
    }
  }
  const std::size_t aid = a.id;
  return a.tape->push(
    std::move(y), {a},
    [aid, outer, inner, len](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      const Tensor<T> & yv = t.value(self);
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          const std::size_t base = o * len * inner + in;
          T dot = T(0);
          for (std::size_t l = 0; l < len; ++l) {
            dot += g[base + l * inner] * yv[base + l * inner];
          }
          for (std::size_t l = 0; l < len; ++l) {
            const std::size_t i = base + l * inner;
            ga[i] += yv[i] * (g[i] - dot);
          }
        }
      }
    },
    "softmax");
}

template <typename T>
Var<T> layer_norm(Var<T> x, Var<T> gain, Var<T> bias, T eps)
{
  require_same_tape(x, gain, "layer_norm");
  require_same_tape(x, bias, "layer_norm");
  const std::size_t n = x.value().cols();
  const std::size_t rows = x.value().size() / n;
  if (gain.value().size() != n || bias.value().size() != n) {
    throw DimensionError(
      "layer_norm: gain " + shape_string(gain.shape()) + " / bias " +
      shape_string(bias.shape()) + " do not match last axis of " + shape_string(x.shape()));
  }
  const Tensor<T> & xv = x.value();
  const Tensor<T> & gv = gain.value();
  const Tensor<T> & bv = bias.value();
  Tensor<T> y(xv.shape());
  // Normalized values and inverse std per row, reused by backward.
  Tensor<T> xhat(xv.shape());
  std::vector<T> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T * row = xv.data().data() + r * n;
    T mu = T(0);
    for (std::size_t j = 0; j < n; ++j) {
      mu += row[j];
    }
    mu /= T(n);
    T var = T(0);
    for (std::size_t j = 0; j < n; ++j) {
      var += (row[j] - mu) * (row[j] - mu);
    }
    var /= T(n);
    inv_std[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      const T h = (row[j] - mu) * inv_std[r];
      xhat[r * n + j] = h;
      y[r * n + j] = gv[j] * h + bv[j];
    }
  }
  const std::size_t xid = x.id;
  const std::size_t gid = gain.id;
  const std::size_t bid = bias.id;
  return x.tape->push(
    std::move(y), {x, gain, bias},
    [xid, gid, bid, rows, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](
      Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      const Tensor<T> & gv = t.value(gid);
      if (t.requires_grad(gid)) {
        Tensor<T> & gg = t.grad_mut(gid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gg[i % n] += g[i] * xhat[i];
        }
      }
      if (t.requires_grad(bid)) {
        Tensor<T> & gb = t.grad_mut(bid);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gb[i % n] += g[i];
        }
      }
      if (t.requires_grad(xid)) {
        Tensor<T> & gx = t.grad_mut(xid);
        for (std::size_t r = 0; r < rows; ++r) {
          T mean_d = T(0);
          T mean_dx = T(0);
          for (std::size_t j = 0; j < n; ++j) {
            const T d = g[r * n + j] * gv[j];
            mean_d += d;
            mean_dx += d * xhat[r * n + j];
          }
          mean_d /= T(n);
          mean_dx /= T(n);
          for (std::size_t j = 0; j < n; ++j) {
            const T d = g[r * n + j] * gv[j];
            gx[r * n + j] += inv_std[r] * (d - mean_d - xhat[r * n + j] * mean_dx);
          }
        }
      }
    },
    "layer_norm");
}

template <typename T>
Var<T> gelu(Var<T> a)
{
  const T inv_sqrt2 = T(1) / std::numbers::sqrt2_v<T>;
  const T inv_sqrt2pi = T(1) / std::sqrt(T(2) * std::numbers::pi_v<T>);
  return unary(
    a, [inv_sqrt2](T x) { return T(0.5) * x * (T(1) + std::erf(x * inv_sqrt2)); },
    [inv_sqrt2, inv_sqrt2pi](T x, T) {
      const T cdf = T(0.5) * (T(1) + std::erf(x * inv_sqrt2));
      return cdf + x * inv_sqrt2pi * std::exp(T(-0.5) * x * x);
    },
    "gelu");
}

template <typename T>
Var<T> tanh(Var<T> a)
{
  return unary(
    a, [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; }, "tanh");
}

template <typename T>
Var<T> sigmoid(Var<T> a)
{
  return unary(
    a,
    [](T x) {
      if (x >= T(0)) {
        return T(1) / (T(1) + std::exp(-x));
      }
      const T e = std::exp(x);
      return e / (T(1) + e);
    },
    [](T, T y) { return y * (T(1) - y); }, "sigmoid");
}

template <typename T>
Var<T> softplus(Var<T> a)
{
  return unary(
    a, [](T x) { return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x))); },
    [](T x, T) {
      if (x >= T(0)) {
        return T(1) / (T(1) + std::exp(-x));
      }
      const T e = std::exp(x);
      return e / (T(1) + e);
    },
    "softplus");
}

template <typename T>
Var<T> exp(Var<T> a)
{
  return unary(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; }, "exp");
}

template <typename T>
Var<T> log(Var<T> a)
{
  return unary(a, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; }, "log");
}

template <typename T>
Var<T> square(Var<T> a)
{
  return unary(a, [](T x) { return x * x; }, [](T x, T) { return T(2) * x; }, "square");
}

template <typename T>
Var<T> slice_cols(Var<T> a, std::size_t begin, std::size_t end)
{
  require_rank2(a, "slice_cols");
  const std::size_t m = a.shape()[0];
  const std::size_t n = a.shape()[1];
  if (begin >= end || end > n) {
    throw DimensionError(
      "slice_cols: range [" + std::to_string(begin) + ", " + std::to_string(end) +
      ") invalid for " + shape_string(a.shape()));
  }
  const std::size_t w = end - begin;
  const Tensor<T> & x = a.value();
  Tensor<T> y(Shape{m, w});
  for (std::size_t i = 0; i < m; ++i) {
    std::copy_n(x.data().data() + i * n + begin, w, y.data().data() + i * w);
  }
  const std::size_t aid = a.id;
  return a.tape->push(
    std::move(y), {a},
    [aid, m, n, w, begin](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          ga[i * n + begin + j] += g[i * w + j];
        }
      }
    },
    "slice_cols");
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>> & parts)
{
  if (parts.empty()) {
    throw ContractError("concat_cols: no operands");
  }
  const std::size_t m = parts[0].rows();
  std::vector<std::size_t> widths;
  std::vector<std::size_t> ids;
  std::size_t total = 0;
  for (const auto & p : parts) {
    require_same_tape(parts[0], p, "concat_cols");
    require_rank2(p, "concat_cols");
    if (p.rows() != m) {
      throw DimensionError(
        "concat_cols: row count mismatch " + shape_string(parts[0].shape()) + " vs " +
        shape_string(p.shape()));
    }
    widths.push_back(p.cols());
    ids.push_back(p.id);
    total += p.cols();
  }
  Tensor<T> y(Shape{m, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T> & x = parts[k].value();
    for (std::size_t i = 0; i < m; ++i) {
      std::copy_n(x.data().data() + i * widths[k], widths[k], y.data().data() + i * total + offset);
    }
    offset += widths[k];
  }
  return parts[0].tape->push(
    std::move(y), parts,
    [ids, widths, m, total](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      std::size_t offset = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (t.requires_grad(ids[k])) {
          Tensor<T> & gp = t.grad_mut(ids[k]);
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < widths[k]; ++j) {
              gp[i * widths[k] + j] += g[i * total + offset + j];
            }
          }
        }
        offset += widths[k];
      }
    },
    "concat_cols");
}

template <typename T>
Var<T> gather_rows(Var<T> a, const std::vector<std::size_t> & index)
{
  const std::size_t n = a.value().cols();
  const std::size_t m = a.value().size() / n;
  for (std::size_t r : index) {
    if (r >= m) {
      throw DimensionError(
        "gather_rows: row " + std::to_string(r) + " out of range for " + shape_string(a.shape()));
    }
  }
  const Tensor<T> & x = a.value();
  Tensor<T> y(Shape{index.size(), n});
  for (std::size_t i = 0; i < index.size(); ++i) {
    std::copy_n(x.data().data() + index[i] * n, n, y.data().data() + i * n);
  }
  const std::size_t aid = a.id;
  return a.tape->push(
    std::move(y), {a},
    [aid, index, n](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t i = 0; i < index.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          ga[index[i] * n + j] += g[i * n + j];
        }
      }
    },
    "gather_rows");
}

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>> & parts)
{
  if (parts.empty()) {
    throw ContractError("concat_rows: no operands");
  }
  const std::size_t n = parts[0].cols();
  std::vector<std::size_t> ids;
  std::vector<std::size_t> sizes;
  std::size_t rows = 0;
  for (const auto & p : parts) {
    require_same_tape(parts[0], p, "concat_rows");
    if (p.cols() != n) {
      throw DimensionError(
        "concat_rows: column count mismatch " + shape_string(parts[0].shape()) + " vs " +
        shape_string(p.shape()));
    }
    ids.push_back(p.id);
    sizes.push_back(p.value().size());
    rows += p.value().size() / n;
  }
  Tensor<T> y(Shape{rows, n});
  std::size_t offset = 0;
  for (const auto & p : parts) {
    std::copy(p.value().data().begin(), p.value().data().end(), y.data().begin() + offset);
    offset += p.value().size();
  }
  return parts[0].tape->push(
    std::move(y), parts,
    [ids, sizes](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      std::size_t offset = 0;
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (t.requires_grad(ids[k])) {
          Tensor<T> & gp = t.grad_mut(ids[k]);
          for (std::size_t i = 0; i < sizes[k]; ++i) {
            gp[i] += g[offset + i];
          }
        }
        offset += sizes[k];
      }
    },
    "concat_rows");
}

template <typename T>
Var<T> sum(Var<T> a)
{
  T total = T(0);
  for (T v : a.value().data()) {
    total += v;
  }
  const std::size_t aid = a.id;
  return a.tape->push(
    Tensor<T>::scalar(total), {a},
    [aid](Tape<T> & t, std::size_t self) {
      const T g = t.grad(self)[0];
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t i = 0; i < ga.size(); ++i) {
        ga[i] += g;
      }
    },
    "sum");
}

template <typename T>
Var<T> mean(Var<T> a)
{
  return scale(sum(a), T(1) / T(a.value().size()));
}

template <typename T>
Var<T> reshape(Var<T> a, Shape shape)
{
  Tensor<T> y = a.value();
  y.reshape(std::move(shape));
  const std::size_t aid = a.id;
  return a.tape->push(
    std::move(y), {a},
    [aid](Tape<T> & t, std::size_t self) {
      const Tensor<T> & g = t.grad(self);
      Tensor<T> & ga = t.grad_mut(aid);
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
      }
    },
    "reshape");
}

#define TRAJFORMER_INSTANTIATE_OPS(T)                                                     \
  template Var<T> matmul<T>(Var<T>, Var<T>);                                              \
  template Var<T> add<T>(Var<T>, Var<T>);                                                 \
  template Var<T> sub<T>(Var<T>, Var<T>);                                                 \
  template Var<T> mul<T>(Var<T>, Var<T>);                                                 \
  template Var<T> div<T>(Var<T>, Var<T>);                                                 \
  template Var<T> scale<T>(Var<T>, T);                                                    \
  template Var<T> add_scalar<T>(Var<T>, T);                                               \
  template Var<T> transpose<T>(Var<T>);                                                   \
  template Var<T> softmax<T>(Var<T>, std::size_t);                                        \
  template Var<T> layer_norm<T>(Var<T>, Var<T>, Var<T>, T);                               \
  template Var<T> gelu<T>(Var<T>);                                                        \
  template Var<T> tanh<T>(Var<T>);                                                        \
  template Var<T> sigmoid<T>(Var<T>);                                                     \
  template Var<T> softplus<T>(Var<T>);                                                    \
  template Var<T> exp<T>(Var<T>);                                                         \
  template Var<T> log<T>(Var<T>);                                                         \
  template Var<T> square<T>(Var<T>);                                                      \
  template Var<T> slice_cols<T>(Var<T>, std::size_t, std::size_t);                        \
  template Var<T> concat_cols<T>(const std::vector<Var<T>> &);                            \
  template Var<T> gather_rows<T>(Var<T>, const std::vector<std::size_t> &);               \
  template Var<T> concat_rows<T>(const std::vector<Var<T>> &);                            \
  template Var<T> sum<T>(Var<T>);                                                         \
  template Var<T> mean<T>(Var<T>);                                                        \
  template Var<T> reshape<T>(Var<T>, Shape);

TRAJFORMER_INSTANTIATE_OPS(float)
TRAJFORMER_INSTANTIATE_OPS(double)

#undef TRAJFORMER_INSTANTIATE_OPS

}  // namespace trajformer::ops

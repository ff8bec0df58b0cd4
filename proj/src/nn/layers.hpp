// Copyright 2026 The smsie Authors.
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "nn/tensor.hpp"

namespace smsie::nn {

// ---- embedding ----

// Rows of `table` selected by ids; id 0 is padding and always yields zeros.
template <typename T>
Tensor<T> embed(std::span<const std::int32_t> ids, const Tensor<T>& table) {
  const std::size_t dim = table.cols();
  Tensor<T> out({ids.size(), dim});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= table.rows()) {
      fail(ErrorKind::kInvalidArgument, "embedding id out of range: " + std::to_string(id));
    }
    if (id == 0) continue;
    std::copy_n(table.row(id), dim, out.row(i));
  }
  return out;
}

template <typename T>
void embed_backward(std::span<const std::int32_t> ids, const Tensor<T>& dout, Tensor<T>& dtable) {
  const std::size_t dim = dtable.cols();
  for (std::size_t i = 0; i < ids.size() && i < dout.rows(); ++i) {
    if (ids[i] == 0) continue;
    axpy(T(1), dout.row(i), dtable.row(ids[i]), dim);
  }
}

// ---- convolution ----

inline std::size_t conv_offset(std::size_t region) { return (region - 1) / 2; }

// "Same" convolution with ReLU. Input rows at or beyond x.rows() count as
// zero padding, so out_len may exceed x.rows(). Kernel is region×D×F.
template <typename T>
Tensor<T> conv1d(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias,
                 std::size_t out_len) {
  if (kernel.shape.size() != 3 || bias.size() != kernel.shape[2]) {
    fail(ErrorKind::kInvalidArgument, "conv1d: malformed kernel or bias");
  }
  const std::size_t region = kernel.shape[0], dim = kernel.shape[1], filters = kernel.shape[2];
  if (x.rows() > 0 && x.cols() != dim) fail(ErrorKind::kInvalidArgument, "conv1d: input width mismatch");
  const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(conv_offset(region));
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(x.rows());
  Tensor<T> out({out_len, filters});
  for (std::size_t t = 0; t < out_len; ++t) {
    T* o = out.row(t);
    std::copy_n(bias.values.data(), filters, o);
    for (std::size_t i = 0; i < region; ++i) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + i) - off;
      if (src < 0 || src >= rows) continue;
      const T* xr = x.row(static_cast<std::size_t>(src));
      const T* k = kernel.values.data() + i * dim * filters;
      for (std::size_t c = 0; c < dim; ++c) {
        if (xr[c] != T(0)) axpy(xr[c], k + c * filters, o, filters);
      }
    }
    for (std::size_t f = 0; f < filters; ++f) o[f] = std::max(o[f], T(0));
  }
  return out;
}

// Accumulates kernel/bias gradients and adds the input gradient into dx
// (which must be shaped like x).
template <typename T>
void conv1d_backward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& out,
                     const Tensor<T>& dout, Tensor<T>* dx, Tensor<T>& dkernel, Tensor<T>& dbias) {
  const std::size_t region = kernel.shape[0], dim = kernel.shape[1], filters = kernel.shape[2];
  const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(conv_offset(region));
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(x.rows());
  std::vector<T> dpre(filters);
  for (std::size_t t = 0; t < out.rows(); ++t) {
    const T* o = out.row(t);
    const T* g = dout.row(t);
    bool any = false;
    for (std::size_t f = 0; f < filters; ++f) {
      dpre[f] = o[f] > T(0) ? g[f] : T(0);
      any = any || dpre[f] != T(0);
    }
    if (!any) continue;
    axpy(T(1), dpre.data(), dbias.values.data(), filters);
    for (std::size_t i = 0; i < region; ++i) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + i) - off;
      if (src < 0 || src >= rows) continue;
      const T* xr = x.row(static_cast<std::size_t>(src));
      const T* k = kernel.values.data() + i * dim * filters;
      T* dk = dkernel.values.data() + i * dim * filters;
      T* dxr = dx ? dx->row(static_cast<std::size_t>(src)) : nullptr;
      for (std::size_t c = 0; c < dim; ++c) {
        if (xr[c] != T(0)) axpy(xr[c], dpre.data(), dk + c * filters, filters);
        if (dxr) dxr[c] += dot(k + c * filters, dpre.data(), filters);
      }
    }
  }
}

// ---- pooling ----

template <typename T>
struct Pooled {
  Tensor<T> out;
  std::vector<std::uint32_t> argmax;  // source row per output element
};

inline std::size_t pooled_length(std::size_t len, std::size_t stride) {
  return (len + stride - 1) / stride;
}

// Max over windows [p*stride, p*stride+window) clipped to the input; ties
// resolve to the lowest row.
template <typename T>
Pooled<T> maxpool_time(const Tensor<T>& x, std::size_t window, std::size_t stride) {
  if (window < 1 || stride < 1) fail(ErrorKind::kInvalidArgument, "maxpool: window and stride must be >= 1");
  const std::size_t len = x.rows(), width = x.cols();
  const std::size_t plen = pooled_length(len, stride);
  Pooled<T> r{Tensor<T>({plen, width}), std::vector<std::uint32_t>(plen * width)};
  for (std::size_t p = 0; p < plen; ++p) {
    const std::size_t b = p * stride, e = std::min(len, b + window);
    for (std::size_t f = 0; f < width; ++f) {
      std::size_t best = b;
      for (std::size_t t = b + 1; t < e; ++t) {
        if (x.at(t, f) > x.at(best, f)) best = t;
      }
      r.out.at(p, f) = x.at(best, f);
      r.argmax[p * width + f] = static_cast<std::uint32_t>(best);
    }
  }
  return r;
}

// Column-wise max over all rows; result is a 1×F tensor.
template <typename T>
Pooled<T> global_maxpool(const Tensor<T>& x) {
  if (x.rows() == 0) fail(ErrorKind::kInvalidArgument, "global_maxpool: empty input");
  const std::size_t width = x.cols();
  Pooled<T> r{Tensor<T>({1, width}), std::vector<std::uint32_t>(width, 0)};
  std::copy_n(x.row(0), width, r.out.row(0));
  for (std::size_t t = 1; t < x.rows(); ++t) {
    const T* xr = x.row(t);
    for (std::size_t f = 0; f < width; ++f) {
      if (xr[f] > r.out.values[f]) {
        r.out.values[f] = xr[f];
        r.argmax[f] = static_cast<std::uint32_t>(t);
      }
    }
  }
  return r;
}

// Routes pooled gradients back to the recorded rows of dx.
template <typename T>
void pool_backward(const Pooled<T>& pooled, const Tensor<T>& dout, Tensor<T>& dx) {
  const std::size_t width = pooled.out.cols();
  for (std::size_t p = 0; p < pooled.out.rows(); ++p) {
    for (std::size_t f = 0; f < width; ++f) {
      dx.at(pooled.argmax[p * width + f], f) += dout.at(p, f);
    }
  }
}

// ---- concatenation ----

template <typename T>
Tensor<T> concat_features(const std::vector<const Tensor<T>*>& parts) {
  if (parts.empty()) return {};
  const std::size_t len = parts[0]->rows();
  std::size_t width = 0;
  for (const auto* p : parts) {
    if (p->rows() != len) fail(ErrorKind::kInvalidArgument, "concat: time length mismatch");
    width += p->shape.size() > 1 ? p->shape[1] : 0;
  }
  Tensor<T> out({len, width});
  for (std::size_t t = 0; t < len; ++t) {
    T* o = out.row(t);
    for (const auto* p : parts) {
      const std::size_t w = p->shape.size() > 1 ? p->shape[1] : 0;
      std::copy_n(p->row(t), w, o);
      o += w;
    }
  }
  return out;
}

template <typename T>
Tensor<T> concat_features(const Tensor<T>& a, const Tensor<T>& b) {
  return concat_features<T>({&a, &b});
}

// Splits a concatenated gradient back into column blocks of the given widths.
template <typename T>
std::vector<Tensor<T>> split_features(const Tensor<T>& d, const std::vector<std::size_t>& widths) {
  std::vector<Tensor<T>> out;
  std::size_t col = 0;
  for (auto w : widths) {
    Tensor<T> part({d.rows(), w});
    for (std::size_t t = 0; t < d.rows(); ++t) std::copy_n(d.row(t) + col, w, part.row(t));
    out.push_back(std::move(part));
    col += w;
  }
  return out;
}

// ---- LSTM ----

template <typename T>
inline T sigmoid(T z) {
  return z >= T(0) ? T(1) / (T(1) + std::exp(-z)) : std::exp(z) / (T(1) + std::exp(z));
}

// Gate rows of W (4H × (D+H)) and b (4H) are ordered input, forget,
// candidate, output.
template <typename T>
struct LstmCache {
  std::size_t length = 0;
  Tensor<T> xh;     // per step: [x_t ; h_{t-1}]
  Tensor<T> gates;  // per step: activated i, f, g, o
  Tensor<T> cell;   // per step: c_t
  Tensor<T> hidden; // T × H; rows past length repeat the final state
};

template <typename T>
std::vector<T> lstm_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                            std::size_t length, LstmCache<T>& cache) {
  const std::size_t steps = x.rows();
  const std::size_t hdim = b.size() / 4;
  const std::size_t in = w.cols();
  const std::size_t dim = in - hdim;
  if (length > steps) fail(ErrorKind::kInvalidArgument, "lstm: length exceeds sequence");
  if (w.rows() != 4 * hdim || (steps > 0 && x.cols() != dim)) {
    fail(ErrorKind::kInvalidArgument, "lstm: shape mismatch");
  }
  cache.length = length;
  cache.xh = Tensor<T>({length, in});
  cache.gates = Tensor<T>({length, 4 * hdim});
  cache.cell = Tensor<T>({length, hdim});
  cache.hidden = Tensor<T>({steps, hdim});
  std::vector<T> h(hdim, T(0)), c(hdim, T(0));
  for (std::size_t t = 0; t < length; ++t) {
    T* xh = cache.xh.row(t);
    std::copy_n(x.row(t), dim, xh);
    std::copy_n(h.data(), hdim, xh + dim);
    T* z = cache.gates.row(t);
    for (std::size_t r = 0; r < 4 * hdim; ++r) z[r] = b.values[r] + dot(w.row(r), xh, in);
    for (std::size_t j = 0; j < hdim; ++j) {
      const T i = sigmoid(z[j]);
      const T f = sigmoid(z[hdim + j]);
      const T g = std::tanh(z[2 * hdim + j]);
      const T o = sigmoid(z[3 * hdim + j]);
      z[j] = i;
      z[hdim + j] = f;
      z[2 * hdim + j] = g;
      z[3 * hdim + j] = o;
      c[j] = f * c[j] + i * g;
      h[j] = o * std::tanh(c[j]);
    }
    std::copy_n(c.data(), hdim, cache.cell.row(t));
    std::copy_n(h.data(), hdim, cache.hidden.row(t));
  }
  for (std::size_t t = length; t < steps; ++t) std::copy_n(h.data(), hdim, cache.hidden.row(t));
  return h;
}

// Backpropagation through time from a gradient on the final hidden state.
template <typename T>
void lstm_backward(const LstmCache<T>& cache, const Tensor<T>& w, std::span<const T> dh_final,
                   Tensor<T>* dx, Tensor<T>& dw, Tensor<T>& db) {
  const std::size_t hdim = db.size() / 4;
  const std::size_t in = w.cols();
  const std::size_t dim = in - hdim;
  std::vector<T> dh(dh_final.begin(), dh_final.end());
  std::vector<T> dc(hdim, T(0)), dz(4 * hdim), dxh(in);
  for (std::size_t t = cache.length; t-- > 0;) {
    const T* gate = cache.gates.row(t);
    const T* c = cache.cell.row(t);
    const T* xh = cache.xh.row(t);
    for (std::size_t j = 0; j < hdim; ++j) {
      const T i = gate[j], f = gate[hdim + j], g = gate[2 * hdim + j], o = gate[3 * hdim + j];
      const T tc = std::tanh(c[j]);
      const T c_prev = t > 0 ? cache.cell.at(t - 1, j) : T(0);
      const T dcell = dc[j] + dh[j] * o * (T(1) - tc * tc);
      dz[j] = dcell * g * i * (T(1) - i);
      dz[hdim + j] = dcell * c_prev * f * (T(1) - f);
      dz[2 * hdim + j] = dcell * i * (T(1) - g * g);
      dz[3 * hdim + j] = dh[j] * tc * o * (T(1) - o);
      dc[j] = dcell * f;
    }
    std::fill(dxh.begin(), dxh.end(), T(0));
    for (std::size_t r = 0; r < 4 * hdim; ++r) {
      if (dz[r] == T(0)) continue;
      db.values[r] += dz[r];
      axpy(dz[r], xh, dw.row(r), in);
      axpy(dz[r], w.row(r), dxh.data(), in);
    }
    if (dx) axpy(T(1), dxh.data(), dx->row(t), dim);
    std::copy_n(dxh.data() + dim, hdim, dh.data());
  }
}

// ---- dense / softmax / loss ----

// logits = Wᵀh + b with W stored H×K.
template <typename T>
std::vector<T> dense(std::span<const T> h, const Tensor<T>& w, const Tensor<T>& b) {
  const std::size_t k = b.size();
  if (w.rows() != h.size() || w.cols() != k) fail(ErrorKind::kInvalidArgument, "dense: shape mismatch");
  std::vector<T> logits(b.values.begin(), b.values.end());
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] != T(0)) axpy(h[j], w.row(j), logits.data(), k);
  }
  return logits;
}

// Accumulates dW, db; returns dh.
template <typename T>
std::vector<T> dense_backward(std::span<const T> h, const Tensor<T>& w, std::span<const T> dlogits,
                              Tensor<T>& dw, Tensor<T>& db) {
  const std::size_t k = dlogits.size();
  std::vector<T> dh(h.size());
  axpy(T(1), dlogits.data(), db.values.data(), k);
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] != T(0)) axpy(h[j], dlogits.data(), dw.row(j), k);
    dh[j] = dot(w.row(j), dlogits.data(), k);
  }
  return dh;
}

template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  std::vector<T> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const T mx = *std::max_element(p.begin(), p.end());
  T sum = T(0);
  for (auto& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

template <typename T>
std::vector<T> dense_softmax(std::span<const T> h, const Tensor<T>& w, const Tensor<T>& b) {
  auto logits = dense(h, w, b);
  return softmax<T>(logits);
}

template <typename T>
T cross_entropy(std::span<const T> p, std::size_t y) {
  if (y >= p.size()) fail(ErrorKind::kInvalidArgument, "cross_entropy: class index out of range");
  return -std::log(std::max(p[y], std::numeric_limits<T>::min()));
}

// Gradient of cross_entropy(softmax(z), y) with respect to z.
template <typename T>
std::vector<T> softmax_cross_entropy_grad(std::span<const T> p, std::size_t y) {
  std::vector<T> g(p.begin(), p.end());
  g[y] -= T(1);
  return g;
}

// ---- dropout ----

// Inverted dropout in place. `mask` receives the per-element scale (0 or
// 1/(1-rate)); in inference mode it is left empty and x is untouched.
template <typename T>
void dropout(std::span<T> x, double rate, bool train, Rng* rng, std::vector<T>& mask) {
  mask.clear();
  if (rate < 0.0 || rate >= 1.0) fail(ErrorKind::kInvalidArgument, "dropout rate must be in [0,1)");
  if (!train || rate == 0.0) return;
  if (!rng) fail(ErrorKind::kInvalidArgument, "dropout: training mode needs an rng");
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  mask.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = rng->bernoulli(rate) ? T(0) : keep;
    x[i] *= mask[i];
  }
}

template <typename T>
void dropout_backward(std::span<T> dx, const std::vector<T>& mask) {
  if (mask.empty()) return;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
}

}  // namespace smsie::nn

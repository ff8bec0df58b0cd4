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
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "common/error.hpp"

namespace smsie::nn {

// Dense row-major tensor. For rank > 2, row() views the leading dimension.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, T fill = T(0))
      : shape(std::move(s)), values(count(shape), fill) {}

  static std::size_t count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return rows() == 0 ? 0 : values.size() / rows(); }

  T* row(std::size_t i) { return values.data() + i * cols(); }
  const T* row(std::size_t i) const { return values.data() + i * cols(); }
  T& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  const T& at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  void zero() { std::fill(values.begin(), values.end(), T(0)); }
};

// Named parameters with gradient buffers of identical shape.
template <typename T>
class ParameterStore {
 public:
  std::size_t add(const std::string& name, std::vector<std::size_t> shape) {
    if (index_.count(name)) fail(ErrorKind::kInvalidArgument, "duplicate parameter " + name);
    index_[name] = params_.size();
    names_.push_back(name);
    params_.emplace_back(shape);
    grads_.emplace_back(std::move(shape));
    return params_.size() - 1;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    auto i = find(name);
    if (!i) fail(ErrorKind::kFormat, "missing parameter " + name);
    return *i;
  }

  Tensor<T>& param(std::size_t i) { return params_[i]; }
  const Tensor<T>& param(std::size_t i) const { return params_[i]; }
  Tensor<T>& grad(std::size_t i) { return grads_[i]; }
  const Tensor<T>& grad(std::size_t i) const { return grads_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::size_t size() const { return params_.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
  }

  void zero_grads() {
    for (auto& g : grads_) g.zero();
  }

 private:
  std::vector<Tensor<T>> params_;
  std::vector<Tensor<T>> grads_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Inner kernels. Eight independent accumulators let the compiler vectorize
// reductions without reassociating floating point.
template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int k = 0; k < 8; ++k) acc[k] += a[i + k] * b[i + k];
  }
  T s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

// y += alpha * x
template <typename T>
inline void axpy(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace smsie::nn

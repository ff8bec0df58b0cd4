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

#include <cmath>
#include <cstddef>
#include <vector>

#include "nn/tensor.hpp"

namespace smsie::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments are kept per parameter of the store;
// each step updates only the listed parameters and advances their own step
// counters, so nets sharing a store can be trained in turn.
template <typename T>
class Adam {
 public:
  Adam(const ParameterStore<T>& store, AdamConfig config) : config_(config) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      m_.emplace_back(store.param(i).shape);
      v_.emplace_back(store.param(i).shape);
    }
    steps_.assign(store.size(), 0);
  }

  void step(ParameterStore<T>& store, const std::vector<std::size_t>& which) {
    const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
    const T lr = static_cast<T>(config_.learning_rate), eps = static_cast<T>(config_.epsilon);
    for (auto i : which) {
      const auto t = ++steps_[i];
      const T c1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(t)));
      const T c2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(t)));
      T* p = store.param(i).values.data();
      const T* g = store.grad(i).values.data();
      T* m = m_[i].values.data();
      T* v = v_[i].values.data();
      const std::size_t n = store.param(i).size();
      for (std::size_t k = 0; k < n; ++k) {
        m[k] = b1 * m[k] + (T(1) - b1) * g[k];
        v[k] = b2 * v[k] + (T(1) - b2) * g[k] * g[k];
        p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
      }
    }
  }

  void step(ParameterStore<T>& store) {
    std::vector<std::size_t> all(store.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    step(store, all);
  }

  const Tensor<T>& first_moment(std::size_t i) const { return m_[i]; }
  const Tensor<T>& second_moment(std::size_t i) const { return v_[i]; }

 private:
  AdamConfig config_;
  std::vector<Tensor<T>> m_, v_;
  std::vector<std::size_t> steps_;
};

}  // namespace smsie::nn

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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "nn/layers.hpp"
#include "nn/serialize.hpp"
#include "nn/tensor.hpp"

namespace smsie::classifier {

enum class NetArch { kCnn, kLstm, kCnnLstm };

// One softmax classifier over a token-id sequence. Embedding and conv banks
// are shared between nets in the same store; LSTM and dense weights are
// prefixed with the net name.
template <typename T>
class Net {
 public:
  struct Trace {
    std::size_t length = 0;
    nn::Tensor<T> emb;
    std::vector<nn::Tensor<T>> conv;
    std::vector<nn::Pooled<T>> pooled;
    nn::Tensor<T> seq;
    nn::LstmCache<T> lstm;
    std::vector<T> features;
    std::vector<T> mask;
    std::vector<T> probs;
  };

  Net(NetArch arch, std::string name, std::size_t classes, const nn::LayerSpec& spec,
      std::size_t vocab_size)
      : arch_(arch), name_(std::move(name)), classes_(classes), spec_(spec), vocab_(vocab_size) {}

  NetArch arch() const { return arch_; }
  const std::string& name() const { return name_; }
  std::size_t classes() const { return classes_; }

  // Adds any missing parameters with initial values and resolves indices.
  void declare(nn::ParameterStore<T>& store, Rng& rng) {
    const auto e = spec_.embedding_dim, f = spec_.filters_per_region;
    if (!store.find("embedding")) {
      auto i = store.add("embedding", {vocab_, e});
      auto& t = store.param(i);
      for (std::size_t k = e; k < t.size(); ++k) t.values[k] = static_cast<T>(rng.uniform_real(-0.05, 0.05));
    }
    if (uses_conv()) {
      for (auto r : spec_.region_sizes) {
        const auto base = "conv.r" + std::to_string(r);
        if (store.find(base + ".kernel")) continue;
        glorot(store.param(store.add(base + ".kernel", {r, e, f})), r * e, r * f, rng);
        store.add(base + ".bias", {f});
      }
    }
    if (uses_lstm()) {
      const std::size_t h = spec_.lstm_hidden;
      const std::size_t in = (arch_ == NetArch::kLstm ? e : f * spec_.region_sizes.size()) + h;
      glorot(store.param(store.add(name_ + ".lstm.W", {4 * h, in})), in, 4 * h, rng);
      auto& bi = store.param(store.add(name_ + ".lstm.b_input", {4 * h}));
      for (std::size_t j = h; j < 2 * h; ++j) bi.values[j] = T(1);
      store.add(name_ + ".lstm.b_recurrent", {4 * h});
    }
    glorot(store.param(store.add(name_ + ".dense.W", {feature_width(), classes_})), feature_width(),
           classes_, rng);
    store.add(name_ + ".dense.b", {classes_});
    bind(store);
  }

  // Resolves indices against an existing store (e.g. a deserialized model).
  void bind(const nn::ParameterStore<T>& store) {
    params_.clear();
    emb_ = store.require("embedding");
    params_.push_back(emb_);
    kernels_.clear();
    biases_.clear();
    if (uses_conv()) {
      for (auto r : spec_.region_sizes) {
        const auto base = "conv.r" + std::to_string(r);
        kernels_.push_back(store.require(base + ".kernel"));
        biases_.push_back(store.require(base + ".bias"));
        params_.push_back(kernels_.back());
        params_.push_back(biases_.back());
      }
    }
    if (uses_lstm()) {
      lstm_w_ = store.require(name_ + ".lstm.W");
      lstm_bi_ = store.require(name_ + ".lstm.b_input");
      lstm_bh_ = store.require(name_ + ".lstm.b_recurrent");
      params_.insert(params_.end(), {lstm_w_, lstm_bi_, lstm_bh_});
    }
    dense_w_ = store.require(name_ + ".dense.W");
    dense_b_ = store.require(name_ + ".dense.b");
    params_.insert(params_.end(), {dense_w_, dense_b_});
    if (store.param(dense_w_).shape != std::vector<std::size_t>{feature_width(), classes_}) {
      fail(ErrorKind::kFormat, name_ + ": dense weight shape does not match the layer spec");
    }
  }

  const std::vector<std::size_t>& parameters() const { return params_; }

  // Class probabilities for ids[0..length) padded to ids.size(). Only the
  // positions that can influence the output are computed.
  std::vector<T> forward(const nn::ParameterStore<T>& store, std::span<const std::int32_t> ids,
                         std::size_t length, bool train, Rng* rng, Trace& tr) const {
    const std::size_t max_len = ids.size();
    tr.length = std::min(length, max_len);
    tr.emb = nn::embed<T>(ids.first(tr.length), store.param(emb_));
    std::vector<T> feat;
    if (arch_ == NetArch::kLstm) {
      feat = run_lstm(store, tr.emb, tr.length, tr.lstm);
    } else {
      const bool global = arch_ == NetArch::kCnn;
      std::size_t conv_len;
      std::size_t pooled_len = 0;
      if (global) {
        std::size_t max_off = 0;
        for (auto r : spec_.region_sizes) max_off = std::max(max_off, nn::conv_offset(r));
        conv_len = std::min(max_len, tr.length + max_off + 1);
      } else {
        pooled_len = nn::pooled_length(tr.length, spec_.pool_stride);
        conv_len = pooled_len == 0 ? 0
                                   : std::min(max_len, (pooled_len - 1) * spec_.pool_stride + spec_.pool_window);
      }
      tr.conv.clear();
      tr.pooled.clear();
      std::vector<const nn::Tensor<T>*> parts;
      for (std::size_t k = 0; k < kernels_.size(); ++k) {
        tr.conv.push_back(nn::conv1d(tr.emb, store.param(kernels_[k]), store.param(biases_[k]), conv_len));
      }
      for (std::size_t k = 0; k < kernels_.size(); ++k) {
        tr.pooled.push_back(global ? nn::global_maxpool(tr.conv[k])
                                   : nn::maxpool_time(tr.conv[k], spec_.pool_window, spec_.pool_stride));
      }
      for (const auto& p : tr.pooled) parts.push_back(&p.out);
      tr.seq = nn::concat_features(parts);
      if (global) {
        feat = tr.seq.values;
      } else {
        feat = run_lstm(store, tr.seq, pooled_len, tr.lstm);
      }
    }
    nn::dropout<T>(feat, spec_.dropout, train, rng, tr.mask);
    tr.features = std::move(feat);
    tr.probs = nn::dense_softmax<T>(tr.features, store.param(dense_w_), store.param(dense_b_));
    return tr.probs;
  }

  // Accumulates parameter gradients for d(loss)/d(logits).
  void backward(nn::ParameterStore<T>& store, std::span<const std::int32_t> ids, const Trace& tr,
                std::span<const T> dlogits) const {
    auto dfeat = nn::dense_backward<T>(tr.features, store.param(dense_w_), dlogits,
                                       store.grad(dense_w_), store.grad(dense_b_));
    nn::dropout_backward<T>(dfeat, tr.mask);
    nn::Tensor<T> demb({tr.length, spec_.embedding_dim});
    if (arch_ == NetArch::kLstm) {
      lstm_back(store, tr.lstm, dfeat, &demb);
    } else {
      const std::size_t f = spec_.filters_per_region;
      std::vector<nn::Tensor<T>> dpooled;
      if (arch_ == NetArch::kCnn) {
        nn::Tensor<T> d({1, dfeat.size()});
        d.values = dfeat;
        dpooled = nn::split_features(d, std::vector<std::size_t>(kernels_.size(), f));
      } else {
        nn::Tensor<T> dseq(tr.seq.shape);
        lstm_back(store, tr.lstm, dfeat, &dseq);
        dpooled = nn::split_features(dseq, std::vector<std::size_t>(kernels_.size(), f));
      }
      for (std::size_t k = 0; k < kernels_.size(); ++k) {
        nn::Tensor<T> dconv(tr.conv[k].shape);
        nn::pool_backward(tr.pooled[k], dpooled[k], dconv);
        nn::conv1d_backward(tr.emb, store.param(kernels_[k]), tr.conv[k], dconv, &demb,
                            store.grad(kernels_[k]), store.grad(biases_[k]));
      }
    }
    nn::embed_backward<T>(ids.first(tr.length), demb, store.grad(emb_));
  }

 private:
  bool uses_conv() const { return arch_ != NetArch::kLstm; }
  bool uses_lstm() const { return arch_ != NetArch::kCnn; }

  std::size_t feature_width() const {
    return arch_ == NetArch::kCnn ? spec_.filters_per_region * spec_.region_sizes.size() : spec_.lstm_hidden;
  }

  static void glorot(nn::Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : t.values) v = static_cast<T>(rng.uniform_real(-limit, limit));
  }

  std::vector<T> run_lstm(const nn::ParameterStore<T>& store, const nn::Tensor<T>& x, std::size_t length,
                          nn::LstmCache<T>& cache) const {
    nn::Tensor<T> b = store.param(lstm_bi_);
    nn::axpy(T(1), store.param(lstm_bh_).values.data(), b.values.data(), b.size());
    return nn::lstm_forward(x, store.param(lstm_w_), b, length, cache);
  }

  void lstm_back(nn::ParameterStore<T>& store, const nn::LstmCache<T>& cache, std::span<const T> dh,
                 nn::Tensor<T>* dx) const {
    nn::Tensor<T> db(store.param(lstm_bi_).shape);
    nn::lstm_backward(cache, store.param(lstm_w_), dh, dx, store.grad(lstm_w_), db);
    nn::axpy(T(1), db.values.data(), store.grad(lstm_bi_).values.data(), db.size());
    nn::axpy(T(1), db.values.data(), store.grad(lstm_bh_).values.data(), db.size());
  }

  NetArch arch_;
  std::string name_;
  std::size_t classes_;
  nn::LayerSpec spec_;
  std::size_t vocab_;
  std::size_t emb_ = 0, lstm_w_ = 0, lstm_bi_ = 0, lstm_bh_ = 0, dense_w_ = 0, dense_b_ = 0;
  std::vector<std::size_t> kernels_, biases_, params_;
};

}  // namespace smsie::classifier

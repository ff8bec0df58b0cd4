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

#include "nn/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "common/error.hpp"

namespace smsie::nn {

namespace {

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename U>
  void put(U v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(U));
  }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void str32(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) fail(ErrorKind::kFormat, "model blob truncated");
  }
  template <typename U>
  U get() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, in_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }
  void bytes(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, in_.data() + pos_, n);
    pos_ += n;
  }
  std::string str(std::size_t n) {
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  std::string str32() { return str(get<std::uint32_t>()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const LayerSpec& spec, std::uint64_t vocab_hash,
                  std::uint64_t param_count, const std::map<std::string, std::string>& metadata,
                  std::uint32_t tensors) {
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.put(kModelVersion);
  w.put(spec.embedding_dim);
  w.put(static_cast<std::uint32_t>(spec.region_sizes.size()));
  for (auto r : spec.region_sizes) w.put(r);
  w.put(spec.filters_per_region);
  w.put(spec.lstm_hidden);
  w.put(spec.dropout);
  w.put(spec.pool_window);
  w.put(spec.pool_stride);
  w.put(vocab_hash);
  w.put(param_count);
  w.put(static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [k, v] : metadata) {
    w.str32(k);
    w.str32(v);
  }
  w.put(tensors);
}

}  // namespace

void LayerSpec::validate() const {
  if (embedding_dim == 0 || filters_per_region == 0 || lstm_hidden == 0 || pool_window == 0 ||
      pool_stride == 0 || region_sizes.empty()) {
    fail(ErrorKind::kInvalidArgument, "layer sizes must be positive");
  }
  for (auto r : region_sizes) {
    if (r == 0) fail(ErrorKind::kInvalidArgument, "region sizes must be positive");
  }
  if (!(dropout >= 0.0f && dropout < 1.0f)) fail(ErrorKind::kInvalidArgument, "dropout must be in [0,1)");
}

std::size_t header_size(const LayerSpec& spec, const std::map<std::string, std::string>& metadata) {
  std::vector<std::uint8_t> buf;
  Writer w(buf);
  write_header(w, spec, 0, 0, metadata, 0);
  return buf.size();
}

std::vector<std::uint8_t> serialize_model(const ParameterStore<float>& store, const LayerSpec& spec,
                                          std::uint64_t vocab_hash,
                                          const std::map<std::string, std::string>& metadata) {
  std::vector<std::uint8_t> out;
  out.reserve(header_size(spec, metadata) + store.parameter_count() * sizeof(float) + 64 * store.size());
  Writer w(out);
  write_header(w, spec, vocab_hash, store.parameter_count(), metadata,
               static_cast<std::uint32_t>(store.size()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& name = store.name(i);
    const auto& t = store.param(i);
    if (name.size() > UINT16_MAX) fail(ErrorKind::kInvalidArgument, "parameter name too long");
    w.put(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.put(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.put(static_cast<std::uint32_t>(d));
    w.bytes(t.values.data(), t.values.size() * sizeof(float));
  }
  return out;
}

ModelBlob deserialize_model(const std::vector<std::uint8_t>& blob) {
  Reader r(blob);
  char magic[sizeof kModelMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) fail(ErrorKind::kFormat, "not a model blob (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelVersion) {
    fail(ErrorKind::kFormat, "unsupported model version " + std::to_string(version));
  }
  ModelBlob m;
  m.spec.embedding_dim = r.get<std::uint32_t>();
  const auto regions = r.get<std::uint32_t>();
  r.need(static_cast<std::size_t>(regions) * 4);
  m.spec.region_sizes.resize(regions);
  for (auto& v : m.spec.region_sizes) v = r.get<std::uint32_t>();
  m.spec.filters_per_region = r.get<std::uint32_t>();
  m.spec.lstm_hidden = r.get<std::uint32_t>();
  m.spec.dropout = r.get<float>();
  m.spec.pool_window = r.get<std::uint32_t>();
  m.spec.pool_stride = r.get<std::uint32_t>();
  m.vocab_hash = r.get<std::uint64_t>();
  const auto param_count = r.get<std::uint64_t>();
  const auto meta = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < meta; ++i) {
    auto key = r.str32();
    m.metadata[key] = r.str32();
  }
  const auto tensors = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < tensors; ++i) {
    auto name = r.str(r.get<std::uint16_t>());
    const auto rank = r.get<std::uint8_t>();
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.get<std::uint32_t>();
    const std::size_t n = Tensor<float>::count(shape);
    r.need(n * sizeof(float));
    auto idx = m.store.add(name, shape);
    r.bytes(m.store.param(idx).values.data(), n * sizeof(float));
  }
  if (!r.done()) fail(ErrorKind::kFormat, "trailing bytes after model tensors");
  if (m.store.parameter_count() != param_count) fail(ErrorKind::kFormat, "parameter count mismatch");
  m.spec.validate();
  return m;
}

}  // namespace smsie::nn

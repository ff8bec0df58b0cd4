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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nn/tensor.hpp"

namespace smsie::nn {

struct LayerSpec {
  std::uint32_t embedding_dim = 128;
  std::vector<std::uint32_t> region_sizes{2, 3};
  std::uint32_t filters_per_region = 128;
  std::uint32_t lstm_hidden = 120;
  float dropout = 0.6f;
  std::uint32_t pool_window = 2;
  std::uint32_t pool_stride = 2;

  // Throws kInvalidArgument unless every size is positive and dropout is in [0,1).
  void validate() const;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Decoded model: tensors, layer sizes and free-form string metadata.
struct ModelBlob {
  LayerSpec spec;
  std::uint64_t vocab_hash = 0;
  std::map<std::string, std::string> metadata;
  ParameterStore<float> store;
};

inline constexpr char kModelMagic[8] = {'S', 'M', 'S', 'I', 'E', 'M', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

// Layout (little-endian): magic, u32 version, spec, u64 vocab hash,
// u64 parameter count, u32 metadata count + (u32 len, bytes)×2 each,
// u32 tensor count, then per tensor: u16 name length, name, u8 rank,
// u32 dims, f32 values.
std::vector<std::uint8_t> serialize_model(const ParameterStore<float>& store, const LayerSpec& spec,
                                          std::uint64_t vocab_hash,
                                          const std::map<std::string, std::string>& metadata = {});

ModelBlob deserialize_model(const std::vector<std::uint8_t>& blob);

// Bytes taken by everything before the first tensor.
std::size_t header_size(const LayerSpec& spec, const std::map<std::string, std::string>& metadata = {});

inline std::size_t model_size_bytes(const std::vector<std::uint8_t>& blob) { return blob.size(); }

}  // namespace smsie::nn

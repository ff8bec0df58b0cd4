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

#include <filesystem>
#include <map>
#include <string>

#include "corpus/corpus.hpp"
#include "corpus/synthetic.hpp"
#include "entities/entities.hpp"
#include "preprocess/preprocess.hpp"
#include "render/render.hpp"

namespace smsie::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SMSIE_DATA_DIR) / name;
}

inline preprocess::PatternBank shipped_patterns() {
  return preprocess::PatternBank::load(data_path("patterns.tsv"));
}

inline preprocess::Preprocessor shipped_preprocessor(preprocess::PreprocessConfig config = {}) {
  return preprocess::Preprocessor(shipped_patterns(), preprocess::CityDictionary::load(data_path("cities.txt")),
                                  config);
}

inline entities::EntityExtractor shipped_extractor() {
  return entities::EntityExtractor(shipped_patterns(), entities::ParserSpec::load(data_path("entity_parsers.tsv")),
                                   entities::VendorLexicon::load(data_path("vendors.txt")));
}

inline render::TemplateSet shipped_cards() { return render::TemplateSet::load(data_path("card_templates.txt")); }

inline std::map<int, int> per_leaf(int n) {
  std::map<int, int> spec;
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) spec[leaf] = n;
  return spec;
}

inline std::vector<corpus::SyntheticSms> synthetic(int n_per_leaf, std::uint64_t seed) {
  static const auto bank = corpus::load_template_bank(SMSIE_DATA_DIR);
  Rng rng(seed);
  return corpus::generate_synthetic_corpus(per_leaf(n_per_leaf), bank, rng);
}

}  // namespace smsie::testing

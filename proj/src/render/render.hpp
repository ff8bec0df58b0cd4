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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corpus/taxonomy.hpp"
#include "entities/entities.hpp"

namespace smsie::render {

inline constexpr std::string_view kMissingValue = "—";
inline constexpr int kCardSchemaVersion = 1;

struct FieldSpec {
  std::string key;
  entities::EntityKind kind;
  bool required = false;
  std::string fallback{kMissingValue};
};

struct Template {
  std::string title;
  std::vector<FieldSpec> fields;  // required first
};

class TemplateSet {
 public:
  static TemplateSet load(const std::filesystem::path& path);
  // Throws Error(kFormat) on a malformed file or a leaf without a template.
  static TemplateSet parse(std::string_view content);

  const Template& at(const corpus::TaxonomyLabel& leaf) const { return by_leaf_[leaf.leaf()]; }
  std::uint64_t content_hash() const { return hash_; }

 private:
  std::array<Template, corpus::kLeafCount> by_leaf_;
  std::uint64_t hash_ = 0;
};

struct CardField {
  std::string key;
  std::string value;
  std::optional<preprocess::Span> source;  // unset for a fallback value
};

struct Card {
  corpus::TaxonomyLabel category;
  std::string title;
  std::vector<CardField> fields;
  std::optional<std::string> footnote;
  std::string source_id;
  bool incomplete = false;
};

// Display forms: amounts as rupees with Indian digit grouping, dates as
// "3 May 2019", percents with a trailing '%'.
std::string format_rupees(std::string_view normalized_amount);
std::string format_date(std::string_view iso_date);
std::string display_value(const entities::Entity& entity);

// Fills the template of `found.category` with the first entity of each field's
// kind. Optional fields without an entity are left out; a missing required
// field shows its fallback and flags the card incomplete.
Card render_card(std::string_view source_id, std::string_view text, const entities::EntitySet& found,
                 const TemplateSet& templates);
// Same, with the message leaf checked against the entity set (kInvalidArgument
// on a mismatch).
Card render_card(std::string_view source_id, std::string_view text, const corpus::TaxonomyLabel& leaf,
                 const entities::EntitySet& found, const TemplateSet& templates);

nlohmann::ordered_json card_to_json(const Card& card);
// Cards grouped by category in leaf order; each group keeps input order.
nlohmann::ordered_json cards_to_digest(const std::vector<Card>& cards);
std::string card_to_html(const Card& card);

}  // namespace smsie::render

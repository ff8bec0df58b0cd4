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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corpus/synthetic.hpp"
#include "corpus/taxonomy.hpp"
#include "preprocess/patterns.hpp"

namespace smsie::entities {

enum class EntityKind : std::uint8_t {
  kDate,
  kTime,
  kAmount,
  kPercent,
  kUrl,
  kPhoneNumber,
  kOtpCode,
  kPromoCode,
  kPnr,
  kFlightNumber,
  kTrackingId,
  kAccountTail,
  kBalance,
  kVendor,
};

inline constexpr int kEntityKindCount = 14;

std::string_view kind_name(EntityKind kind);
std::optional<EntityKind> parse_kind(std::string_view name);

struct Entity {
  EntityKind kind;
  preprocess::Span span;
  std::string raw;
  // Date yyyy-mm-dd, Time hh:mm, Amount/Balance "<value> INR", Percent as a
  // decimal, Phone as 10 digits, ids and codes uppercased without separators.
  std::string normalized;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct EntitySet {
  corpus::TaxonomyLabel category;
  std::vector<Entity> entities;  // sorted by span start

  std::vector<const Entity*> of_kind(EntityKind kind) const;
  nlohmann::ordered_json to_json() const;
};

// Normalizers; nullopt when the text does not denote a valid value.
std::optional<std::string> normalize_date(std::string_view raw, int reference_year);
std::optional<std::string> normalize_time(std::string_view raw);
std::optional<std::string> normalize_amount(std::string_view raw);
std::optional<std::string> normalize_phone(std::string_view raw);
std::string normalize_url(std::string_view raw);

// Rules for the non-universal kinds, read from the parser-spec file.
struct KindRules {
  std::vector<preprocess::Pattern> patterns;  // group 1 (if any) is the entity
  std::vector<preprocess::Pattern> triggers;
  std::vector<preprocess::Pattern> values;
  std::size_t window = 0;
  bool after_only = false;
};

class ParserSpec {
 public:
  static ParserSpec load(const std::filesystem::path& path);
  static ParserSpec parse(std::string_view content);

  const KindRules& rules(EntityKind kind) const { return rules_[static_cast<int>(kind)]; }
  std::uint64_t content_hash() const { return hash_; }

 private:
  std::array<KindRules, kEntityKindCount> rules_;
  std::uint64_t hash_ = 0;
};

// Vendor names matched case-insensitively on word boundaries, longest first.
class VendorLexicon {
 public:
  VendorLexicon() = default;
  explicit VendorLexicon(const std::vector<std::string>& names);
  static VendorLexicon load(const std::filesystem::path& vendors_tsv);

  // Spans of vendor mentions in `text` that avoid `claims`.
  std::vector<std::pair<preprocess::Span, std::string>> find(std::string_view text,
                                                              const preprocess::ClaimSet& claims) const;
  std::size_t size() const { return size_; }
  std::uint64_t content_hash() const { return hash_; }

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_first_word_;  // lower -> (lower, canonical)
  std::size_t size_ = 0;
  std::uint64_t hash_ = 0;
};

// Category parsers per leaf, in claiming order. Universal parsers always
// run first and are not listed.
class ParserRegistry {
 public:
  static ParserRegistry standard();

  const std::vector<EntityKind>& category_parsers(const corpus::TaxonomyLabel& leaf) const {
    return by_leaf_[leaf.leaf()];
  }
  void set(const corpus::TaxonomyLabel& leaf, std::vector<EntityKind> kinds) {
    by_leaf_[leaf.leaf()] = std::move(kinds);
  }

 private:
  std::array<std::vector<EntityKind>, corpus::kLeafCount> by_leaf_;
};

// Universal kinds in claim priority order.
inline constexpr std::array<EntityKind, 6> kUniversalKinds = {
    EntityKind::kUrl,  EntityKind::kPhoneNumber, EntityKind::kAmount,
    EntityKind::kDate, EntityKind::kTime,        EntityKind::kPercent};

// Every non-universal kind in claim order (Balance last: it relabels amounts).
inline constexpr std::array<EntityKind, 8> kCategoryKinds = {
    EntityKind::kOtpCode,      EntityKind::kPnr,       EntityKind::kTrackingId, EntityKind::kAccountTail,
    EntityKind::kFlightNumber, EntityKind::kPromoCode, EntityKind::kVendor,     EntityKind::kBalance};

class EntityExtractor {
 public:
  EntityExtractor(preprocess::PatternBank universal, ParserSpec spec, VendorLexicon vendors,
                  ParserRegistry registry = ParserRegistry::standard());

  // Universal parsers, then the leaf's category parsers on unclaimed text.
  // Year-less dates take `reference_year`.
  EntitySet extract(std::string_view text, const corpus::TaxonomyLabel& leaf, int reference_year) const;

  // One kind on its own (Balance also runs the amount parser it relabels).
  std::vector<Entity> parse(EntityKind kind, std::string_view text, int reference_year) const;

  const ParserRegistry& registry() const { return registry_; }

  // Universal kinds followed by the leaf's category kinds.
  std::vector<EntityKind> active_kinds(const corpus::TaxonomyLabel& leaf) const;

 private:
  void run(EntityKind kind, std::string_view text, int reference_year, preprocess::ClaimSet& claims,
           std::vector<Entity>& out) const;
  void run_universal(EntityKind kind, std::string_view text, int reference_year, preprocess::ClaimSet& claims,
                     std::vector<Entity>& out) const;
  void run_triggered(EntityKind kind, std::string_view text, preprocess::ClaimSet& claims,
                     std::vector<Entity>& out) const;

  preprocess::PatternBank universal_;
  ParserSpec spec_;
  VendorLexicon vendors_;
  ParserRegistry registry_;
};

// Entity kind a generator slot corresponds to, if any ("amount2" -> Amount).
std::optional<EntityKind> slot_kind(std::string_view slot_name);

struct KindScore {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;

  double precision() const { return predicted ? static_cast<double>(matched) / predicted : 1.0; }
  double recall() const { return gold ? static_cast<double>(matched) / gold : 1.0; }
};

// Scores extracted entities against generator slots. Only slots of kinds in
// `active` count (a balance slot counts as an amount when Balance is not
// active). An entity matches a slot of the same kind when either surface
// form contains the other; each slot matches at most once.
void score_against_slots(const EntitySet& found, const corpus::SlotList& slots,
                         const std::vector<EntityKind>& active, std::array<KindScore, kEntityKindCount>& scores);

}  // namespace smsie::entities

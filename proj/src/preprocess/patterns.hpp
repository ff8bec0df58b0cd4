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
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace smsie::preprocess {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

// A compiled rule. Patterns use the ECMAScript dialect; flag 'i' selects
// case-insensitive matching.
struct Pattern {
  std::string source;
  std::regex regex;
};

Pattern compile_pattern(const std::string& source, std::string_view flags);

// Set of text ranges already owned by a higher-priority rule.
class ClaimSet {
 public:
  explicit ClaimSet(std::size_t text_size) : text_size_(text_size) {}

  bool overlaps(Span s) const;
  void claim(Span s);
  // Maximal unclaimed ranges in text order.
  std::vector<Span> free_segments() const;
  const std::vector<Span>& claimed() const { return claimed_; }

 private:
  std::size_t text_size_;
  std::vector<Span> claimed_;  // sorted, disjoint
};

// All non-empty matches of `pattern` inside unclaimed segments. When
// `use_group` > 0 and that group participated, its range is reported
// instead of the whole match. Nothing is claimed.
std::vector<Span> match_unclaimed(std::string_view text, const Pattern& pattern,
                                  const ClaimSet& claims, int use_group = 0);

// Claims every unclaimed match of each pattern in order; returns the new spans.
std::vector<Span> claim_all(std::string_view text, const std::vector<Pattern>& patterns,
                            ClaimSet& claims, int use_group = 0);

enum class PlaceholderKind : std::uint8_t { kPhone, kDate, kTime, kCurrency, kUrl, kNumber };

inline constexpr int kPlaceholderCount = 6;

// Claim priority across kinds.
inline constexpr std::array<PlaceholderKind, kPlaceholderCount> kPlaceholderPriority = {
    PlaceholderKind::kUrl,  PlaceholderKind::kPhone, PlaceholderKind::kCurrency,
    PlaceholderKind::kDate, PlaceholderKind::kTime,  PlaceholderKind::kNumber};

std::string_view placeholder_token(PlaceholderKind kind);
std::string_view placeholder_kind_name(PlaceholderKind kind);
std::optional<PlaceholderKind> parse_placeholder_kind(std::string_view name);

// Versioned pattern bank: KIND<TAB>pattern[<TAB>flags] per line.
class PatternBank {
 public:
  static PatternBank load(const std::filesystem::path& path);
  static PatternBank parse(std::string_view content);

  const std::vector<Pattern>& patterns(PlaceholderKind kind) const {
    return by_kind_[static_cast<int>(kind)];
  }
  std::uint64_t content_hash() const { return hash_; }

 private:
  std::array<std::vector<Pattern>, kPlaceholderCount> by_kind_;
  std::uint64_t hash_ = 0;
};

}  // namespace smsie::preprocess

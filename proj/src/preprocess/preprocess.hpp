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
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "preprocess/patterns.hpp"

namespace smsie::preprocess {

// Substituted text plus, per output byte, the source byte it came from
// (-1 inside placeholder tokens).
struct Substitution {
  std::string text;
  std::vector<std::int32_t> origin;
};

// Replaces pattern matches with placeholder tokens, claiming in priority
// order Url > Phone > Currency > Date > Time > Number. Applied until no
// pattern matches, so the result is a fixed point.
Substitution substitute_placeholders_mapped(std::string_view text, const PatternBank& bank);
std::string substitute_placeholders(std::string_view text, const PatternBank& bank);

struct TokenSequence {
  std::vector<std::string> tokens;
  // Byte range of each token in the source; absent for placeholder tokens
  // when the source offsets are unknown.
  std::vector<std::optional<Span>> spans;

  std::size_t size() const { return tokens.size(); }
};

bool is_placeholder_token(std::string_view tok);

// Lowercases, splits on whitespace, peels leading/trailing ASCII punctuation
// into single-character tokens and keeps placeholder tokens verbatim. Spans
// refer to `text`.
TokenSequence tokenize(std::string_view text);

// Same, with spans mapped back through the substitution; placeholder tokens
// carry no span.
TokenSequence tokenize(const Substitution& sub);

// Lowercase city names; multi-word entries stored space-joined.
class CityDictionary {
 public:
  CityDictionary() = default;
  explicit CityDictionary(const std::set<std::string>& names);
  static CityDictionary load(const std::filesystem::path& path);

  bool contains(std::string_view key) const { return names_.count(std::string(key)) > 0; }
  std::size_t max_words() const { return max_words_; }
  std::size_t size() const { return names_.size(); }
  std::uint64_t content_hash() const { return hash_; }

 private:
  std::set<std::string> names_;
  std::size_t max_words_ = 0;
  std::uint64_t hash_ = 0;
};

// Deletes tokens or adjacent token runs naming a city, longest match first.
TokenSequence remove_city_names(const TokenSequence& seq, const CityDictionary& cities);

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::size_t kReservedCount = 8;

  // Reserved tokens only.
  Vocabulary();

  // Drops tokens with frequency < min_frequency, then keeps the
  // (frequency desc, token asc) prefix that fits in max_size.
  static Vocabulary build(const std::vector<TokenSequence>& corpus, std::size_t min_frequency,
                          std::size_t max_size);

  // Rebuilds from an id-ordered token list; the reserved prefix must match.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::int32_t id(std::string_view token) const;
  const std::string& token(std::int32_t id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::uint64_t hash() const;

  static const std::vector<std::string>& reserved_tokens();

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

struct Encoded {
  std::vector<std::int32_t> ids;  // exactly max_len entries
  std::size_t length = 0;         // tokens before padding
};

Encoded encode(const TokenSequence& seq, const Vocabulary& vocab, std::size_t max_len);

struct PreprocessConfig {
  std::size_t max_len = 64;
  std::size_t min_frequency = 3;
  std::size_t max_size = 4000;
};

// Raw text -> token sequence: substitution, tokenization, city removal.
class Preprocessor {
 public:
  Preprocessor(PatternBank patterns, CityDictionary cities, PreprocessConfig config = {});

  TokenSequence tokens(std::string_view text) const;
  Encoded encode(std::string_view text, const Vocabulary& vocab) const;

  const PatternBank& patterns() const { return patterns_; }
  const CityDictionary& cities() const { return cities_; }
  const PreprocessConfig& config() const { return config_; }

  // Identifies pattern bank, city list and length/vocabulary settings.
  std::uint64_t config_hash() const;

 private:
  PatternBank patterns_;
  CityDictionary cities_;
  PreprocessConfig config_;
};

}  // namespace smsie::preprocess

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

#include "preprocess/preprocess.hpp"

#include <algorithm>
#include <map>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::preprocess {

namespace {

constexpr int kMaxSubstitutionPasses = 8;

// Length of the placeholder token starting at text[pos], or 0.
std::size_t placeholder_at(std::string_view text, std::size_t pos) {
  if (text[pos] != '<') return 0;
  for (int k = 0; k < kPlaceholderCount; ++k) {
    auto tok = placeholder_token(static_cast<PlaceholderKind>(k));
    if (text.substr(pos, tok.size()) == tok) return tok.size();
  }
  return 0;
}

bool substitute_once(Substitution& cur, const PatternBank& bank) {
  const std::string_view text = cur.text;
  ClaimSet claims(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (auto n = placeholder_at(text, i)) {
      claims.claim({i, i + n});
      i += n - 1;
    }
  }
  std::vector<std::pair<Span, PlaceholderKind>> found;
  for (auto kind : kPlaceholderPriority) {
    for (const auto& s : claim_all(text, bank.patterns(kind), claims)) found.emplace_back(s, kind);
  }
  if (found.empty()) return false;
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first.begin < b.first.begin; });

  Substitution next;
  next.text.reserve(text.size());
  next.origin.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& [span, kind] : found) {
    for (; pos < span.begin; ++pos) {
      next.text += text[pos];
      next.origin.push_back(cur.origin[pos]);
    }
    auto tok = placeholder_token(kind);
    next.text += tok;
    next.origin.insert(next.origin.end(), tok.size(), -1);
    pos = span.end;
  }
  for (; pos < text.size(); ++pos) {
    next.text += text[pos];
    next.origin.push_back(cur.origin[pos]);
  }
  cur = std::move(next);
  return true;
}

void emit(TokenSequence& seq, std::string tok, std::size_t b, std::size_t e,
          const std::vector<std::int32_t>* origin) {
  std::optional<Span> span;
  if (!origin) {
    span = Span{b, e};
  } else if ((*origin)[b] >= 0 && (*origin)[e - 1] >= 0) {
    span = Span{static_cast<std::size_t>((*origin)[b]),
                static_cast<std::size_t>((*origin)[e - 1]) + 1};
  }
  seq.tokens.push_back(std::move(tok));
  seq.spans.push_back(span);
}

// Splits one placeholder-free run into punctuation and core tokens.
void tokenize_run(std::string_view text, std::size_t b, std::size_t e, TokenSequence& seq,
                  const std::vector<std::int32_t>* origin) {
  std::size_t cb = b, ce = e;
  while (cb < ce && is_ascii_punct(text[cb])) ++cb;
  while (ce > cb && is_ascii_punct(text[ce - 1])) --ce;
  for (std::size_t i = b; i < cb; ++i) emit(seq, std::string(1, text[i]), i, i + 1, origin);
  if (ce > cb) emit(seq, to_lower_ascii(text.substr(cb, ce - cb)), cb, ce, origin);
  for (std::size_t i = ce; i < e; ++i) emit(seq, std::string(1, text[i]), i, i + 1, origin);
}

TokenSequence tokenize_impl(std::string_view text, const std::vector<std::int32_t>* origin) {
  TokenSequence seq;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::size_t run = i;
    for (std::size_t k = i; k < j;) {
      if (auto n = placeholder_at(text.substr(0, j), k)) {
        if (k > run) tokenize_run(text, run, k, seq, origin);
        emit(seq, std::string(text.substr(k, n)), k, k + n, origin);
        k += n;
        run = k;
      } else {
        ++k;
      }
    }
    if (j > run) tokenize_run(text, run, j, seq, origin);
    i = j;
  }
  return seq;
}

}  // namespace

Substitution substitute_placeholders_mapped(std::string_view text, const PatternBank& bank) {
  Substitution cur;
  cur.text = std::string(text);
  cur.origin.resize(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) cur.origin[i] = static_cast<std::int32_t>(i);
  for (int pass = 0; pass < kMaxSubstitutionPasses && substitute_once(cur, bank); ++pass) {
  }
  return cur;
}

std::string substitute_placeholders(std::string_view text, const PatternBank& bank) {
  return substitute_placeholders_mapped(text, bank).text;
}

bool is_placeholder_token(std::string_view tok) {
  return !tok.empty() && placeholder_at(tok, 0) == tok.size();
}

TokenSequence tokenize(std::string_view text) { return tokenize_impl(text, nullptr); }

TokenSequence tokenize(const Substitution& sub) { return tokenize_impl(sub.text, &sub.origin); }

CityDictionary::CityDictionary(const std::set<std::string>& names) {
  std::string joined;
  for (const auto& n : names) {
    std::string key = to_lower_ascii(trim(n));
    if (key.empty()) continue;
    max_words_ = std::max(max_words_, split(key, ' ').size());
    names_.insert(key);
    joined += key;
    joined += '\n';
  }
  hash_ = fnv1a(joined);
}

CityDictionary CityDictionary::load(const std::filesystem::path& path) {
  std::set<std::string> names;
  for (const auto& line : read_data_lines(path)) names.insert(std::string(trim(line)));
  return CityDictionary(names);
}

TokenSequence remove_city_names(const TokenSequence& seq, const CityDictionary& cities) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < seq.size()) {
    std::size_t matched = 0;
    for (std::size_t n = std::min(cities.max_words(), seq.size() - i); n >= 1; --n) {
      std::string key = seq.tokens[i];
      for (std::size_t k = 1; k < n; ++k) key += ' ' + seq.tokens[i + k];
      if (cities.contains(key)) {
        matched = n;
        break;
      }
    }
    if (matched) {
      i += matched;
      continue;
    }
    out.tokens.push_back(seq.tokens[i]);
    out.spans.push_back(seq.spans[i]);
    ++i;
  }
  return out;
}

const std::vector<std::string>& Vocabulary::reserved_tokens() {
  static const std::vector<std::string> kReserved = [] {
    std::vector<std::string> r = {"<PAD>", "<UNK>"};
    for (int k = 0; k < kPlaceholderCount; ++k)
      r.emplace_back(placeholder_token(static_cast<PlaceholderKind>(k)));
    return r;
  }();
  return kReserved;
}

Vocabulary::Vocabulary() : tokens_(reserved_tokens()) { index(); }

void Vocabulary::index() {
  ids_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    ids_.emplace(tokens_[i], static_cast<std::int32_t>(i));
}

Vocabulary Vocabulary::build(const std::vector<TokenSequence>& corpus, std::size_t min_frequency,
                             std::size_t max_size) {
  if (min_frequency < 1) fail(ErrorKind::kInvalidArgument, "min_frequency must be >= 1");
  if (max_size < kReservedCount) fail(ErrorKind::kInvalidArgument, "max_size must be >= 8");
  Vocabulary v;
  std::map<std::string, std::size_t> freq;
  for (const auto& seq : corpus) {
    for (const auto& t : seq.tokens) {
      if (!v.ids_.count(t)) ++freq[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : freq) {
    if (n >= min_frequency) ranked.emplace_back(tok, n);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  const std::size_t room = max_size - kReservedCount;
  if (ranked.size() > room) ranked.resize(room);
  for (auto& [tok, n] : ranked) v.tokens_.push_back(tok);
  v.index();
  return v;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  const auto& reserved = reserved_tokens();
  if (tokens.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    fail(ErrorKind::kFormat, "vocabulary does not start with the reserved tokens");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index();
  if (v.ids_.size() != v.tokens_.size()) fail(ErrorKind::kFormat, "duplicate vocabulary token");
  return v;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = fnv1a("");
  for (const auto& t : tokens_) {
    h = fnv1a(t, h);
    h = fnv1a(std::string_view("\n", 1), h);
  }
  return h;
}

Encoded encode(const TokenSequence& seq, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len < 1) fail(ErrorKind::kInvalidArgument, "max_len must be >= 1");
  Encoded out;
  out.length = std::min(seq.size(), max_len);
  out.ids.assign(max_len, Vocabulary::kPad);
  for (std::size_t i = 0; i < out.length; ++i) out.ids[i] = vocab.id(seq.tokens[i]);
  return out;
}

Preprocessor::Preprocessor(PatternBank patterns, CityDictionary cities, PreprocessConfig config)
    : patterns_(std::move(patterns)), cities_(std::move(cities)), config_(config) {}

TokenSequence Preprocessor::tokens(std::string_view text) const {
  auto sub = substitute_placeholders_mapped(text, patterns_);
  return remove_city_names(tokenize(sub), cities_);
}

Encoded Preprocessor::encode(std::string_view text, const Vocabulary& vocab) const {
  return preprocess::encode(tokens(text), vocab, config_.max_len);
}

std::uint64_t Preprocessor::config_hash() const {
  std::string desc = hex64(patterns_.content_hash()) + hex64(cities_.content_hash()) + ":" +
                     std::to_string(config_.max_len) + ":" +
                     std::to_string(config_.min_frequency) + ":" +
                     std::to_string(config_.max_size);
  return fnv1a(desc);
}

}  // namespace smsie::preprocess

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

#include "preprocess/patterns.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::preprocess {

namespace {

constexpr std::array<std::string_view, kPlaceholderCount> kTokens = {
    "<PHONE>", "<DATE>", "<TIME>", "<CURR>", "<URL>", "<NUM>"};
constexpr std::array<std::string_view, kPlaceholderCount> kKindNames = {
    "Phone", "Date", "Time", "Currency", "Url", "Number"};

}  // namespace

Pattern compile_pattern(const std::string& source, std::string_view flags) {
  auto opts = std::regex::ECMAScript | std::regex::optimize;
  for (char f : flags) {
    if (f == 'i') {
      opts |= std::regex::icase;
    } else {
      fail(ErrorKind::kFormat, std::string("unknown pattern flag '") + f + "'");
    }
  }
  try {
    return Pattern{source, std::regex(source, opts)};
  } catch (const std::regex_error& e) {
    fail(ErrorKind::kFormat, "bad pattern '" + source + "': " + e.what());
  }
}

bool ClaimSet::overlaps(Span s) const {
  auto it = std::lower_bound(claimed_.begin(), claimed_.end(), s,
                             [](const Span& a, const Span& b) { return a.end <= b.begin; });
  return it != claimed_.end() && it->begin < s.end;
}

void ClaimSet::claim(Span s) {
  auto it = std::lower_bound(claimed_.begin(), claimed_.end(), s,
                             [](const Span& a, const Span& b) { return a.begin < b.begin; });
  claimed_.insert(it, s);
}

std::vector<Span> ClaimSet::free_segments() const {
  std::vector<Span> out;
  std::size_t pos = 0;
  for (const auto& c : claimed_) {
    if (c.begin > pos) out.push_back({pos, c.begin});
    pos = std::max(pos, c.end);
  }
  if (pos < text_size_) out.push_back({pos, text_size_});
  return out;
}

std::vector<Span> match_unclaimed(std::string_view text, const Pattern& pattern,
                                  const ClaimSet& claims, int use_group) {
  std::vector<Span> out;
  for (const auto& seg : claims.free_segments()) {
    auto first = text.begin() + static_cast<std::ptrdiff_t>(seg.begin);
    auto last = text.begin() + static_cast<std::ptrdiff_t>(seg.end);
    auto flags = seg.begin > 0 ? std::regex_constants::match_prev_avail
                               : std::regex_constants::match_default;
    for (std::regex_iterator<std::string_view::const_iterator> it(first, last, pattern.regex,
                                                                  flags),
         end;
         it != end; ++it) {
      const auto& m = *it;
      std::size_t b = static_cast<std::size_t>(m[0].first - text.begin());
      std::size_t e = static_cast<std::size_t>(m[0].second - text.begin());
      if (use_group > 0 && static_cast<int>(m.size()) > use_group && m[use_group].matched) {
        b = static_cast<std::size_t>(m[use_group].first - text.begin());
        e = static_cast<std::size_t>(m[use_group].second - text.begin());
      }
      if (e > b) out.push_back({b, e});
    }
  }
  return out;
}

std::vector<Span> claim_all(std::string_view text, const std::vector<Pattern>& patterns,
                            ClaimSet& claims, int use_group) {
  std::vector<Span> out;
  for (const auto& p : patterns) {
    for (const auto& s : match_unclaimed(text, p, claims, use_group)) {
      if (claims.overlaps(s)) continue;
      claims.claim(s);
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Span& a, const Span& b) { return a.begin < b.begin; });
  return out;
}

std::string_view placeholder_token(PlaceholderKind kind) {
  return kTokens[static_cast<int>(kind)];
}

std::string_view placeholder_kind_name(PlaceholderKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<PlaceholderKind> parse_placeholder_kind(std::string_view name) {
  for (int i = 0; i < kPlaceholderCount; ++i) {
    if (kKindNames[i] == name) return static_cast<PlaceholderKind>(i);
  }
  return std::nullopt;
}

PatternBank PatternBank::parse(std::string_view content) {
  PatternBank bank;
  bank.hash_ = fnv1a(content);
  std::size_t lineno = 0;
  for (auto& raw : split(content, '\n')) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '#') continue;
    auto cols = split(raw, '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      fail(ErrorKind::kFormat, "pattern line " + std::to_string(lineno) + ": expected 2-3 columns");
    }
    auto kind = parse_placeholder_kind(cols[0]);
    if (!kind) {
      fail(ErrorKind::kFormat,
           "pattern line " + std::to_string(lineno) + ": unknown kind " + cols[0]);
    }
    bank.by_kind_[static_cast<int>(*kind)].push_back(
        compile_pattern(cols[1], cols.size() == 3 ? cols[2] : ""));
  }
  return bank;
}

PatternBank PatternBank::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

}  // namespace smsie::preprocess

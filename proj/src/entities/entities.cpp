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

#include "entities/entities.hpp"

#include <algorithm>
#include <cctype>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::entities {

using preprocess::ClaimSet;
using preprocess::PlaceholderKind;
using preprocess::Span;

namespace {

constexpr std::array<std::string_view, kEntityKindCount> kKindNames = {
    "Date", "Time",   "Amount",       "Percent",    "Url",         "PhoneNumber", "OtpCode",
    "PromoCode", "Pnr", "FlightNumber", "TrackingId", "AccountTail", "Balance",     "Vendor"};

constexpr std::array<std::string_view, 12> kMonths = {"january", "february", "march",     "april",
                                                      "may",     "june",     "july",      "august",
                                                      "september", "october", "november", "december"};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_word(char c) { return is_digit(c) || is_alpha(c) || c == '_'; }

std::string alnum_upper(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (is_digit(c) || is_alpha(c)) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> digit_runs(std::string_view s) {
  std::vector<std::string> runs;
  for (std::size_t i = 0; i < s.size();) {
    if (!is_digit(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    runs.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return runs;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

std::optional<std::string> iso_date(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1 || d > days_in(y, m)) return std::nullopt;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

// Month number for an alphabetic run such as "may", "sept" or "november".
int month_of(std::string_view word) {
  if (word.size() < 3) return 0;
  if (word == "sept") return 9;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i].substr(0, word.size()) == word) return static_cast<int>(i) + 1;
  }
  return 0;
}

// Number of whitespace-separated words from the end of `a` to the start of
// `b` (adjacent spans are 1 apart).
std::size_t token_distance(std::string_view text, Span a, Span b) {
  const Span& first = a.begin <= b.begin ? a : b;
  const Span& second = a.begin <= b.begin ? b : a;
  if (second.begin <= first.end) return 0;
  std::size_t words = 0;
  bool in_word = false;
  for (std::size_t i = first.end; i < second.begin; ++i) {
    const bool sp = is_space(text[i]);
    if (!sp && !in_word) ++words;
    in_word = !sp;
  }
  return words + 1;
}

std::optional<std::string> normalize_for(EntityKind kind, std::string_view raw, int reference_year) {
  switch (kind) {
    case EntityKind::kDate: return normalize_date(raw, reference_year);
    case EntityKind::kTime: return normalize_time(raw);
    case EntityKind::kAmount:
    case EntityKind::kBalance: return normalize_amount(raw);
    case EntityKind::kPhoneNumber: return normalize_phone(raw);
    case EntityKind::kUrl: return normalize_url(raw);
    case EntityKind::kPercent: {
      std::string v;
      for (char c : raw) {
        if (is_digit(c) || c == '.') v += c;
      }
      if (v.empty()) return std::nullopt;
      return v;
    }
    case EntityKind::kAccountTail:
    case EntityKind::kOtpCode: {
      std::string v;
      for (char c : raw) {
        if (is_digit(c)) v += c;
      }
      return v;
    }
    case EntityKind::kPromoCode: return std::string(raw);
    case EntityKind::kPnr:
    case EntityKind::kFlightNumber:
    case EntityKind::kTrackingId: return alnum_upper(raw);
    case EntityKind::kVendor: return std::string(raw);
  }
  return std::nullopt;
}

std::optional<PlaceholderKind> bank_kind(EntityKind kind) {
  switch (kind) {
    case EntityKind::kUrl: return PlaceholderKind::kUrl;
    case EntityKind::kPhoneNumber: return PlaceholderKind::kPhone;
    case EntityKind::kAmount: return PlaceholderKind::kCurrency;
    case EntityKind::kDate: return PlaceholderKind::kDate;
    case EntityKind::kTime: return PlaceholderKind::kTime;
    default: return std::nullopt;
  }
}

}  // namespace

std::string_view kind_name(EntityKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<EntityKind> parse_kind(std::string_view name) {
  for (int i = 0; i < kEntityKindCount; ++i) {
    if (kKindNames[i] == name) return static_cast<EntityKind>(i);
  }
  return std::nullopt;
}

std::optional<std::string> normalize_date(std::string_view raw, int reference_year) {
  const std::string s = to_lower_ascii(raw);
  int month = 0;
  for (std::size_t i = 0; i < s.size();) {
    if (!is_alpha(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_alpha(s[j])) ++j;
    if (int m = month_of(std::string_view(s).substr(i, j - i))) {
      month = m;
      break;
    }
    i = j;
  }
  const auto runs = digit_runs(s);
  if (month > 0) {
    int day = 0, year = reference_year;
    for (const auto& r : runs) {
      if (r.size() == 4) {
        year = std::stoi(r);
      } else if (r.size() <= 2 && day == 0) {
        day = std::stoi(r);
      }
    }
    return iso_date(year, month, day);
  }
  if (runs.size() != 3 || runs[0].size() > 2 || runs[1].size() > 2) return std::nullopt;
  int year = std::stoi(runs[2]);
  if (runs[2].size() == 2) {
    year += 2000;
  } else if (runs[2].size() != 4) {
    return std::nullopt;
  }
  return iso_date(year, std::stoi(runs[1]), std::stoi(runs[0]));
}

std::optional<std::string> normalize_time(std::string_view raw) {
  const std::string s = to_lower_ascii(raw);
  const auto runs = digit_runs(s);
  if (runs.empty()) return std::nullopt;
  int hour = 0, minute = 0;
  if (runs.size() == 1 && runs[0].size() == 4) {
    hour = std::stoi(runs[0].substr(0, 2));
    minute = std::stoi(runs[0].substr(2));
  } else {
    hour = std::stoi(runs[0]);
    if (runs.size() > 1) minute = std::stoi(runs[1]);
  }
  const auto suffix_at = s.find_first_of("ap", s.find_last_of("0123456789"));
  if (suffix_at != std::string::npos) {
    if (hour < 1 || hour > 12) return std::nullopt;
    hour %= 12;
    if (s[suffix_at] == 'p') hour += 12;
  }
  if (hour > 23 || minute > 59) return std::nullopt;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", hour, minute);
  return std::string(buf);
}

std::optional<std::string> normalize_amount(std::string_view raw) {
  const auto first = raw.find_first_of("0123456789");
  const auto last = raw.find_last_of("0123456789");
  if (first == std::string_view::npos) return std::nullopt;
  std::string value;
  for (char c : raw.substr(first, last - first + 1)) {
    if (is_digit(c) || c == '.') value += c;
  }
  if (std::count(value.begin(), value.end(), '.') > 1) return std::nullopt;
  return value + " INR";
}

std::optional<std::string> normalize_phone(std::string_view raw) {
  std::string digits;
  for (char c : raw) {
    if (is_digit(c)) digits += c;
  }
  if (digits.size() == 12 && digits.compare(0, 2, "91") == 0) digits.erase(0, 2);
  if (digits.size() == 11 && digits[0] == '0') digits.erase(0, 1);
  if (digits.size() != 10) return std::nullopt;
  return digits;
}

std::string normalize_url(std::string_view raw) {
  std::string out(raw);
  std::size_t host = 0;
  if (auto p = out.find("://"); p != std::string::npos) host = p + 3;
  std::size_t end = out.find('/', host);
  if (end == std::string::npos) end = out.size();
  for (std::size_t i = 0; i < end; ++i) out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  return out;
}

std::vector<const Entity*> EntitySet::of_kind(EntityKind kind) const {
  std::vector<const Entity*> out;
  for (const auto& e : entities) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

nlohmann::ordered_json EntitySet::to_json() const {
  nlohmann::ordered_json j;
  j["category"] = category.name();
  auto list = nlohmann::ordered_json::array();
  for (const auto& e : entities) {
    nlohmann::ordered_json item;
    item["kind"] = kind_name(e.kind);
    item["start"] = e.span.begin;
    item["end"] = e.span.end;
    item["raw"] = e.raw;
    item["normalized"] = e.normalized;
    list.push_back(std::move(item));
  }
  j["entities"] = std::move(list);
  return j;
}

ParserSpec ParserSpec::parse(std::string_view content) {
  ParserSpec spec;
  spec.hash_ = fnv1a(content);
  std::size_t lineno = 0;
  for (auto& line : split(content, '\n')) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto where = "parser spec line " + std::to_string(lineno) + ": ";
    auto cols = split(line, '\t');
    if (cols.size() < 3 || cols.size() > 4) fail(ErrorKind::kFormat, where + "expected 3-4 columns");
    auto kind = parse_kind(cols[0]);
    if (!kind) fail(ErrorKind::kFormat, where + "unknown kind " + cols[0]);
    auto& r = spec.rules_[static_cast<int>(*kind)];
    const std::string flags = cols.size() == 4 ? cols[3] : "";
    const auto& field = cols[1];
    if (field == "pattern") {
      r.patterns.push_back(preprocess::compile_pattern(cols[2], flags));
    } else if (field == "trigger") {
      r.triggers.push_back(preprocess::compile_pattern(cols[2], flags));
    } else if (field == "value") {
      r.values.push_back(preprocess::compile_pattern(cols[2], flags));
    } else if (field == "window") {
      r.window = static_cast<std::size_t>(std::stoul(cols[2]));
    } else if (field == "after") {
      r.after_only = cols[2] == "1";
    } else {
      fail(ErrorKind::kFormat, where + "unknown field " + field);
    }
  }
  return spec;
}

ParserSpec ParserSpec::load(const std::filesystem::path& path) { return parse(read_file(path)); }

VendorLexicon::VendorLexicon(const std::vector<std::string>& names) {
  std::string joined;
  for (const auto& n : names) {
    const std::string canon(trim(n));
    if (canon.empty()) continue;
    const std::string low = to_lower_ascii(canon);
    std::size_t k = 0;
    while (k < low.size() && is_word(low[k])) ++k;
    const auto first = low.substr(0, k);
    by_first_word_[first].emplace_back(low, canon);
    joined += canon + '\n';
    ++size_;
  }
  for (auto& [k, list] : by_first_word_) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }
  hash_ = fnv1a(joined);
}

VendorLexicon VendorLexicon::load(const std::filesystem::path& vendors_tsv) {
  std::vector<std::string> names;
  for (const auto& line : read_data_lines(vendors_tsv)) {
    auto cols = split(line, '\t');
    names.push_back(cols.size() >= 2 ? cols[1] : cols[0]);
  }
  return VendorLexicon(names);
}

std::vector<std::pair<Span, std::string>> VendorLexicon::find(std::string_view text, const ClaimSet& claims) const {
  std::vector<std::pair<Span, std::string>> out;
  const std::string low = to_lower_ascii(text);
  for (std::size_t i = 0; i < low.size();) {
    if (!is_word(low[i]) || (i > 0 && is_word(low[i - 1]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < low.size() && is_word(low[j])) ++j;
    bool hit = false;
    if (auto it = by_first_word_.find(low.substr(i, j - i)); it != by_first_word_.end()) {
      for (const auto& [name, canon] : it->second) {
        const std::size_t e = i + name.size();
        if (low.compare(i, name.size(), name) != 0) continue;
        if (e < low.size() && is_word(low[e])) continue;
        if (claims.overlaps({i, e})) continue;
        out.push_back({{i, e}, canon});
        i = e;
        hit = true;
        break;
      }
    }
    if (!hit) i = j > i ? j : i + 1;
  }
  return out;
}

ParserRegistry ParserRegistry::standard() {
  using K = EntityKind;
  using corpus::Major;
  using corpus::TaxonomyLabel;
  ParserRegistry r;
  auto at = [&](Major m, std::optional<int> sub, std::vector<EntityKind> kinds) {
    r.set(TaxonomyLabel::make(m, sub), std::move(kinds));
  };
  at(Major::kInfo, std::nullopt, {kCategoryKinds.begin(), kCategoryKinds.end()});
  at(Major::kTransaction, std::nullopt, {K::kAccountTail, K::kVendor, K::kBalance});
  at(Major::kOtp, std::nullopt, {K::kOtpCode, K::kVendor});
  // Reminder: Appointment, Movie, Bus, Train, Flight, Bill, Delivery, Others.
  at(Major::kReminder, 0, {K::kVendor});
  at(Major::kReminder, 1, {K::kPnr, K::kVendor});
  at(Major::kReminder, 2, {K::kPnr, K::kVendor});
  at(Major::kReminder, 3, {K::kPnr});
  at(Major::kReminder, 4, {K::kPnr, K::kFlightNumber, K::kVendor});
  at(Major::kReminder, 5, {K::kAccountTail});
  at(Major::kReminder, 6, {K::kTrackingId});
  at(Major::kReminder, 7, {});
  for (int sub = 0; sub < corpus::kOfferSubCount; ++sub) at(Major::kOffer, sub, {K::kPromoCode, K::kVendor});
  return r;
}

EntityExtractor::EntityExtractor(preprocess::PatternBank universal, ParserSpec spec, VendorLexicon vendors,
                                 ParserRegistry registry)
    : universal_(std::move(universal)),
      spec_(std::move(spec)),
      vendors_(std::move(vendors)),
      registry_(std::move(registry)) {}

void EntityExtractor::run_universal(EntityKind kind, std::string_view text, int reference_year, ClaimSet& claims,
                                    std::vector<Entity>& out) const {
  const auto bk = bank_kind(kind);
  const auto& patterns = bk ? universal_.patterns(*bk) : spec_.rules(kind).patterns;
  for (const auto& p : patterns) {
    for (const auto& s : preprocess::match_unclaimed(text, p, claims, 1)) {
      if (claims.overlaps(s)) continue;
      const std::string raw(text.substr(s.begin, s.size()));
      auto norm = normalize_for(kind, raw, reference_year);
      if (!norm) continue;
      claims.claim(s);
      out.push_back({kind, s, raw, *norm});
    }
  }
}

void EntityExtractor::run_triggered(EntityKind kind, std::string_view text, ClaimSet& claims,
                                    std::vector<Entity>& out) const {
  const auto& rules = spec_.rules(kind);
  std::vector<Span> triggers;
  for (const auto& t : rules.triggers) {
    for (const auto& s : preprocess::match_unclaimed(text, t, claims)) triggers.push_back(s);
  }
  std::sort(triggers.begin(), triggers.end(), [](const Span& a, const Span& b) { return a.begin < b.begin; });
  if (triggers.empty()) return;

  if (kind == EntityKind::kBalance) {
    for (const auto& t : triggers) {
      Entity* best = nullptr;
      for (auto& e : out) {
        if (e.kind != EntityKind::kAmount || e.span.begin < t.end) continue;
        if (token_distance(text, t, e.span) > rules.window) continue;
        if (!best || e.span.begin < best->span.begin) best = &e;
      }
      if (best) best->kind = EntityKind::kBalance;
    }
    return;
  }

  std::vector<Span> values;
  for (const auto& v : rules.values) {
    for (const auto& s : preprocess::match_unclaimed(text, v, claims)) values.push_back(s);
  }
  for (const auto& t : triggers) {
    const Span* best = nullptr;
    std::size_t best_dist = 0;
    for (const auto& v : values) {
      if (claims.overlaps(v) || (v.begin < t.end && v.end > t.begin)) continue;
      if (rules.after_only && v.begin < t.end) continue;
      const auto d = token_distance(text, t, v);
      if (d == 0 || d > rules.window) continue;
      if (!best || d < best_dist) {
        best = &v;
        best_dist = d;
      }
    }
    if (!best) continue;
    const std::string raw(text.substr(best->begin, best->size()));
    claims.claim(*best);
    out.push_back({kind, *best, raw, *normalize_for(kind, raw, 0)});
  }
}

void EntityExtractor::run(EntityKind kind, std::string_view text, int reference_year, ClaimSet& claims,
                          std::vector<Entity>& out) const {
  if (kind == EntityKind::kVendor) {
    for (auto& [span, canon] : vendors_.find(text, claims)) {
      claims.claim(span);
      out.push_back({kind, span, std::string(text.substr(span.begin, span.size())), canon});
    }
    return;
  }
  const auto& rules = spec_.rules(kind);
  if (bank_kind(kind) || !rules.patterns.empty()) {
    run_universal(kind, text, reference_year, claims, out);
  } else {
    run_triggered(kind, text, claims, out);
  }
}

EntitySet EntityExtractor::extract(std::string_view text, const corpus::TaxonomyLabel& leaf,
                                   int reference_year) const {
  EntitySet set;
  set.category = leaf;
  ClaimSet claims(text.size());
  for (auto kind : kUniversalKinds) run(kind, text, reference_year, claims, set.entities);
  for (auto kind : registry_.category_parsers(leaf)) run(kind, text, reference_year, claims, set.entities);
  std::sort(set.entities.begin(), set.entities.end(),
            [](const Entity& a, const Entity& b) { return a.span.begin < b.span.begin; });
  return set;
}

std::vector<EntityKind> EntityExtractor::active_kinds(const corpus::TaxonomyLabel& leaf) const {
  std::vector<EntityKind> kinds(kUniversalKinds.begin(), kUniversalKinds.end());
  const auto& extra = registry_.category_parsers(leaf);
  kinds.insert(kinds.end(), extra.begin(), extra.end());
  return kinds;
}

std::vector<Entity> EntityExtractor::parse(EntityKind kind, std::string_view text, int reference_year) const {
  std::vector<Entity> out;
  ClaimSet claims(text.size());
  if (kind == EntityKind::kBalance) run(EntityKind::kAmount, text, reference_year, claims, out);
  run(kind, text, reference_year, claims, out);
  std::erase_if(out, [&](const Entity& e) { return e.kind != kind; });
  std::sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) { return a.span.begin < b.span.begin; });
  return out;
}

std::optional<EntityKind> slot_kind(std::string_view slot_name) {
  std::string base(slot_name.substr(0, slot_name.find(':')));
  if (auto u = base.find('_'); u != std::string::npos) base.erase(u);
  while (!base.empty() && is_digit(base.back())) base.pop_back();
  static const std::map<std::string, EntityKind, std::less<>> kSlots = {
      {"amount", EntityKind::kAmount},     {"balance", EntityKind::kBalance},
      {"date", EntityKind::kDate},         {"time", EntityKind::kTime},
      {"otp", EntityKind::kOtpCode},       {"promo", EntityKind::kPromoCode},
      {"pct", EntityKind::kPercent},       {"url", EntityKind::kUrl},
      {"phone", EntityKind::kPhoneNumber}, {"pnr", EntityKind::kPnr},
      {"flight", EntityKind::kFlightNumber}, {"tracking", EntityKind::kTrackingId},
      {"acct", EntityKind::kAccountTail},  {"vendor", EntityKind::kVendor}};
  auto it = kSlots.find(base);
  if (it == kSlots.end()) return std::nullopt;
  return it->second;
}

void score_against_slots(const EntitySet& found, const corpus::SlotList& slots,
                         const std::vector<EntityKind>& active, std::array<KindScore, kEntityKindCount>& scores) {
  auto is_active = [&](EntityKind k) { return std::find(active.begin(), active.end(), k) != active.end(); };
  std::vector<std::pair<EntityKind, std::string>> gold;
  for (const auto& [name, value] : slots) {
    auto k = slot_kind(name);
    if (k == EntityKind::kBalance && !is_active(*k)) k = EntityKind::kAmount;
    if (k && is_active(*k)) gold.emplace_back(*k, value);
  }
  std::vector<bool> used(gold.size(), false);
  for (const auto& [k, v] : gold) ++scores[static_cast<int>(k)].gold;
  for (const auto& e : found.entities) {
    auto& sc = scores[static_cast<int>(e.kind)];
    ++sc.predicted;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (used[i] || gold[i].first != e.kind) continue;
      const auto& g = gold[i].second;
      if (e.raw.find(g) != std::string::npos || g.find(e.raw) != std::string::npos) {
        used[i] = true;
        ++sc.matched;
        break;
      }
    }
  }
}

}  // namespace smsie::entities

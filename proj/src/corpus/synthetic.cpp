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

#include "corpus/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::corpus {

namespace {

constexpr std::array<const char*, 12> kMonthShort = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                     "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<const char*, 12> kMonthLong = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};
constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

constexpr std::array<const char*, 20> kMovies = {
    "Kabir Singh",     "Gully Boy",        "War",          "Uri",         "Andhadhun",
    "Lion King",       "Avengers Endgame", "Bala",         "Article",     "Chhichhore",
    "Housefull",       "Joker",            "Frozen",       "Dream Girl",  "Kesari",
    "Mission Mangal",  "Saaho",            "Bharat",       "Badla",       "Luka Chuppi"};

constexpr std::array<const char*, 20> kPromoStems = {
    "SAVE", "FLAT", "WELCOME", "NEW", "FEAST", "TREAT", "FLY", "RIDE", "STAY", "SHOP",
    "DEAL", "MEGA", "HAPPY", "FIRST", "EXTRA", "GET", "BIG", "SUPER", "YUMMY", "BONUS"};

constexpr std::array<const char*, 8> kAirlineCodes = {"AI", "6E", "SG", "UK", "G8", "I5", "QP",
                                                      "IX"};

std::string digits(Rng& rng, int n, bool nonzero_first) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    int lo = (i == 0 && nonzero_first) ? 1 : 0;
    s += static_cast<char>('0' + rng.uniform_range(lo, 9));
  }
  return s;
}

std::string upper_letters(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += static_cast<char>('A' + rng.uniform_int(26));
  return s;
}

std::string lower_alnum(Rng& rng, int n) {
  static constexpr char kChars[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string s;
  for (int i = 0; i < n; ++i) s += kChars[rng.uniform_int(36)];
  return s;
}

std::string indian_grouping(const std::string& n) {
  if (n.size() <= 3) return n;
  std::string head = n.substr(0, n.size() - 3);
  std::string out;
  int count = 0;
  for (auto it = head.rbegin(); it != head.rend(); ++it) {
    if (count > 0 && count % 2 == 0) out += ',';
    out += *it;
    ++count;
  }
  std::reverse(out.begin(), out.end());
  return out + "," + n.substr(n.size() - 3);
}

std::string amount_value(Rng& rng) {
  static constexpr std::array<std::pair<int, int>, 4> kRanges = {
      {{10, 999}, {1000, 9999}, {10000, 99999}, {100000, 999999}}};
  auto [lo, hi] = kRanges[rng.uniform_int(rng.bernoulli(0.9) ? 3 : 4)];
  std::string n = std::to_string(rng.uniform_range(lo, hi));
  if (n.size() > 3 && rng.bernoulli(0.7)) n = indian_grouping(n);
  if (rng.bernoulli(0.2)) n += "." + digits(rng, 2, false);
  return n;
}

std::string amount(Rng& rng) {
  static constexpr std::array<const char*, 7> kPrefixes = {"Rs.", "Rs. ", "Rs ", "INR ",
                                                           "₹", "₹ ", "INR."};
  return std::string(kPrefixes[rng.uniform_int(kPrefixes.size())]) + amount_value(rng);
}

std::string ordinal(int d) {
  const char* suffix = "th";
  if (d % 100 < 11 || d % 100 > 13) {
    if (d % 10 == 1) suffix = "st";
    if (d % 10 == 2) suffix = "nd";
    if (d % 10 == 3) suffix = "rd";
  }
  return std::to_string(d) + suffix;
}

std::string date(Rng& rng) {
  int m = static_cast<int>(rng.uniform_int(12));
  int d = static_cast<int>(rng.uniform_range(1, kMonthDays[m]));
  const char* mon = rng.bernoulli(0.7) ? kMonthShort[m] : kMonthLong[m];
  char buf[48];
  switch (rng.uniform_int(7)) {
    case 0: return ordinal(d) + " " + mon;
    case 1: return std::string(mon) + " " + std::to_string(d);
    case 2: std::snprintf(buf, sizeof buf, "%02d/%02d/2019", d, m + 1); return buf;
    case 3: std::snprintf(buf, sizeof buf, "%02d-%02d-19", d, m + 1); return buf;
    case 4: std::snprintf(buf, sizeof buf, "%02d %s 2019", d, mon); return buf;
    case 5: std::snprintf(buf, sizeof buf, "%s %d, 2019", mon, d); return buf;
    default: return std::to_string(d) + " " + mon;
  }
}

std::string time_of_day(Rng& rng) {
  int h24 = static_cast<int>(rng.uniform_range(6, 22));
  int minute = static_cast<int>(rng.uniform_int(4)) * 15;
  int h12 = h24 % 12 == 0 ? 12 : h24 % 12;
  const char* ampm = h24 < 12 ? "AM" : "PM";
  char buf[32];
  switch (rng.uniform_int(5)) {
    case 0: std::snprintf(buf, sizeof buf, "%d%s", h12, h24 < 12 ? "am" : "pm"); break;
    case 1: std::snprintf(buf, sizeof buf, "%d %s", h12, ampm); break;
    case 2: std::snprintf(buf, sizeof buf, "%d:%02d %s", h12, minute, ampm); break;
    case 3: std::snprintf(buf, sizeof buf, "%02d:%02d", h24, minute); break;
    default:
      std::snprintf(buf, sizeof buf, "%d.%02d %s", h12, minute, h24 < 12 ? "am" : "pm");
  }
  return buf;
}

std::string promo(Rng& rng) {
  std::string s = kPromoStems[rng.uniform_int(kPromoStems.size())];
  switch (rng.uniform_int(3)) {
    case 0: s += std::to_string(rng.uniform_range(1, 30) * 10); break;
    case 1: s += upper_letters(rng, 2) + digits(rng, 2, true); break;
    default: if (s.size() < 4) s += upper_letters(rng, 4 - s.size()); break;
  }
  return s.substr(0, 12);
}

std::string url(Rng& rng, const TemplateBank& bank) {
  std::string domain;
  if (rng.bernoulli(0.6) && !bank.vendors.empty()) {
    auto it = bank.vendors.begin();
    std::advance(it, rng.uniform_int(bank.vendors.size()));
    for (char c : to_lower_ascii(rng.pick(it->second))) {
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) domain += c;
    }
  }
  if (domain.empty()) domain = lower_alnum(rng, 6);
  std::string path = lower_alnum(rng, static_cast<int>(rng.uniform_range(3, 8)));
  switch (rng.uniform_int(5)) {
    case 0: return "http://" + domain + ".com/" + path;
    case 1: return "https://" + domain + ".in/" + path;
    case 2: return "www." + domain + ".com/" + path;
    case 3: return "bit.ly/" + lower_alnum(rng, 6);
    default: return "https://www." + domain + ".com/" + path;
  }
}

std::string phone(Rng& rng) {
  std::string n = digits(rng, 1, false);
  n[0] = static_cast<char>('6' + rng.uniform_int(4));
  n += digits(rng, 9, false);
  switch (rng.uniform_int(5)) {
    case 0: return "+91 " + n;
    case 1: return "+91 " + n.substr(0, 5) + " " + n.substr(5);
    case 2: return "+91-" + n;
    case 3: return "0" + n;
    default: return n;
  }
}

std::string pnr(Rng& rng) {
  std::string s(1, static_cast<char>('1' + rng.uniform_int(5)));
  return s + digits(rng, 9, false);
}

std::string flight(Rng& rng) {
  std::string code = kAirlineCodes[rng.uniform_int(kAirlineCodes.size())];
  static constexpr std::array<const char*, 3> kSep = {"", " ", "-"};
  return code + kSep[rng.uniform_int(3)] +
         digits(rng, static_cast<int>(rng.uniform_range(3, 4)), true);
}

std::string tracking(Rng& rng) {
  int letters = static_cast<int>(rng.uniform_range(2, 4));
  int nd = static_cast<int>(rng.uniform_range(8, 10));
  return upper_letters(rng, letters) + digits(rng, nd, false);
}

std::string account_tail(Rng& rng) {
  static constexpr std::array<const char*, 4> kMasks = {"XX", "XXXX", "**", "xx"};
  return std::string(kMasks[rng.uniform_int(kMasks.size())]) + digits(rng, 4, false);
}

std::string seat(Rng& rng) {
  return std::string(1, static_cast<char>('A' + rng.uniform_int(12))) +
         std::to_string(rng.uniform_range(1, 40));
}

std::string capitalize_words(const std::string& s) {
  std::string out = s;
  bool start = true;
  for (char& c : out) {
    if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    start = (c == ' ');
  }
  return out;
}

std::string fill_slot(const std::string& base, const std::string& arg, const TemplateBank& bank,
                      Rng& rng) {
  if (base == "vendor") {
    std::string cat = arg.empty() ? "general" : arg;
    auto it = bank.vendors.find(cat);
    if (it == bank.vendors.end() || it->second.empty()) {
      fail(ErrorKind::kData, "no vendors for category " + cat);
    }
    return rng.pick(it->second);
  }
  if (base == "amount" || base == "balance") return amount(rng);
  if (base == "date") return date(rng);
  if (base == "time") return time_of_day(rng);
  if (base == "otp") return digits(rng, static_cast<int>(rng.uniform_range(4, 8)), true);
  if (base == "promo") return promo(rng);
  if (base == "pct") return std::to_string(rng.uniform_range(5, 75));
  if (base == "url") return url(rng, bank);
  if (base == "phone") return phone(rng);
  if (base == "city") {
    if (bank.cities.empty()) fail(ErrorKind::kData, "empty city list");
    return capitalize_words(rng.pick(bank.cities));
  }
  if (base == "pnr") return pnr(rng);
  if (base == "flight") return flight(rng);
  if (base == "tracking") return tracking(rng);
  if (base == "acct") return account_tail(rng);
  if (base == "name") {
    if (bank.names.empty()) fail(ErrorKind::kData, "empty name list");
    return rng.pick(bank.names);
  }
  if (base == "movie") return kMovies[rng.uniform_int(kMovies.size())];
  if (base == "mins") return std::to_string(rng.uniform_range(2, 15));
  if (base == "seat") return seat(rng);
  if (base == "screen") return std::to_string(rng.uniform_range(1, 9));
  if (base == "train") return digits(rng, 5, true);
  fail(ErrorKind::kData, "unknown slot {" + base + "}");
}

// Slot name without trailing digits ("time2" -> "time").
std::string slot_base(const std::string& name) {
  std::size_t e = name.size();
  while (e > 0 && name[e - 1] >= '0' && name[e - 1] <= '9') --e;
  return name.substr(0, e);
}

}  // namespace

std::size_t TemplateBank::vendor_count() const {
  std::set<std::string> all;
  for (const auto& [cat, names] : vendors) all.insert(names.begin(), names.end());
  return all.size();
}

TemplateBank load_template_bank(const std::filesystem::path& dir) {
  TemplateBank bank;
  for (const auto& line : read_data_lines(dir / "sms_templates.txt")) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::kFormat, "template line without tab: " + line);
    auto label = TaxonomyLabel::parse(line.substr(0, tab));
    bank.templates[label.leaf()].push_back(line.substr(tab + 1));
  }
  for (const auto& line : read_data_lines(dir / "vendors.txt")) {
    auto parts = split(line, '\t');
    if (parts.size() != 2) fail(ErrorKind::kFormat, "vendor line needs 2 columns: " + line);
    bank.vendors[parts[0]].push_back(parts[1]);
  }
  for (const auto& line : read_data_lines(dir / "cities.txt")) {
    bank.cities.emplace_back(trim(line));
  }
  for (const auto& line : read_data_lines(dir / "names.txt")) {
    bank.names.emplace_back(trim(line));
  }
  return bank;
}

void validate_template_bank(const TemplateBank& bank, std::size_t min_templates,
                            std::size_t min_vendors) {
  for (int leaf = 0; leaf < kLeafCount; ++leaf) {
    auto it = bank.templates.find(leaf);
    std::set<std::string> distinct;
    if (it != bank.templates.end()) distinct.insert(it->second.begin(), it->second.end());
    if (distinct.size() < min_templates) {
      fail(ErrorKind::kData, "too few templates for " + TaxonomyLabel::from_leaf(leaf).name());
    }
  }
  if (bank.vendor_count() < min_vendors) fail(ErrorKind::kData, "too few vendors");
}

SyntheticSms expand_template(const std::string& tmpl, const TaxonomyLabel& label,
                             const TemplateBank& bank, Rng& rng) {
  SyntheticSms out;
  out.sms.label = label;
  std::string& text = out.sms.text;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      text += tmpl[i++];
      continue;
    }
    auto close = tmpl.find('}', i);
    if (close == std::string::npos) fail(ErrorKind::kFormat, "unterminated slot in: " + tmpl);
    std::string inner = tmpl.substr(i + 1, close - i - 1);
    std::string name = inner, arg;
    if (auto colon = inner.find(':'); colon != std::string::npos) {
      name = inner.substr(0, colon);
      arg = inner.substr(colon + 1);
    }
    std::string value = fill_slot(slot_base(name), arg, bank, rng);
    std::string key = name;
    for (int n = 2; std::any_of(out.slots.begin(), out.slots.end(),
                                [&](const auto& s) { return s.first == key; });
         ++n) {
      key = name + "_" + std::to_string(n);
    }
    out.slots.emplace_back(key, value);
    text += value;
    i = close + 1;
  }
  return out;
}

std::vector<SyntheticSms> generate_synthetic_corpus(const std::map<int, int>& spec,
                                                    const TemplateBank& bank, Rng& rng) {
  std::vector<SyntheticSms> out;
  for (const auto& [leaf, count] : spec) {
    if (count <= 0) continue;
    auto label = TaxonomyLabel::from_leaf(leaf);
    auto it = bank.templates.find(leaf);
    if (it == bank.templates.end() || it->second.empty()) {
      fail(ErrorKind::kData, "no templates for " + label.name());
    }
    for (int k = 0; k < count; ++k) {
      out.push_back(expand_template(rng.pick(it->second), label, bank, rng));
    }
  }
  rng.shuffle(std::span<SyntheticSms>(out));
  char buf[32];
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::snprintf(buf, sizeof buf, "syn-%06zu", i + 1);
    out[i].sms.id = buf;
  }
  return out;
}

Corpus to_corpus(const std::vector<SyntheticSms>& items) {
  Corpus c;
  c.reserve(items.size());
  for (const auto& it : items) c.push_back(it.sms);
  return c;
}

void write_slots(std::ostream& out, const std::vector<SyntheticSms>& items) {
  for (const auto& it : items) {
    nlohmann::ordered_json j;
    j["id"] = it.sms.id;
    j["slots"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : it.slots) j["slots"][k] = v;
    out << j.dump() << '\n';
  }
}

std::map<std::string, SlotList> load_slots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open slots file " + path.string());
  std::map<std::string, SlotList> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::ordered_json::parse(line);
      SlotList slots;
      for (auto& [k, v] : j.at("slots").items()) slots.emplace_back(k, v.get<std::string>());
      out[j.at("id").get<std::string>()] = std::move(slots);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kData, "slots line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace smsie::corpus

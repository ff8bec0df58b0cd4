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

#include "corpus/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::corpus {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 16> kReplacementNames = {
    "Asha", "Dinesh", "Meena", "Arun", "Leela", "Gopal", "Tara", "Vinod",
    "Uma", "Kunal", "Isha", "Mohan", "Latha", "Sameer", "Nila", "Hari"};

}  // namespace

LabeledSms parse_record(const std::string& json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kData, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::kData, "malformed record: not an object");
  for (const char* field : {"id", "text", "label"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      fail(ErrorKind::kData, std::string("malformed record: missing string field '") +
                                 field + "'");
    }
  }
  LabeledSms sms;
  sms.id = j["id"].get<std::string>();
  sms.text = j["text"].get<std::string>();
  if (trim(sms.text).empty()) fail(ErrorKind::kData, "empty text for id " + sms.id);
  sms.label = TaxonomyLabel::parse(j["label"].get<std::string>());
  if (j.contains("sender") && j["sender"].is_string()) {
    sms.sender = j["sender"].get<std::string>();
  }
  return sms;
}

Corpus parse_corpus(std::istream& in) {
  Corpus out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      fail(ErrorKind::kData,
           "line " + std::to_string(lineno) + ": duplicate id " + out.back().id);
    }
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open corpus " + path.string());
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& sms : corpus) {
    nlohmann::ordered_json j;
    j["id"] = sms.id;
    j["text"] = sms.text;
    j["label"] = sms.label.name();
    if (sms.sender) j["sender"] = *sms.sender;
    out << j.dump() << '\n';
  }
}

std::set<std::string> load_name_lexicon(const std::filesystem::path& path) {
  std::set<std::string> names;
  for (const auto& line : read_data_lines(path)) {
    auto t = trim(line);
    if (!t.empty()) names.insert(to_lower_ascii(t));
  }
  return names;
}

std::string anonymize(const std::string& text, const std::set<std::string>& name_lexicon,
                      Rng& rng) {
  static const std::regex url_re(
      R"((?:https?://|www\.)[^\s<>]+|\b[a-z0-9][a-z0-9-]*(?:\.[a-z0-9-]+)*\.(?:com|in|org|net|ly|me|io)/[^\s<>]*)",
      std::regex::icase);
  std::string without_urls = std::regex_replace(text, url_re, "<URL>");

  // Names are matched on the alphabetic core of each whitespace token.
  std::string named;
  named.reserve(without_urls.size());
  std::size_t i = 0;
  while (i < without_urls.size()) {
    if (is_space(without_urls[i])) {
      named += without_urls[i++];
      continue;
    }
    std::size_t j = i;
    while (j < without_urls.size() && !is_space(without_urls[j])) ++j;
    std::string_view tok(without_urls.data() + i, j - i);
    std::size_t b = 0, e = tok.size();
    while (b < e && is_ascii_punct(tok[b])) ++b;
    while (e > b && is_ascii_punct(tok[e - 1])) --e;
    std::string core = to_lower_ascii(tok.substr(b, e - b));
    if (!core.empty() && name_lexicon.count(core)) {
      named += tok.substr(0, b);
      named += kReplacementNames[rng.uniform_int(kReplacementNames.size())];
      named += tok.substr(e);
    } else {
      named += tok;
    }
    i = j;
  }

  for (char& c : named) {
    if (c >= '0' && c <= '9') c = static_cast<char>('0' + rng.uniform_int(10));
  }
  return named;
}

double compute_kappa(const AnnotationSet& set) {
  const std::size_t n = set.item_ids.size();
  if (n < 2) fail(ErrorKind::kInvalidArgument, "kappa needs at least 2 items");
  std::array<std::array<std::size_t, kLeafCount>, 2> marginals{};
  std::size_t agree = 0;
  for (const auto& id : set.item_ids) {
    auto a = set.annotators[0].find(id);
    auto b = set.annotators[1].find(id);
    if (a == set.annotators[0].end() || b == set.annotators[1].end()) {
      fail(ErrorKind::kInvalidArgument, "item " + id + " not labeled by both annotators");
    }
    ++marginals[0][a->second.leaf()];
    ++marginals[1][b->second.leaf()];
    if (a->second == b->second) ++agree;
  }
  if (set.annotators[0].size() != n || set.annotators[1].size() != n) {
    fail(ErrorKind::kInvalidArgument, "annotators must label the identical item set");
  }
  const double dn = static_cast<double>(n);
  const double p_o = agree / dn;
  double p_e = 0.0;
  for (int k = 0; k < kLeafCount; ++k) {
    p_e += (marginals[0][k] / dn) * (marginals[1][k] / dn);
  }
  if (std::abs(1.0 - p_e) < 1e-12) {
    if (agree == n) return 1.0;
    fail(ErrorKind::kData, "degenerate marginals");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

CorpusSplit stratified_split(const Corpus& corpus, SplitFractions f, Rng& rng) {
  if (f.train < 0 || f.dev < 0 || f.test < 0 ||
      std::abs(f.train + f.dev + f.test - 1.0) > 1e-9) {
    fail(ErrorKind::kInvalidArgument, "fractions must sum to 1");
  }
  std::array<std::vector<std::size_t>, kLeafCount> by_leaf;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_leaf[corpus[i].label.leaf()].push_back(i);

  std::vector<int> part(corpus.size(), 0);
  for (int leaf = 0; leaf < kLeafCount; ++leaf) {
    auto& idx = by_leaf[leaf];
    if (idx.empty()) continue;
    if (idx.size() < 3) {
      fail(ErrorKind::kData, "class too small for split: " +
                                 TaxonomyLabel::from_leaf(leaf).name());
    }
    rng.shuffle(std::span<std::size_t>(idx));
    const double n = static_cast<double>(idx.size());
    auto n_train = static_cast<std::size_t>(std::llround(f.train * n));
    auto n_dev = static_cast<std::size_t>(std::llround(f.dev * n));
    n_train = std::min(n_train, idx.size());
    n_dev = std::min(n_dev, idx.size() - n_train);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      part[idx[k]] = k < n_train ? 0 : (k < n_train + n_dev ? 1 : 2);
    }
  }
  CorpusSplit out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (part[i] == 0 ? out.train : part[i] == 1 ? out.dev : out.test).push_back(corpus[i]);
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  for (const auto& sms : corpus) {
    ++s.major[static_cast<int>(sms.label.major())];
    if (sms.label.major() == Major::kReminder) ++s.reminder_sub[*sms.label.sub()];
    if (sms.label.major() == Major::kOffer) ++s.offer_sub[*sms.label.sub()];
    ++s.total;
  }
  return s;
}

std::string format_stats(const CorpusStats& stats) {
  std::ostringstream os;
  char buf[96];
  os << "SMS Major Class        Number of SMS\n";
  for (int m = 0; m < kMajorCount; ++m) {
    std::snprintf(buf, sizeof buf, "%-22s %zu\n", std::string(kMajorNames[m]).c_str(),
                  stats.major[m]);
    os << buf;
  }
  os << "\nSMS Sub Class          Number of SMS\n";
  for (int s = 0; s < kReminderSubCount; ++s) {
    std::snprintf(buf, sizeof buf, "%-22s %zu\n",
                  ("Reminder_" + std::string(kReminderSubNames[s])).c_str(),
                  stats.reminder_sub[s]);
    os << buf;
  }
  for (int s = 0; s < kOfferSubCount; ++s) {
    std::snprintf(buf, sizeof buf, "%-22s %zu\n",
                  ("Offer_" + std::string(kOfferSubNames[s])).c_str(), stats.offer_sub[s]);
    os << buf;
  }
  os << "\nTotal                  " << stats.total << '\n';
  return os.str();
}

std::map<int, int> reference_leaf_counts() {
  std::map<int, int> counts;
  counts[TaxonomyLabel::make(Major::kInfo).leaf()] = 1591;
  counts[TaxonomyLabel::make(Major::kTransaction).leaf()] = 921;
  counts[TaxonomyLabel::make(Major::kOtp).leaf()] = 854;
  const std::array<int, kReminderSubCount> reminder = {169, 101, 331, 106, 229, 711, 349, 215};
  const std::array<int, kOfferSubCount> offer = {225, 963, 215, 393, 177, 184, 644};
  for (int s = 0; s < kReminderSubCount; ++s)
    counts[TaxonomyLabel::make(Major::kReminder, s).leaf()] = reminder[s];
  for (int s = 0; s < kOfferSubCount; ++s)
    counts[TaxonomyLabel::make(Major::kOffer, s).leaf()] = offer[s];
  return counts;
}

}  // namespace smsie::corpus

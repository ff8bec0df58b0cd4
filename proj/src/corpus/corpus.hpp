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
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "corpus/taxonomy.hpp"

namespace smsie::corpus {

struct LabeledSms {
  std::string id;
  std::string text;
  TaxonomyLabel label;
  std::optional<std::string> sender;
};

using Corpus = std::vector<LabeledSms>;

// JSON-lines corpus, one {"id","text","label"[,"sender"]} object per line.
// Errors carry the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in);
void write_corpus(std::ostream& out, const Corpus& corpus);

// Parses a single corpus record; throws Error(kData) on a malformed object.
LabeledSms parse_record(const std::string& json_line);

// Privacy filter: URLs become <URL>, lexicon names become a random name from
// a fixed replacement list, and every remaining digit is redrawn uniformly.
std::string anonymize(const std::string& text, const std::set<std::string>& name_lexicon,
                      Rng& rng);

// Lowercased name lexicon loaded from a one-name-per-line file.
std::set<std::string> load_name_lexicon(const std::filesystem::path& path);

struct AnnotationSet {
  std::vector<std::string> item_ids;
  std::array<std::map<std::string, TaxonomyLabel>, 2> annotators;
};

// Cohen's kappa over the 18-leaf label space.
double compute_kappa(const AnnotationSet& set);

struct SplitFractions {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct CorpusSplit {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Per-leaf stratified partition; each part keeps the input order.
CorpusSplit stratified_split(const Corpus& corpus, SplitFractions fractions, Rng& rng);

struct CorpusStats {
  std::array<std::size_t, kMajorCount> major{};
  std::array<std::size_t, kReminderSubCount> reminder_sub{};
  std::array<std::size_t, kOfferSubCount> offer_sub{};
  std::size_t total = 0;

  std::size_t major_count(Major m) const { return major[static_cast<int>(m)]; }
};

CorpusStats corpus_stats(const Corpus& corpus);

// Two tables in the layout of the class-count tables (major, then sub).
std::string format_stats(const CorpusStats& stats);

// Per-leaf message counts shaped like the reference corpus
// (Info 1591, Reminder 2211, Offer 2801, Transaction 921, Otp 854).
std::map<int, int> reference_leaf_counts();

}  // namespace smsie::corpus

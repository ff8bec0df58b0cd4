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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "common/rng.hpp"
#include "corpus/corpus.hpp"

namespace smsie::corpus {

// Surface templates per leaf plus the lexicons their slots draw from.
struct TemplateBank {
  std::map<int, std::vector<std::string>> templates;               // leaf -> templates
  std::map<std::string, std::vector<std::string>> vendors;         // category -> names
  std::vector<std::string> cities;
  std::vector<std::string> names;

  std::size_t vendor_count() const;
};

// Reads sms_templates.txt, vendors.txt, cities.txt and names.txt.
TemplateBank load_template_bank(const std::filesystem::path& data_dir);

// Throws Error(kData) unless every leaf has >= min_templates distinct
// templates and the vendor lexicon has >= min_vendors names.
void validate_template_bank(const TemplateBank& bank, std::size_t min_templates = 10,
                            std::size_t min_vendors = 300);

// Slot name -> surface value, in order of appearance.
using SlotList = std::vector<std::pair<std::string, std::string>>;

struct SyntheticSms {
  LabeledSms sms;
  SlotList slots;
};

// Deterministic given the rng state. Emits exactly spec[leaf] messages per
// leaf; ids are "syn-NNNNNN" in output order.
std::vector<SyntheticSms> generate_synthetic_corpus(const std::map<int, int>& spec,
                                                    const TemplateBank& bank, Rng& rng);

// Expands one template; exposed for replay checks.
SyntheticSms expand_template(const std::string& tmpl, const TaxonomyLabel& label,
                             const TemplateBank& bank, Rng& rng);

Corpus to_corpus(const std::vector<SyntheticSms>& items);

// Sidecar JSONL: {"id", "slots": {name: value}} per line.
void write_slots(std::ostream& out, const std::vector<SyntheticSms>& items);
std::map<std::string, SlotList> load_slots(const std::filesystem::path& path);

}  // namespace smsie::corpus

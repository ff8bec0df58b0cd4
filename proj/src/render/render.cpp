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

#include "render/render.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::render {

using entities::EntityKind;

namespace {

constexpr std::array<std::string_view, 12> kMonthNames = {"January", "February", "March",     "April",
                                                          "May",     "June",     "July",      "August",
                                                          "September", "October", "November", "December"};
constexpr std::size_t kFootnoteBytes = 160;

std::string group_indian(std::string_view digits) {
  if (digits.size() <= 3) return std::string(digits);
  std::string head(digits.substr(0, digits.size() - 3));
  std::string out;
  const std::size_t lead = head.size() % 2;
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i > 0 && (i - lead) % 2 == 0) out += ',';
    out += head[i];
  }
  return out + ',' + std::string(digits.substr(digits.size() - 3));
}

std::string utf8_prefix(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  std::size_t n = max_bytes;
  while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
  return std::string(s.substr(0, n));
}

std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

TemplateSet TemplateSet::parse(std::string_view content) {
  TemplateSet set;
  set.hash_ = fnv1a(content);
  std::array<bool, corpus::kLeafCount> seen{};
  Template* current = nullptr;
  std::set<std::string> keys;
  std::size_t lineno = 0;
  for (const auto& raw : split(content, '\n')) {
    ++lineno;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    const auto where = "line " + std::to_string(lineno) + ": ";
    const auto cols = split(line, '\t');
    if (line.front() == '@') {
      if (cols.size() != 2) fail(ErrorKind::kFormat, where + "expected @LEAF<TAB>Title");
      const auto leaf = corpus::TaxonomyLabel::parse(cols[0].substr(1)).leaf();
      if (seen[leaf]) fail(ErrorKind::kFormat, where + "duplicate template for " + cols[0].substr(1));
      seen[leaf] = true;
      current = &set.by_leaf_[leaf];
      current->title = cols[1];
      keys.clear();
      continue;
    }
    if (!current) fail(ErrorKind::kFormat, where + "field before any template");
    if (cols.size() < 3 || cols.size() > 4) fail(ErrorKind::kFormat, where + "expected key, kind, required|optional");
    const auto kind = entities::parse_kind(cols[1]);
    if (!kind) fail(ErrorKind::kFormat, where + "unknown entity kind " + cols[1]);
    if (cols[2] != "required" && cols[2] != "optional") {
      fail(ErrorKind::kFormat, where + "expected required or optional, got " + cols[2]);
    }
    FieldSpec field{cols[0], *kind, cols[2] == "required", std::string(kMissingValue)};
    if (cols.size() == 4) field.fallback = cols[3];
    if (!keys.insert(field.key).second) fail(ErrorKind::kFormat, where + "duplicate key " + field.key);
    if (field.required && !current->fields.empty() && !current->fields.back().required) {
      fail(ErrorKind::kFormat, where + "required field after an optional one");
    }
    current->fields.push_back(std::move(field));
  }
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
    if (!seen[leaf]) {
      fail(ErrorKind::kFormat, "no template for " + corpus::TaxonomyLabel::from_leaf(leaf).name());
    }
  }
  return set;
}

std::string format_rupees(std::string_view normalized_amount) {
  auto value = normalized_amount.substr(0, normalized_amount.find(' '));
  const auto dot = value.find('.');
  auto whole = value.substr(0, dot);
  std::string frac = dot == std::string_view::npos ? "" : std::string(value.substr(dot + 1));
  while (whole.size() > 1 && whole.front() == '0') whole.remove_prefix(1);
  if (whole.empty()) whole = "0";
  std::string out = "₹" + group_indian(whole);
  if (std::any_of(frac.begin(), frac.end(), [](char c) { return c != '0'; })) {
    if (frac.size() == 1) frac += '0';
    out += '.' + frac;
  }
  return out;
}

std::string format_date(std::string_view iso_date) {
  int y = 0, m = 0, d = 0;
  if (iso_date.size() != 10 || iso_date[4] != '-' || iso_date[7] != '-') return std::string(iso_date);
  std::from_chars(iso_date.data(), iso_date.data() + 4, y);
  std::from_chars(iso_date.data() + 5, iso_date.data() + 7, m);
  std::from_chars(iso_date.data() + 8, iso_date.data() + 10, d);
  if (m < 1 || m > 12 || d < 1) return std::string(iso_date);
  return std::to_string(d) + " " + std::string(kMonthNames[m - 1]) + " " + std::to_string(y);
}

std::string display_value(const entities::Entity& entity) {
  switch (entity.kind) {
    case EntityKind::kAmount:
    case EntityKind::kBalance: return format_rupees(entity.normalized);
    case EntityKind::kDate: return format_date(entity.normalized);
    case EntityKind::kPercent: return entity.normalized + "%";
    default: return entity.normalized;
  }
}

Card render_card(std::string_view source_id, std::string_view text, const entities::EntitySet& found,
                 const TemplateSet& templates) {
  const auto& tmpl = templates.at(found.category);
  Card card;
  card.category = found.category;
  card.title = tmpl.title;
  card.source_id = source_id;
  if (!text.empty()) card.footnote = utf8_prefix(text, kFootnoteBytes);
  for (const auto& spec : tmpl.fields) {
    const auto hits = found.of_kind(spec.kind);
    if (!hits.empty()) {
      const auto* first = *std::min_element(hits.begin(), hits.end(), [](const auto* a, const auto* b) {
        return a->span.begin < b->span.begin;
      });
      card.fields.push_back({spec.key, display_value(*first), first->span});
    } else if (spec.required) {
      card.fields.push_back({spec.key, spec.fallback, std::nullopt});
      card.incomplete = true;
    }
  }
  return card;
}

Card render_card(std::string_view source_id, std::string_view text, const corpus::TaxonomyLabel& leaf,
                 const entities::EntitySet& found, const TemplateSet& templates) {
  if (!(leaf == found.category)) {
    fail(ErrorKind::kInvalidArgument,
         "entity set category " + found.category.name() + " does not match message label " + leaf.name());
  }
  return render_card(source_id, text, found, templates);
}

nlohmann::ordered_json card_to_json(const Card& card) {
  nlohmann::ordered_json j;
  j["schema"] = kCardSchemaVersion;
  j["source_id"] = card.source_id;
  j["category"] = card.category.name();
  j["title"] = card.title;
  j["incomplete"] = card.incomplete;
  auto fields = nlohmann::ordered_json::array();
  for (const auto& f : card.fields) {
    nlohmann::ordered_json item;
    item["key"] = f.key;
    item["value"] = f.value;
    if (f.source) {
      item["source"] = {{"start", f.source->begin}, {"end", f.source->end}};
    } else {
      item["source"] = nullptr;
    }
    fields.push_back(std::move(item));
  }
  j["fields"] = std::move(fields);
  j["footnote"] = card.footnote ? nlohmann::ordered_json(*card.footnote) : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json cards_to_digest(const std::vector<Card>& cards) {
  std::array<std::vector<const Card*>, corpus::kLeafCount> groups;
  for (const auto& c : cards) groups[c.category.leaf()].push_back(&c);
  auto out = nlohmann::ordered_json::array();
  for (const auto& group : groups) {
    if (group.empty()) continue;
    nlohmann::ordered_json g;
    g["category"] = group.front()->category.name();
    g["title"] = group.front()->title;
    auto list = nlohmann::ordered_json::array();
    for (const auto* c : group) list.push_back(card_to_json(*c));
    g["cards"] = std::move(list);
    out.push_back(std::move(g));
  }
  return out;
}

std::string card_to_html(const Card& card) {
  std::string html = "<div class=\"card";
  if (card.incomplete) html += " incomplete";
  html += "\" data-category=\"" + escape_html(card.category.name()) + "\">\n";
  html += "  <h3>" + escape_html(card.title) + "</h3>\n  <dl>\n";
  for (const auto& f : card.fields) {
    html += "    <dt>" + escape_html(f.key) + "</dt><dd>" + escape_html(f.value) + "</dd>\n";
  }
  html += "  </dl>\n";
  if (card.footnote) html += "  <p class=\"footnote\">" + escape_html(*card.footnote) + "</p>\n";
  return html + "</div>\n";
}

}  // namespace smsie::render

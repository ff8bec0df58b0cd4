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

#include <doctest.h>

#include "common/error.hpp"
#include <set>

#include "render/render.hpp"
#include "support.hpp"

using namespace smsie;
using namespace smsie::render;
using corpus::TaxonomyLabel;
using entities::Entity;
using entities::EntityKind;
using entities::EntitySet;

namespace {

const TemplateSet& cards() {
  static const auto t = testing::shipped_cards();
  return t;
}

EntitySet make_set(std::string_view leaf, std::vector<Entity> entities) {
  EntitySet s;
  s.category = TaxonomyLabel::parse(leaf);
  s.entities = std::move(entities);
  return s;
}

std::vector<std::pair<std::string, std::string>> pairs(const Card& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : c.fields) out.emplace_back(f.key, f.value);
  return out;
}

Card card_for(std::string_view id, std::string_view leaf) {
  return render_card(id, "text " + std::string(id), make_set(leaf, {}), cards());
}

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("bill reminder card") {
    const std::string text = "Please pay the due amount of Rs.97 by 3rd May.";
    const auto set = make_set("Reminder_Bill", {{EntityKind::kAmount, {29, 34}, "Rs.97", "97 INR"},
                                                {EntityKind::kDate, {38, 45}, "3rd May", "2019-05-03"}});
    const auto card = render_card("m1", text, set, cards());
    const std::vector<std::pair<std::string, std::string>> expected{{"Amount due", "₹97"},
                                                                    {"Due date", "3 May 2019"}};
    CHECK(pairs(card) == expected);
    CHECK(card.title == "Bill Reminder");
    CHECK_FALSE(card.incomplete);
    CHECK(card.source_id == "m1");
    REQUIRE(card.fields[0].source.has_value());
    CHECK(text.substr(card.fields[0].source->begin, card.fields[0].source->end - card.fields[0].source->begin) ==
          "Rs.97");
  }

  TEST_CASE("missing required field is flagged") {
    const auto card = render_card("o", "", make_set("Otp", {}), cards());
    CHECK(card.incomplete);
    REQUIRE(card.fields.size() == 1);
    CHECK(card.fields[0].key == "Code");
    CHECK(card.fields[0].value == "—");
    CHECK_FALSE(card.fields[0].source.has_value());
    CHECK_FALSE(card.footnote.has_value());
  }

  TEST_CASE("fields follow template order, not span order") {
    const auto set = make_set("Offer_Food", {{EntityKind::kPercent, {4, 6}, "9%", "9"},
                                             {EntityKind::kPromoCode, {20, 26}, "SAVE20", "SAVE20"}});
    const auto card = render_card("f", "get 9% off, use code SAVE20", set, cards());
    const std::vector<std::pair<std::string, std::string>> expected{{"Code", "SAVE20"}, {"Discount", "9%"}};
    CHECK(pairs(card) == expected);
  }

  TEST_CASE("first entity in span order fills a field") {
    const auto set = make_set("Transaction", {{EntityKind::kAmount, {0, 5}, "Rs.10", "10 INR"},
                                              {EntityKind::kAmount, {10, 15}, "Rs.20", "20 INR"}});
    CHECK(render_card("t", "Rs.10 and Rs.20", set, cards()).fields.at(0).value == "₹10");
  }

  TEST_CASE("leaf mismatch is rejected") {
    const auto set = make_set("Otp", {});
    CHECK_THROWS_AS(render_card("x", "", TaxonomyLabel::parse("Info"), set, cards()), Error);
    CHECK_NOTHROW(render_card("x", "", TaxonomyLabel::parse("Otp"), set, cards()));
  }

  TEST_CASE("every leaf renders on an empty set") {
    for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
      const auto label = TaxonomyLabel::from_leaf(leaf);
      INFO(label.name());
      Card card;
      CHECK_NOTHROW(card = render_card("e", "", make_set(label.name(), {}), cards()));
      CHECK_FALSE(card.title.empty());
      bool any_required = false;
      for (const auto& f : cards().at(label).fields) any_required = any_required || f.required;
      CHECK(card.incomplete == any_required);
      std::set<std::string> keys;
      for (const auto& f : card.fields) CHECK(keys.insert(f.key).second);
    }
  }

  TEST_CASE("digest") {
    CHECK(cards_to_digest({}).dump() == "[]");
    const auto one = cards_to_digest({card_for("a", "Otp")});
    REQUIRE(one.size() == 1);
    CHECK(one[0]["cards"].size() == 1);

    const auto digest = cards_to_digest({card_for("1", "Offer_Food"), card_for("2", "Otp"),
                                         card_for("3", "Offer_Food"), card_for("4", "Otp")});
    REQUIRE(digest.size() == 2);
    CHECK(digest[0]["category"] == "Otp");
    CHECK(digest[0]["cards"][0]["source_id"] == "2");
    CHECK(digest[0]["cards"][1]["source_id"] == "4");
    CHECK(digest[1]["category"] == "Offer_Food");
    CHECK(digest[1]["cards"][0]["source_id"] == "1");
    CHECK(digest[1]["cards"][1]["source_id"] == "3");
  }

  TEST_CASE("json is stable") {
    const auto set = make_set("Reminder_Bill", {{EntityKind::kAmount, {0, 5}, "Rs.97", "97 INR"}});
    const auto a = card_to_json(render_card("m", "Rs.97 due", set, cards())).dump();
    const auto b = card_to_json(render_card("m", "Rs.97 due", set, cards())).dump();
    CHECK(a == b);
    const auto j = nlohmann::json::parse(a);
    CHECK(j["schema"] == kCardSchemaVersion);
    CHECK(j["incomplete"] == true);
    CHECK(j["fields"][0]["source"]["start"] == 0);
    CHECK(j["fields"][1]["source"].is_null());
    CHECK(a.find("\"schema\"") < a.find("\"fields\""));
  }

  TEST_CASE("footnote keeps whole characters") {
    std::string text;
    for (int i = 0; i < 100; ++i) text += "₹";
    const auto card = render_card("n", text, make_set("Info", {}), cards());
    REQUIRE(card.footnote.has_value());
    CHECK(card.footnote->size() <= 160);
    CHECK(card.footnote->size() % 3 == 0);
  }

  TEST_CASE("html escapes values") {
    const auto set = make_set("Info", {{EntityKind::kUrl, {0, 9}, "http://<x", "http://<x"}});
    const auto html = card_to_html(render_card("h", "http://<x", set, cards()));
    CHECK(html.find("&lt;x") != std::string::npos);
    CHECK(html.find("<x") == std::string::npos);
  }

  TEST_CASE("rupee and date formatting") {
    CHECK(format_rupees("97 INR") == "₹97");
    CHECK(format_rupees("100000.50 INR") == "₹1,00,000.50");
    CHECK(format_rupees("1234567.00 INR") == "₹12,34,567");
    CHECK(format_rupees("999 INR") == "₹999");
    CHECK(format_rupees("1000.5 INR") == "₹1,000.50");
    CHECK(format_date("2019-05-03") == "3 May 2019");
    CHECK(format_date("2020-12-31") == "31 December 2020");
    CHECK(format_date("bad") == "bad");
  }

  TEST_CASE("template file errors") {
    CHECK_THROWS_AS(TemplateSet::parse("@Info\tX\n"), Error);
    std::string all;
    for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
      all += "@" + TaxonomyLabel::from_leaf(leaf).name() + "\tT\nA\tDate\toptional\n";
    }
    CHECK_NOTHROW(TemplateSet::parse(all));
    CHECK_THROWS_AS(TemplateSet::parse(all + "@Info\tAgain\n"), Error);
    CHECK_THROWS_AS(TemplateSet::parse(all + "B\tDate\trequired\n"), Error);
    CHECK_THROWS_AS(TemplateSet::parse(all + "C\tNope\toptional\n"), Error);
    CHECK_THROWS_AS(TemplateSet::parse(all + "A\tDate\toptional\n"), Error);
    CHECK(TemplateSet::parse(all).content_hash() != TemplateSet::parse(all + "# note\n").content_hash());
  }
}

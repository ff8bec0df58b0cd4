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
#include "entities/entities.hpp"
#include "support.hpp"

using namespace smsie;
using namespace smsie::entities;
using corpus::TaxonomyLabel;

namespace {

const EntityExtractor& extractor() {
  static const auto ex = testing::shipped_extractor();
  return ex;
}

std::vector<Entity> parse(EntityKind kind, std::string_view text) { return extractor().parse(kind, text, 2019); }

EntitySet extract(std::string_view text, std::string_view leaf) {
  return extractor().extract(text, TaxonomyLabel::parse(leaf), 2019);
}

std::vector<std::pair<EntityKind, std::string>> summary(const EntitySet& s) {
  std::vector<std::pair<EntityKind, std::string>> out;
  for (const auto& e : s.entities) out.emplace_back(e.kind, e.normalized);
  return out;
}

}  // namespace

TEST_SUITE("entities") {
  TEST_CASE("kind names round trip") {
    for (int k = 0; k < kEntityKindCount; ++k) {
      const auto kind = static_cast<EntityKind>(k);
      CHECK(parse_kind(kind_name(kind)) == kind);
    }
    CHECK_FALSE(parse_kind("Nope").has_value());
  }

  TEST_CASE("dates") {
    const auto d = parse(EntityKind::kDate, "by 3rd May");
    REQUIRE(d.size() == 1);
    CHECK(d[0].raw == "3rd May");
    CHECK(d[0].normalized == "2019-05-03");
    CHECK(parse(EntityKind::kDate, "").empty());
    CHECK(parse(EntityKind::kDate, "31/02/2019").empty());
    CHECK(normalize_date("12/05/2020", 2019) == std::optional<std::string>("2020-05-12"));
    CHECK(normalize_date("29 Feb 2019", 2019) == std::nullopt);
    CHECK(normalize_date("29 Feb 2020", 2019) == std::optional<std::string>("2020-02-29"));
  }

  TEST_CASE("amounts") {
    const auto a = parse(EntityKind::kAmount, "due amount of Rs.97");
    REQUIRE(a.size() == 1);
    CHECK(a[0].normalized == "97 INR");
    const auto big = parse(EntityKind::kAmount, "₹1,00,000.50");
    REQUIRE(big.size() == 1);
    CHECK(big[0].normalized == "100000.50 INR");
    CHECK(parse(EntityKind::kAmount, "97 items").empty());
    CHECK(parse(EntityKind::kAmount, "INR 2,499 only").at(0).normalized == "2499 INR");
  }

  TEST_CASE("percent") {
    CHECK(parse(EntityKind::kPercent, "discount of 9%").at(0).normalized == "9");
    CHECK(parse(EntityKind::kPercent, "100%").at(0).normalized == "100");
    CHECK(parse(EntityKind::kPercent, "%").empty());
  }

  TEST_CASE("urls and phones") {
    const auto u = parse(EntityKind::kUrl, "visit http://a.b/c");
    REQUIRE(u.size() == 1);
    CHECK(u[0].raw == "http://a.b/c");
    CHECK(normalize_url("HTTPS://Example.COM/Path") == "https://example.com/Path");
    const auto p = parse(EntityKind::kPhoneNumber, "+91 98765 43210");
    REQUIRE(p.size() == 1);
    CHECK(p[0].normalized == "9876543210");
    CHECK(parse(EntityKind::kPhoneNumber, "12345").empty());
  }

  TEST_CASE("otp codes") {
    CHECK(parse(EntityKind::kOtpCode, "Your OTP is 4821").at(0).normalized == "4821");
    const auto both = extract("Your OTP is 4821, valid till 3rd May", "Otp");
    REQUIRE(both.of_kind(EntityKind::kOtpCode).size() == 1);
    REQUIRE(both.of_kind(EntityKind::kDate).size() == 1);
    const auto* otp = both.of_kind(EntityKind::kOtpCode)[0];
    const auto* date = both.of_kind(EntityKind::kDate)[0];
    CHECK(otp->raw == "4821");
    CHECK(date->raw == "3rd May");
    CHECK((otp->span.end <= date->span.begin || date->span.end <= otp->span.begin));
    CHECK(extract("call 9876543210", "Otp").of_kind(EntityKind::kOtpCode).empty());
  }

  TEST_CASE("promo codes") {
    CHECK(parse(EntityKind::kPromoCode, "use code SAVE20 today").at(0).normalized == "SAVE20");
    CHECK(parse(EntityKind::kPromoCode, "use code").empty());
    CHECK(parse(EntityKind::kPromoCode, "apply FREEDEL on checkout").at(0).normalized == "FREEDEL");
  }

  TEST_CASE("identifiers") {
    CHECK(parse(EntityKind::kPnr, "PNR 4528719306").at(0).normalized == "4528719306");
    CHECK(parse(EntityKind::kFlightNumber, "flight AI302").at(0).normalized == "AI302");
    CHECK(parse(EntityKind::kAccountTail, "a/c XX1234 debited").at(0).normalized == "1234");
  }

  TEST_CASE("balance relabels the amount after its trigger") {
    const auto s = extract("Rs.500 debited from a/c XX1234. Avl bal Rs.12,000.", "Transaction");
    REQUIRE(s.of_kind(EntityKind::kBalance).size() == 1);
    CHECK(s.of_kind(EntityKind::kBalance)[0]->normalized == "12000 INR");
    REQUIRE(s.of_kind(EntityKind::kAmount).size() == 1);
    CHECK(s.of_kind(EntityKind::kAmount)[0]->normalized == "500 INR");
  }

  TEST_CASE("vendors") {
    const VendorLexicon lex({"Paytm", "Big Bazaar", "Big"});
    preprocess::ClaimSet claims(40);
    const auto found = lex.find("Shop at big bazaar or Paytm", claims);
    REQUIRE(found.size() == 2);
    CHECK(found[0].second == "Big Bazaar");
    CHECK(found[1].second == "Paytm");
    CHECK(lex.find("paytmx", preprocess::ClaimSet(6)).empty());
  }

  TEST_CASE("the bill example yields exactly amount, date and percent") {
    const auto s = extract(
        "Please pay the due amount of Rs.97 by 3rd May. You can use Paytm to avail a discount of 9%", "Reminder_Bill");
    const std::vector<std::pair<EntityKind, std::string>> expected{
        {EntityKind::kAmount, "97 INR"}, {EntityKind::kDate, "2019-05-03"}, {EntityKind::kPercent, "9"}};
    CHECK(summary(s) == expected);
    CHECK(s.category.name() == "Reminder_Bill");
  }

  TEST_CASE("Info runs every parser on unclaimed text") {
    const std::string text = "Paytm: use code SAVE20, OTP is 4821. PNR 4528719306 flight AI302 on 3rd May";
    const auto info = extract(text, "Info");
    const auto bill = extract(text, "Reminder_Bill");
    CHECK(info.entities.size() > bill.entities.size());
    for (auto k : {EntityKind::kVendor, EntityKind::kPromoCode, EntityKind::kOtpCode, EntityKind::kPnr,
                   EntityKind::kFlightNumber, EntityKind::kDate}) {
      INFO(kind_name(k));
      CHECK(info.of_kind(k).size() == 1);
    }
    for (std::size_t i = 1; i < info.entities.size(); ++i) {
      CHECK(info.entities[i - 1].span.end <= info.entities[i].span.begin);
    }
  }

  TEST_CASE("empty text gives an empty set") {
    const auto s = extract("", "Info");
    CHECK(s.entities.empty());
    CHECK(s.to_json()["entities"].empty());
  }

  TEST_CASE("registry and active kinds") {
    const auto reg = ParserRegistry::standard();
    const auto& bill = reg.category_parsers(TaxonomyLabel::parse("Reminder_Bill"));
    CHECK(std::find(bill.begin(), bill.end(), EntityKind::kVendor) == bill.end());
    CHECK(reg.category_parsers(TaxonomyLabel::parse("Info")).size() == kCategoryKinds.size());
    const auto active = extractor().active_kinds(TaxonomyLabel::parse("Otp"));
    CHECK(std::find(active.begin(), active.end(), EntityKind::kOtpCode) != active.end());
    CHECK(std::find(active.begin(), active.end(), EntityKind::kUrl) != active.end());
  }

  TEST_CASE("slot scoring") {
    CHECK(slot_kind("amount2") == EntityKind::kAmount);
    CHECK(slot_kind("vendor:food") == EntityKind::kVendor);
    CHECK_FALSE(slot_kind("name").has_value());

    EntitySet found;
    found.category = TaxonomyLabel::parse("Otp");
    found.entities = {{EntityKind::kOtpCode, {0, 4}, "4821", "4821"}, {EntityKind::kUrl, {5, 9}, "x.io", "x.io"}};
    const corpus::SlotList slots{{"otp", "4821"}, {"date", "3 May"}};
    std::array<KindScore, kEntityKindCount> scores{};
    score_against_slots(found, slots, extractor().active_kinds(found.category), scores);
    const auto& otp = scores[static_cast<int>(EntityKind::kOtpCode)];
    CHECK(otp.gold == 1);
    CHECK(otp.matched == 1);
    const auto& url = scores[static_cast<int>(EntityKind::kUrl)];
    CHECK(url.predicted == 1);
    CHECK(url.precision() == 0.0);
    CHECK(scores[static_cast<int>(EntityKind::kDate)].recall() == 0.0);
  }

  TEST_CASE("parser spec errors") {
    CHECK_THROWS_AS(ParserSpec::parse("Nope\tpattern\tx\n"), Error);
  }

  TEST_CASE("synthetic messages yield their slots") {
    const auto items = testing::synthetic(10, 21);
    std::array<KindScore, kEntityKindCount> scores{};
    for (const auto& it : items) {
      const auto s = extractor().extract(it.sms.text, it.sms.label, 2019);
      score_against_slots(s, it.slots, extractor().active_kinds(it.sms.label), scores);
    }
    for (auto k : {EntityKind::kAmount, EntityKind::kDate, EntityKind::kOtpCode, EntityKind::kPromoCode,
                   EntityKind::kUrl}) {
      INFO(kind_name(k));
      CHECK(scores[static_cast<int>(k)].precision() >= 0.95);
      CHECK(scores[static_cast<int>(k)].recall() >= 0.95);
    }
  }
}

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

#include <set>
#include <sstream>

#include "common/error.hpp"
#include "corpus/corpus.hpp"
#include "corpus/synthetic.hpp"
#include "corpus/taxonomy.hpp"
#include "support.hpp"

using namespace smsie;
using namespace smsie::corpus;

TEST_SUITE("corpus") {
  TEST_CASE("leaf universe has 18 members in canonical order") {
    std::set<std::string> names;
    for (int leaf = 0; leaf < kLeafCount; ++leaf) {
      const auto label = TaxonomyLabel::from_leaf(leaf);
      CHECK(label.leaf() == leaf);
      CHECK(TaxonomyLabel::parse(label.name()) == label);
      CHECK(label.sub().has_value() == has_subclasses(label.major()));
      names.insert(label.name());
    }
    CHECK(names.size() == 18);
    CHECK(TaxonomyLabel::from_leaf(0).name() == "Info");
    CHECK(TaxonomyLabel::from_leaf(3).name() == "Reminder_Appointment");
    CHECK(TaxonomyLabel::from_leaf(17).name() == "Offer_Others");
    CHECK_THROWS_AS(TaxonomyLabel::make(Major::kOtp, 0), Error);
    CHECK_THROWS_AS(TaxonomyLabel::make(Major::kReminder), Error);
  }

  TEST_CASE("load_corpus maps fields and rejects unknown labels") {
    std::istringstream in(R"({"id":"a1","text":"Your OTP is 4821","label":"Otp"}
{"id":"a2","text":"Pay your bill","label":"Reminder_Bill"}
)");
    const auto c = parse_corpus(in);
    REQUIRE(c.size() == 2);
    CHECK(c[0].label.major() == Major::kOtp);
    CHECK_FALSE(c[0].label.sub().has_value());
    CHECK(c[1].label.major() == Major::kReminder);
    CHECK(c[1].label.name() == "Reminder_Bill");

    std::istringstream bad(R"({"id":"a1","text":"x","label":"Otp"}
{"id":"b","text":"hello","label":"Offer_Banking"}
)");
    try {
      parse_corpus(bad);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      CHECK(std::string(e.what()).find("unknown label: Offer_Banking") != std::string::npos);
    }
    std::istringstream malformed("{not json\n");
    CHECK_THROWS_AS(parse_corpus(malformed), Error);
  }

  TEST_CASE("write_corpus round-trips") {
    Corpus c{{"x1", "Hello there", TaxonomyLabel::parse("Info"), std::nullopt},
             {"x2", "Code 1234", TaxonomyLabel::parse("Otp"), std::string("AX-BANK")}};
    std::stringstream io;
    write_corpus(io, c);
    const auto back = parse_corpus(io);
    REQUIRE(back.size() == 2);
    CHECK(back[0].text == "Hello there");
    CHECK(back[1].sender == std::optional<std::string>("AX-BANK"));
  }

  TEST_CASE("anonymize") {
    const std::set<std::string> names{"rahul"};
    Rng a(5), b(5);
    const auto out = anonymize("Call 9876543210", names, a);
    CHECK(out == anonymize("Call 9876543210", names, b));
    REQUIRE(out.size() == 15);
    CHECK(out.substr(0, 5) == "Call ");
    for (char ch : out.substr(5)) CHECK(std::isdigit(static_cast<unsigned char>(ch)));
    Rng c(1);
    CHECK(anonymize("", names, c).empty());
    CHECK(anonymize("visit http://a.b/c now", names, c) == "visit <URL> now");
    const auto renamed = anonymize("Hi Rahul, welcome", names, c);
    CHECK(renamed.find("Rahul") == std::string::npos);
  }

  TEST_CASE("kappa") {
    AnnotationSet same;
    for (int i = 0; i < 10; ++i) {
      const auto id = "i" + std::to_string(i);
      same.item_ids.push_back(id);
      same.annotators[0][id] = same.annotators[1][id] = TaxonomyLabel::from_leaf(i % 3);
    }
    CHECK(compute_kappa(same) == doctest::Approx(1.0));

    // p_o = 0.5, p_e = 0.5.
    AnnotationSet chance;
    const auto x = TaxonomyLabel::parse("Info"), y = TaxonomyLabel::parse("Otp");
    const std::array<std::pair<TaxonomyLabel, TaxonomyLabel>, 4> rows = {{{x, x}, {x, y}, {y, x}, {y, y}}};
    for (int i = 0; i < 4; ++i) {
      const auto id = std::to_string(i);
      chance.item_ids.push_back(id);
      chance.annotators[0][id] = rows[i].first;
      chance.annotators[1][id] = rows[i].second;
    }
    CHECK(compute_kappa(chance) == doctest::Approx(0.0));

    // 100 items, 4 labels, hand-built confusion matrix.
    const int m[4][4] = {{20, 3, 1, 1}, {2, 18, 4, 1}, {0, 5, 15, 5}, {1, 2, 2, 20}};
    AnnotationSet built;
    int n = 0, diag = 0;
    std::array<int, 4> ra{}, rb{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < m[i][j]; ++k) {
          const auto id = std::to_string(n++);
          built.item_ids.push_back(id);
          built.annotators[0][id] = TaxonomyLabel::from_leaf(i);
          built.annotators[1][id] = TaxonomyLabel::from_leaf(j);
        }
        ra[i] += m[i][j];
        rb[j] += m[i][j];
        if (i == j) diag += m[i][j];
      }
    }
    const double po = diag / 100.0;
    double pe = 0;
    for (int i = 0; i < 4; ++i) pe += (ra[i] / 100.0) * (rb[i] / 100.0);
    CHECK(compute_kappa(built) == doctest::Approx((po - pe) / (1 - pe)).epsilon(1e-12));

    AnnotationSet constant;
    for (int i = 0; i < 3; ++i) {
      const auto id = std::to_string(i);
      constant.item_ids.push_back(id);
      constant.annotators[0][id] = x;
      constant.annotators[1][id] = x;
    }
    CHECK(compute_kappa(constant) == 1.0);
  }

  TEST_CASE("synthetic generation is deterministic and counts exactly") {
    const auto a = testing::synthetic(3, 11);
    const auto b = testing::synthetic(3, 11);
    REQUIRE(a.size() == 54);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].sms.text == b[i].sms.text);
      CHECK(a[i].slots == b[i].slots);
    }
    const auto bank = load_template_bank(SMSIE_DATA_DIR);
    Rng rng(1);
    CHECK(generate_synthetic_corpus({}, bank, rng).empty());
    const auto two = generate_synthetic_corpus({{TaxonomyLabel::parse("Otp").leaf(), 2}}, bank, rng);
    REQUIRE(two.size() == 2);
    for (const auto& item : two) {
      CHECK(item.sms.label.name() == "Otp");
      bool has_code = false;
      for (const auto& [slot, value] : item.slots) {
        if (slot == "otp") {
          has_code = true;
          CHECK(item.sms.text.find(value) != std::string::npos);
        }
      }
      CHECK(has_code);
    }
    const auto mixed = generate_synthetic_corpus(
        {{TaxonomyLabel::parse("Reminder_Bill").leaf(), 50}, {TaxonomyLabel::parse("Offer_Food").leaf(), 50}}, bank,
        rng);
    const auto stats = corpus_stats(to_corpus(mixed));
    CHECK(stats.total == 100);
    CHECK(stats.reminder_sub[5] == 50);
    CHECK(stats.offer_sub[3] == 50);
  }

  TEST_CASE("template bank meets coverage floors") {
    const auto bank = load_template_bank(SMSIE_DATA_DIR);
    CHECK_NOTHROW(validate_template_bank(bank));
    TemplateBank thin = bank;
    thin.templates.erase(TaxonomyLabel::parse("Otp").leaf());
    CHECK_THROWS_AS(validate_template_bank(thin), Error);
    Rng rng(1);
    CHECK_THROWS_AS(generate_synthetic_corpus({{TaxonomyLabel::parse("Otp").leaf(), 1}}, thin, rng), Error);
  }

  TEST_CASE("stratified split") {
    Corpus one;
    for (int i = 0; i < 100; ++i) one.push_back({std::to_string(i), "text", TaxonomyLabel::parse("Otp"), {}});
    Rng rng(3);
    const auto s = stratified_split(one, {0.8, 0.1, 0.1}, rng);
    CHECK(s.train.size() == 80);
    CHECK(s.dev.size() == 10);
    CHECK(s.test.size() == 10);

    const auto many = to_corpus(testing::synthetic(100, 4));
    const auto t = stratified_split(many, {0.8, 0.1, 0.1}, rng);
    std::array<int, kLeafCount> tr{}, dv{}, te{};
    for (const auto& m : t.train) ++tr[m.label.leaf()];
    for (const auto& m : t.dev) ++dv[m.label.leaf()];
    for (const auto& m : t.test) ++te[m.label.leaf()];
    for (int leaf = 0; leaf < kLeafCount; ++leaf) {
      CHECK(tr[leaf] == 80);
      CHECK(dv[leaf] == 10);
      CHECK(te[leaf] == 10);
    }
    try {
      stratified_split(one, {0.5, 0.5, 0.5}, rng);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "fractions must sum to 1");
    }
    Corpus tiny{{"a", "t", TaxonomyLabel::parse("Info"), {}}};
    CHECK_THROWS_AS(stratified_split(tiny, {0.8, 0.1, 0.1}, rng), Error);
  }

  TEST_CASE("corpus stats") {
    const auto empty = corpus_stats({});
    CHECK(empty.total == 0);
    for (auto v : empty.major) CHECK(v == 0);

    const auto ref = reference_leaf_counts();
    Corpus shaped;
    for (const auto& [leaf, n] : ref) {
      for (int i = 0; i < n; ++i) shaped.push_back({"", "t", TaxonomyLabel::from_leaf(leaf), {}});
    }
    const auto s = corpus_stats(shaped);
    CHECK(s.total == 8378);
    CHECK(s.major_count(Major::kInfo) == 1591);
    CHECK(s.major_count(Major::kReminder) == 2211);
    CHECK(s.major_count(Major::kOffer) == 2801);
    CHECK(s.major_count(Major::kTransaction) == 921);
    CHECK(s.major_count(Major::kOtp) == 854);
    std::size_t reminder = 0;
    for (auto v : s.reminder_sub) reminder += v;
    CHECK(reminder == 2211);
    const auto table = format_stats(s);
    CHECK(table.find("Reminder_Bill") != std::string::npos);
    CHECK(table.find("8378") != std::string::npos);
  }
}

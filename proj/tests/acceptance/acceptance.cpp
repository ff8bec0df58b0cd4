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

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "classifier/model.hpp"
#include "common/error.hpp"
#include "gradcheck_cases.hpp"
#include "nn/serialize.hpp"
#include "pipeline/pipeline.hpp"
#include "support.hpp"

using namespace smsie;
using classifier::Variant;
using corpus::TaxonomyLabel;

namespace {

constexpr std::uint64_t kTrainSeed = 7;
constexpr std::uint64_t kTestSeed = 99;
constexpr int kTrainPerLeaf = 500;
constexpr int kTestPerLeaf = 50;
constexpr std::size_t kSizeBudgetBytes = 3250585;  // 3.1 MiB

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, std::string_view name, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

corpus::Corpus labelled(const std::vector<corpus::SyntheticSms>& items) {
  corpus::Corpus out;
  for (const auto& it : items) out.push_back(it.sms);
  return out;
}

struct Trained {
  pipeline::TrainResult result;
  classifier::EvalReport eval;
  double seconds = 0.0;
};

Trained train_and_evaluate(Variant variant, const corpus::Corpus& train, const corpus::Corpus& test) {
  pipeline::PipelineConfig config;
  config.variant = variant;
  const auto t0 = std::chrono::steady_clock::now();
  Trained t;
  t.result = pipeline::train_model(config, train);
  const auto p = pipeline::Pipeline::open(t.result.blob, config.resources, config.reference_year);
  t.eval = classifier::evaluate(test, [&](const corpus::LabeledSms& s) { return p.classify(s.text).leaf; });
  t.seconds = seconds_since(t0);
  return t;
}

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cases = testing::run_grad_cases(20261015, 6);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : cases) {
    if (!(c.error <= worst)) {
      worst = c.error;
      worst_name = c.name;
    }
  }
  const bool ok = cases.size() >= 50 && worst < 1e-4 && secs < 60.0;
  return {ok, fmt("%zu cases, max relative error %.2e (%s), %.2f s", cases.size(), worst, worst_name.c_str(), secs)};
}

Outcome accuracy(const Trained& hybrid) {
  const bool ok = hybrid.eval.overall >= 0.90 && hybrid.seconds < 1800.0;
  return {ok, fmt("Hybrid leaf accuracy %.4f on %zu test messages, train+eval %.0f s", hybrid.eval.overall,
                  hybrid.eval.total, hybrid.seconds)};
}

Outcome comparison(const std::vector<std::pair<Variant, Trained>>& runs) {
  std::map<Variant, double> percent;
  for (const auto& [variant, t] : runs) percent[variant] = 100.0 * t.eval.overall;
  auto acc = [&](Variant v) { return percent.at(v); };
  const double hybrid = acc(Variant::kHybrid), cnn_lstm = acc(Variant::kAllCnnLstm);
  const double cnn = acc(Variant::kAllCnn), lstm = acc(Variant::kAllLstm);
  const double best_other = std::max(cnn, lstm);
  const bool ok = std::abs(hybrid - cnn_lstm) <= 3.0 && hybrid >= best_other - 1.0 && cnn_lstm >= best_other - 1.0;
  return {ok, fmt("Hybrid %.2f%%, AllCnnLstm %.2f%%, AllCnn %.2f%%, AllLstm %.2f%%", hybrid, cnn_lstm, cnn, lstm)};
}

std::uint64_t header_param_count(const std::vector<std::uint8_t>& blob) {
  std::size_t off = sizeof nn::kModelMagic + 4 + 4;
  std::uint32_t regions = 0;
  std::memcpy(&regions, blob.data() + off, 4);
  off += 4 + 4 * regions + 4 + 4 + 4 + 4 + 4 + 8;
  std::uint64_t count = 0;
  std::memcpy(&count, blob.data() + off, 8);
  return count;
}

std::uint64_t hybrid_param_formula(std::uint64_t vocab, const nn::LayerSpec& s) {
  const std::uint64_t e = s.embedding_dim, f = s.filters_per_region, h = s.lstm_hidden;
  std::uint64_t total = vocab * e;
  for (auto r : s.region_sizes) total += r * e * f + f;
  const std::uint64_t features = f * s.region_sizes.size();
  total += 4 * h * (features + h) + 8 * h;  // major LSTM, input and recurrent biases
  total += h * corpus::kMajorCount + corpus::kMajorCount;
  total += features * corpus::kReminderSubCount + corpus::kReminderSubCount;
  total += features * corpus::kOfferSubCount + corpus::kOfferSubCount;
  return total;
}

Outcome model_size() {
  auto tokens = preprocess::Vocabulary::reserved_tokens();
  while (tokens.size() < 4000) tokens.push_back("tok" + std::to_string(tokens.size()));
  const nn::LayerSpec spec;
  const auto model = classifier::HierarchicalModel::build(Variant::kHybrid, spec,
                                                          preprocess::Vocabulary::from_tokens(tokens), 1, 3);
  const auto blob = model.to_blob();
  const auto header = header_param_count(blob);
  const auto formula = hybrid_param_formula(tokens.size(), spec);
  const bool ok = blob.size() <= kSizeBudgetBytes && header == formula && header == model.parameter_count();
  return {ok, fmt("blob %zu bytes (%.3f MiB, %.3f MB), header parameters %llu, recomputed %llu", blob.size(),
                  blob.size() / 1048576.0, blob.size() / 1e6, static_cast<unsigned long long>(header),
                  static_cast<unsigned long long>(formula))};
}

Outcome latency(const pipeline::Pipeline& p, const corpus::Corpus& test) {
  const auto r = pipeline::bench(p, test, {100, 2, 10000});
  const bool ok = r.messages >= 1000 && r.classify.mean_ms <= 39.0 && r.total.mean_ms <= 116.0 &&
                  r.batch_seconds <= 19 * 60.0;
  return {ok, fmt("%zu messages, classify mean %.3f ms (p95 %.3f), total mean %.3f ms, %zu-message batch %.1f s",
                  r.messages, r.classify.mean_ms, r.classify.p95_ms, r.total.mean_ms, r.batch_messages,
                  r.batch_seconds)};
}

Outcome extraction(const std::vector<corpus::SyntheticSms>& test) {
  const auto ex = testing::shipped_extractor();
  std::array<entities::KindScore, entities::kEntityKindCount> scores{};
  for (const auto& it : test) {
    const auto found = ex.extract(it.sms.text, it.sms.label, 2019);
    entities::score_against_slots(found, it.slots, ex.active_kinds(it.sms.label), scores);
  }
  bool ok = true;
  std::string detail;
  for (auto k : {entities::EntityKind::kAmount, entities::EntityKind::kDate, entities::EntityKind::kOtpCode,
                 entities::EntityKind::kPromoCode, entities::EntityKind::kUrl}) {
    const auto& s = scores[static_cast<int>(k)];
    ok = ok && s.gold > 0 && s.precision() >= 0.95 && s.recall() >= 0.95;
    detail += fmt("%s P=%.3f R=%.3f; ", std::string(entities::kind_name(k)).c_str(), s.precision(), s.recall());
  }
  const auto example = ex.extract(
      "Please pay the due amount of Rs.97 by 3rd May. You can use Paytm to avail a discount of 9%",
      TaxonomyLabel::parse("Reminder_Bill"), 2019);
  std::vector<std::pair<entities::EntityKind, std::string>> got;
  for (const auto& e : example.entities) got.emplace_back(e.kind, e.normalized);
  const std::vector<std::pair<entities::EntityKind, std::string>> expected{
      {entities::EntityKind::kAmount, "97 INR"},
      {entities::EntityKind::kDate, "2019-05-03"},
      {entities::EntityKind::kPercent, "9"}};
  const bool example_ok = got == expected;
  detail += example_ok ? "example sentence exact" : "example sentence mismatch: " + example.to_json().dump();
  return {ok && example_ok, detail};
}

std::string outputs_of(const pipeline::Pipeline& p, const corpus::Corpus& test) {
  std::string out;
  for (const auto& s : test) {
    out += pipeline::prediction_to_json(p.classify(s.text), s.id).dump() + "\n";
    out += render::card_to_json(p.extract(s.id, s.text)).dump() + "\n";
  }
  return out;
}

Outcome determinism(const std::vector<std::uint8_t>& first_blob, const corpus::Corpus& train,
                    const corpus::Corpus& test) {
  const pipeline::PipelineConfig config;
  const auto second = pipeline::train_model(config, train);
  const bool blobs_equal = second.blob == first_blob;

  const auto a = pipeline::Pipeline::open(first_blob, config.resources, config.reference_year);
  const auto b = pipeline::Pipeline::open(second.blob, config.resources, config.reference_year);
  const auto out_a = outputs_of(a, test);
  const bool outputs_equal = out_a == outputs_of(a, test) && out_a == outputs_of(b, test);

  std::map<std::string, std::string> extra;
  const auto model = classifier::HierarchicalModel::from_blob(first_blob, &extra);
  const auto decoded = nn::deserialize_model(first_blob);
  const bool round_trip =
      model.to_blob(extra) == first_blob &&
      nn::serialize_model(decoded.store, decoded.spec, decoded.vocab_hash, decoded.metadata) == first_blob;

  return {blobs_equal && outputs_equal && round_trip,
          fmt("retrained blob %s (%zu bytes), classify/extract output %s over %zu messages, round trip %s",
              blobs_equal ? "identical" : "differs", first_blob.size(), outputs_equal ? "identical" : "differs",
              test.size(), round_trip ? "exact" : "differs")};
}

void force_class(classifier::HierarchicalModel& m, const std::string& net, std::size_t cls) {
  auto& store = m.store();
  store.param(store.require(net + ".dense.W")).zero();
  auto& b = store.param(store.require(net + ".dense.b"));
  b.zero();
  b.values[cls] = 5.0f;
}

Outcome structure(const classifier::EvalReport& eval, const corpus::Corpus& test) {
  std::vector<std::string> problems;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) problems.push_back(what);
  };

  auto tokens = preprocess::Vocabulary::reserved_tokens();
  while (tokens.size() < 50) tokens.push_back("tok" + std::to_string(tokens.size()));
  const auto vocab = preprocess::Vocabulary::from_tokens(tokens);
  const preprocess::Encoded input{{9, 10, 11, 12, 0, 0}, 4};
  for (int major = 0; major < corpus::kMajorCount; ++major) {
    auto m = classifier::HierarchicalModel::build(Variant::kHybrid, {}, vocab, 1, 5);
    force_class(m, std::string(classifier::kMajorNet), static_cast<std::size_t>(major));
    const auto p = m.predict(input);
    const bool has_sub = p.leaf.major() == corpus::Major::kReminder || p.leaf.major() == corpus::Major::kOffer;
    expect(static_cast<int>(p.leaf.major()) == major, "forced major not honoured");
    expect(has_sub == !p.sub.empty() && p.route.size() == (has_sub ? 2u : 1u), "routing rule violated");
  }

  Rng rng(17);
  for (auto v : {Variant::kHybrid, Variant::kAllCnn, Variant::kAllLstm, Variant::kAllCnnLstm}) {
    const auto m = classifier::HierarchicalModel::build(v, {}, vocab, 1, rng.next());
    for (int trial = 0; trial < 20; ++trial) {
      preprocess::Encoded in;
      in.ids.assign(64, 0);
      in.length = rng.uniform_int(65);
      for (std::size_t t = 0; t < in.length; ++t) in.ids[t] = static_cast<std::int32_t>(1 + rng.uniform_int(49));
      const auto p = m.predict(in);
      expect(std::abs(std::accumulate(p.major.begin(), p.major.end(), 0.0) - 1.0) <= 1e-6, "major softmax sum");
      if (!p.sub.empty()) {
        expect(std::abs(std::accumulate(p.sub.begin(), p.sub.end(), 0.0) - 1.0) <= 1e-6, "sub softmax sum");
      }
    }
  }

  expect(corpus::kLeafCount == 18, "leaf count");
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
    const auto label = TaxonomyLabel::from_leaf(leaf);
    expect(TaxonomyLabel::parse(label.name()) == label, "leaf name round trip");
  }

  std::array<std::size_t, corpus::kLeafCount> gold{};
  for (const auto& s : test) ++gold[s.label.leaf()];
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
    const auto& row = eval.confusion[leaf];
    expect(std::accumulate(row.begin(), row.end(), std::size_t{0}) == gold[leaf], "confusion row sum");
  }

  corpus::AnnotationSet agreement;
  for (int i = 0; i < 40; ++i) {
    const auto id = "item" + std::to_string(i);
    agreement.item_ids.push_back(id);
    agreement.annotators[0][id] = agreement.annotators[1][id] = TaxonomyLabel::from_leaf(i % corpus::kLeafCount);
  }
  expect(corpus::compute_kappa(agreement) == 1.0, "kappa of perfect agreement");

  std::string detail = problems.empty() ? "routing, softmax, 18 leaves, confusion rows, kappa all hold" : "";
  for (const auto& p : problems) detail += p + "; ";
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  try {
    report(1, "gradient correctness", gradients());

    const auto train = labelled(testing::synthetic(kTrainPerLeaf, kTrainSeed));
    const auto test_items = testing::synthetic(kTestPerLeaf, kTestSeed);
    const auto test = labelled(test_items);

    std::vector<std::pair<Variant, Trained>> runs;
    for (auto v : {Variant::kHybrid, Variant::kAllCnnLstm, Variant::kAllCnn, Variant::kAllLstm}) {
      runs.emplace_back(v, train_and_evaluate(v, train, test));
    }
    const auto& hybrid = runs.front().second;
    report(2, "synthetic-corpus accuracy", accuracy(hybrid));
    report(3, "architecture comparison", comparison(runs));
    report(4, "model size and parameter accounting", model_size());

    const pipeline::PipelineConfig config;
    const auto p = pipeline::Pipeline::open(hybrid.result.blob, config.resources, config.reference_year);
    report(5, "latency", latency(p, test));
    report(6, "entity extraction", extraction(test_items));
    report(7, "determinism", determinism(hybrid.result.blob, train, test));
    report(8, "structural invariants", structure(hybrid.eval, test));
  } catch (const std::exception& e) {
    std::cout << "FAIL  acceptance run aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}

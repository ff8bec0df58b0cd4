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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "pipeline/pipeline.hpp"
#include "support.hpp"

using namespace smsie;
using namespace smsie::pipeline;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("smsie_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) { std::ofstream(p, std::ios::binary) << content; }

corpus::Corpus small_corpus(int n, std::uint64_t seed) {
  corpus::Corpus out;
  for (auto& s : testing::synthetic(n, seed)) out.push_back(std::move(s.sms));
  return out;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.training.epochs = 3;
  c.seed = 5;
  c.training.seed = 5;
  return c;
}

const TrainResult& small_model() {
  static const TrainResult r = train_model(small_config(), small_corpus(20, 3));
  return r;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config defaults and overrides") {
    TempDir dir("config");
    write_file(dir.path / "c.json", R"({"variant":"all-cnn","seed":9,"paths":{"model":"m.bin"},
                                        "training":{"epochs":4},"preprocess":{"max_len":32}})");
    const auto c = PipelineConfig::load(dir.path / "c.json");
    CHECK(c.variant == classifier::Variant::kAllCnn);
    CHECK(c.seed == 9);
    CHECK(c.training.seed == 9);
    CHECK(c.training.epochs == 4);
    CHECK(c.preprocess.max_len == 32);
    CHECK(c.model == dir.path / "m.bin");
    CHECK(c.resources.patterns == fs::path(SMSIE_DATA_DIR) / "patterns.tsv");
    CHECK_NOTHROW(c.check_files());

    const auto again = PipelineConfig::from_json(nlohmann::json::parse(c.to_json().dump()), dir.path);
    CHECK(again.to_json() == c.to_json());
  }

  TEST_CASE("config errors") {
    const fs::path base = ".";
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"colour":1})"), base), Error);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"training":{"epochz":1}})"), base), Error);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"variant":"rnn"})"), base), Error);
    CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"seed":"x"})"), base), Error);
    auto c = PipelineConfig::from_json(nlohmann::json::parse(R"({"data_dir":"/nonexistent"})"), base);
    try {
      c.check_files();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kIo);
    }
  }

  TEST_CASE("generated corpus is deterministic") {
    const auto a = generate_corpus(SMSIE_DATA_DIR, testing::per_leaf(3), 11);
    const auto b = generate_corpus(SMSIE_DATA_DIR, testing::per_leaf(3), 11);
    REQUIRE(a.size() == 54);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].sms.text == b[i].sms.text);
  }

  TEST_CASE("train, open and run") {
    const auto& r = small_model();
    CHECK(r.parameters > 0);
    CHECK_FALSE(r.log.empty());
    std::ostringstream log;
    const auto again = train_model(small_config(), small_corpus(20, 3), &log);
    CHECK(again.blob == r.blob);
    CHECK(log.str().find("\"net\"") != std::string::npos);

    const auto p = Pipeline::open(r.blob, ResourcePaths::in(SMSIE_DATA_DIR), 2019);
    CHECK(p.blob_size() == r.blob.size());
    const auto pred = p.classify("Your OTP is 4821");
    CHECK(pred.major.size() == corpus::kMajorCount);
    const auto j = prediction_to_json(pred, "x");
    CHECK(j["id"] == "x");
    CHECK(j["leaf"] == pred.leaf.name());

    const auto card = p.extract("c1", "Please pay the due amount of Rs.97 by 3rd May.");
    CHECK(card.source_id == "c1");
    const auto set = p.extract_entities("Please pay the due amount of Rs.97 by 3rd May.",
                                        corpus::TaxonomyLabel::parse("Reminder_Bill"));
    CHECK(set.entities.size() == 2);
  }

  TEST_CASE("a changed resource file is refused") {
    const auto& r = small_model();
    TempDir dir("mismatch");
    for (const auto& e : fs::directory_iterator(SMSIE_DATA_DIR)) fs::copy(e.path(), dir.path / e.path().filename());
    CHECK_NOTHROW(Pipeline::open(r.blob, ResourcePaths::in(dir.path), 2019));
    std::ofstream(dir.path / "vendors.txt", std::ios::app) << "Zzyzx Mart\n";
    try {
      (void)Pipeline::open(r.blob, ResourcePaths::in(dir.path), 2019);
      FAIL("expected a mismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kMismatch);
      CHECK(std::string(e.what()).find("vendors") != std::string::npos);
    }
  }

  TEST_CASE("corrupt model is a format error") {
    auto blob = small_model().blob;
    blob.resize(blob.size() / 2);
    CHECK_THROWS_AS(Pipeline::open(blob, ResourcePaths::in(SMSIE_DATA_DIR), 2019), Error);
  }

  TEST_CASE("timing statistics") {
    const auto t = timing_stats({4.0, 1.0, 3.0, 2.0});
    CHECK(t.mean_ms == doctest::Approx(2.5));
    CHECK(t.median_ms == doctest::Approx(2.5));
    CHECK(t.p95_ms == doctest::Approx(4.0));
    std::vector<double> hundred;
    for (int i = 1; i <= 100; ++i) hundred.push_back(i);
    CHECK(timing_stats(hundred).p95_ms == doctest::Approx(95.0));
    CHECK(timing_stats({}).mean_ms == 0.0);
  }

  TEST_CASE("bench report") {
    const auto p = Pipeline::open(small_model().blob, ResourcePaths::in(SMSIE_DATA_DIR), 2019);
    const auto corpus = small_corpus(2, 8);
    const auto report = bench(p, corpus, {5, 2, 50});
    CHECK(report.messages == 2 * corpus.size());
    CHECK(report.batch_messages == 50);
    CHECK(report.classify.mean_ms > 0.0);
    CHECK(report.total.mean_ms >= report.classify.mean_ms);
    CHECK(report.model_size_bytes == p.blob_size());
    CHECK(report.projected_batch_seconds == doctest::Approx(report.total.mean_ms * 50 / 1000.0));
    const auto j = report.to_json();
    CHECK(j.contains("classify"));
  }
}

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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "classifier/model.hpp"
#include "corpus/synthetic.hpp"
#include "entities/entities.hpp"
#include "preprocess/preprocess.hpp"
#include "render/render.hpp"

namespace smsie::pipeline {

struct ResourcePaths {
  std::filesystem::path data_dir;
  std::filesystem::path patterns;
  std::filesystem::path cities;
  std::filesystem::path card_templates;
  std::filesystem::path entity_parsers;
  std::filesystem::path vendors;

  // The standard file names under `data_dir`.
  static ResourcePaths in(const std::filesystem::path& data_dir);
};

struct PipelineConfig {
  ResourcePaths resources = ResourcePaths::in(SMSIE_DATA_DIR);
  std::filesystem::path corpus;
  std::filesystem::path model;
  preprocess::PreprocessConfig preprocess;
  nn::LayerSpec layers;
  classifier::TrainingConfig training;
  classifier::Variant variant = classifier::Variant::kHybrid;
  std::uint64_t seed = 42;
  int reference_year = 2019;

  // Reads a JSON config; relative paths resolve against the file's directory
  // and omitted keys keep their defaults. Unknown keys are kData errors.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  nlohmann::ordered_json to_json() const;

  // Throws kIo naming the first resource file that does not exist.
  void check_files() const;
};

// Parsed resource files plus their content hashes.
struct Resources {
  preprocess::PatternBank patterns;
  preprocess::CityDictionary cities;
  render::TemplateSet cards;
  entities::ParserSpec parsers;
  entities::VendorLexicon vendors;

  static Resources load(const ResourcePaths& paths);

  // Hash of each file, keyed as recorded in model metadata.
  std::map<std::string, std::string> hashes() const;
};

// Synthetic corpus with `per_leaf[leaf]` messages per leaf.
std::vector<corpus::SyntheticSms> generate_corpus(const std::filesystem::path& data_dir,
                                                  const std::map<int, int>& per_leaf, std::uint64_t seed);

struct TrainResult {
  std::vector<std::uint8_t> blob;
  std::vector<classifier::EpochLog> log;
  std::size_t parameters = 0;
};

// Trains config.variant on `train` and serializes it with the resource hashes
// and preprocessing settings in the metadata.
TrainResult train_model(const PipelineConfig& config, const corpus::Corpus& train,
                        std::ostream* jsonl_log = nullptr);

// A trained model bound to the resources it was trained with.
class Pipeline {
 public:
  // Throws kMismatch when a resource file differs from the one recorded in
  // the model.
  static Pipeline open(const std::vector<std::uint8_t>& blob, const ResourcePaths& paths, int reference_year);
  static Pipeline open(const PipelineConfig& config);

  classifier::Prediction classify(std::string_view text) const;
  entities::EntitySet extract_entities(std::string_view text, const corpus::TaxonomyLabel& leaf) const;
  // Classifies, extracts with the predicted leaf and renders the card.
  render::Card extract(std::string_view source_id, std::string_view text) const;

  const classifier::HierarchicalModel& model() const { return *model_; }
  const preprocess::Preprocessor& preprocessor() const { return *pre_; }
  const entities::EntityExtractor& extractor() const { return *extractor_; }
  const render::TemplateSet& cards() const { return cards_; }
  std::size_t blob_size() const { return blob_size_; }

 private:
  Pipeline() = default;

  std::unique_ptr<classifier::HierarchicalModel> model_;
  std::unique_ptr<preprocess::Preprocessor> pre_;
  std::unique_ptr<entities::EntityExtractor> extractor_;
  render::TemplateSet cards_;
  int reference_year_ = 2019;
  std::size_t blob_size_ = 0;
};

nlohmann::ordered_json prediction_to_json(const classifier::Prediction& p, std::string_view id = {});

struct TimingStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

TimingStats timing_stats(std::vector<double> samples_ms);

struct BenchConfig {
  std::size_t warmup = 100;
  std::size_t repetitions = 1;   // timed passes over the corpus
  std::size_t batch_size = 10000;  // 0 skips the end-to-end batch run
};

struct BenchReport {
  std::size_t messages = 0;
  TimingStats classify;
  TimingStats extract;
  TimingStats total;
  std::size_t model_size_bytes = 0;
  double projected_batch_seconds = 0.0;  // total mean x batch_size
  std::size_t batch_messages = 0;
  double batch_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Single-threaded steady-state timing of classification and extraction.
BenchReport bench(const Pipeline& pipeline, const corpus::Corpus& corpus, const BenchConfig& config);

}  // namespace smsie::pipeline

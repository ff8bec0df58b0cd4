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

#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kHashPrefix = "hash.";

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(ErrorKind::kData, "config: " + std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorKind::kData, "config: unknown key " + std::string(where) + "." + key);
    }
  }
}

template <typename T>
void read(const json& j, std::string_view key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kData, "config: bad value for " + std::string(key));
  }
}

void read_path(const json& j, std::string_view key, const fs::path& base, fs::path& out) {
  std::string s;
  read(j, key, s);
  if (s.empty()) return;
  fs::path p(s);
  out = p.is_absolute() ? p : base / p;
}

std::map<std::string, std::string> preprocess_metadata(const preprocess::PreprocessConfig& c) {
  return {{"max_len", std::to_string(c.max_len)},
          {"min_frequency", std::to_string(c.min_frequency)},
          {"max_size", std::to_string(c.max_size)}};
}

std::size_t metadata_size(const std::map<std::string, std::string>& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) fail(ErrorKind::kFormat, "model metadata lacks " + key);
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    fail(ErrorKind::kFormat, "model metadata has a bad " + key);
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

ordered_json timing_json(const TimingStats& t) {
  return {{"mean_ms", t.mean_ms}, {"median_ms", t.median_ms}, {"p95_ms", t.p95_ms}};
}

}  // namespace

ResourcePaths ResourcePaths::in(const fs::path& data_dir) {
  return {data_dir,
          data_dir / "patterns.tsv",
          data_dir / "cities.txt",
          data_dir / "card_templates.txt",
          data_dir / "entity_parsers.tsv",
          data_dir / "vendors.txt"};
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kData, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  PipelineConfig c;
  check_keys(j, "config", {"data_dir", "paths", "preprocess", "layers", "training", "variant", "seed",
                           "reference_year"});
  fs::path data_dir = c.resources.data_dir;
  read_path(j, "data_dir", base_dir, data_dir);
  c.resources = ResourcePaths::in(data_dir);
  if (auto it = j.find("paths"); it != j.end()) {
    check_keys(*it, "paths", {"corpus", "model", "patterns", "cities", "card_templates", "entity_parsers",
                              "vendors"});
    read_path(*it, "corpus", base_dir, c.corpus);
    read_path(*it, "model", base_dir, c.model);
    read_path(*it, "patterns", base_dir, c.resources.patterns);
    read_path(*it, "cities", base_dir, c.resources.cities);
    read_path(*it, "card_templates", base_dir, c.resources.card_templates);
    read_path(*it, "entity_parsers", base_dir, c.resources.entity_parsers);
    read_path(*it, "vendors", base_dir, c.resources.vendors);
  }
  if (auto it = j.find("preprocess"); it != j.end()) {
    check_keys(*it, "preprocess", {"max_len", "min_frequency", "max_size"});
    read(*it, "max_len", c.preprocess.max_len);
    read(*it, "min_frequency", c.preprocess.min_frequency);
    read(*it, "max_size", c.preprocess.max_size);
  }
  if (auto it = j.find("layers"); it != j.end()) {
    check_keys(*it, "layers", {"embedding_dim", "region_sizes", "filters_per_region", "lstm_hidden", "dropout",
                               "pool_window", "pool_stride"});
    read(*it, "embedding_dim", c.layers.embedding_dim);
    read(*it, "region_sizes", c.layers.region_sizes);
    read(*it, "filters_per_region", c.layers.filters_per_region);
    read(*it, "lstm_hidden", c.layers.lstm_hidden);
    read(*it, "dropout", c.layers.dropout);
    read(*it, "pool_window", c.layers.pool_window);
    read(*it, "pool_stride", c.layers.pool_stride);
  }
  if (auto it = j.find("training"); it != j.end()) {
    check_keys(*it, "training", {"batch_size", "epochs", "dev_fraction", "learning_rate", "beta1", "beta2",
                                 "epsilon", "patience"});
    read(*it, "batch_size", c.training.batch_size);
    read(*it, "epochs", c.training.epochs);
    read(*it, "dev_fraction", c.training.dev_fraction);
    read(*it, "learning_rate", c.training.adam.learning_rate);
    read(*it, "beta1", c.training.adam.beta1);
    read(*it, "beta2", c.training.adam.beta2);
    read(*it, "epsilon", c.training.adam.epsilon);
    read(*it, "patience", c.training.patience);
  }
  std::string variant(classifier::variant_name(c.variant));
  read(j, "variant", variant);
  c.variant = classifier::parse_variant(variant);
  read(j, "seed", c.seed);
  read(j, "reference_year", c.reference_year);
  c.training.seed = c.seed;
  c.layers.validate();
  c.training.validate();
  return c;
}

ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["data_dir"] = resources.data_dir.string();
  j["paths"] = {{"corpus", corpus.string()},
                {"model", model.string()},
                {"patterns", resources.patterns.string()},
                {"cities", resources.cities.string()},
                {"card_templates", resources.card_templates.string()},
                {"entity_parsers", resources.entity_parsers.string()},
                {"vendors", resources.vendors.string()}};
  j["preprocess"] = {{"max_len", preprocess.max_len},
                     {"min_frequency", preprocess.min_frequency},
                     {"max_size", preprocess.max_size}};
  j["layers"] = {{"embedding_dim", layers.embedding_dim},   {"region_sizes", layers.region_sizes},
                 {"filters_per_region", layers.filters_per_region}, {"lstm_hidden", layers.lstm_hidden},
                 {"dropout", layers.dropout},                 {"pool_window", layers.pool_window},
                 {"pool_stride", layers.pool_stride}};
  j["training"] = {{"batch_size", training.batch_size},       {"epochs", training.epochs},
                   {"dev_fraction", training.dev_fraction},   {"learning_rate", training.adam.learning_rate},
                   {"beta1", training.adam.beta1},            {"beta2", training.adam.beta2},
                   {"epsilon", training.adam.epsilon},        {"patience", training.patience}};
  j["variant"] = classifier::variant_name(variant);
  j["seed"] = seed;
  j["reference_year"] = reference_year;
  return j;
}

void PipelineConfig::check_files() const {
  for (const auto* p : {&resources.patterns, &resources.cities, &resources.card_templates,
                        &resources.entity_parsers, &resources.vendors}) {
    if (!fs::is_regular_file(*p)) fail(ErrorKind::kIo, "resource file not found: " + p->string());
  }
}

Resources Resources::load(const ResourcePaths& paths) {
  return {preprocess::PatternBank::load(paths.patterns), preprocess::CityDictionary::load(paths.cities),
          render::TemplateSet::load(paths.card_templates), entities::ParserSpec::load(paths.entity_parsers),
          entities::VendorLexicon::load(paths.vendors)};
}

std::map<std::string, std::string> Resources::hashes() const {
  const std::string p(kHashPrefix);
  return {{p + "patterns", hex64(patterns.content_hash())},
          {p + "cities", hex64(cities.content_hash())},
          {p + "card_templates", hex64(cards.content_hash())},
          {p + "entity_parsers", hex64(parsers.content_hash())},
          {p + "vendors", hex64(vendors.content_hash())}};
}

std::vector<corpus::SyntheticSms> generate_corpus(const fs::path& data_dir, const std::map<int, int>& per_leaf,
                                                  std::uint64_t seed) {
  const auto bank = corpus::load_template_bank(data_dir);
  corpus::validate_template_bank(bank);
  Rng rng(seed);
  return corpus::generate_synthetic_corpus(per_leaf, bank, rng);
}

TrainResult train_model(const PipelineConfig& config, const corpus::Corpus& train, std::ostream* jsonl_log) {
  config.check_files();
  const auto res = Resources::load(config.resources);
  preprocess::Preprocessor pre(res.patterns, res.cities, config.preprocess);
  auto training = config.training;
  training.seed = config.seed;
  std::ostringstream captured;
  auto model = classifier::train_from_corpus(train, pre, config.variant, config.layers, training, &captured);
  if (jsonl_log) *jsonl_log << captured.str();

  TrainResult out;
  std::istringstream lines(captured.str());
  for (std::string line; std::getline(lines, line);) {
    const auto j = json::parse(line);
    out.log.push_back({j.at("net").get<std::string>(), j.at("epoch").get<std::size_t>(),
                       j.at("loss").get<double>(), j.at("dev_acc").get<double>()});
  }
  auto meta = res.hashes();
  meta.merge(preprocess_metadata(config.preprocess));
  meta["seed"] = std::to_string(config.seed);
  out.blob = model.to_blob(meta);
  out.parameters = model.parameter_count();
  return out;
}

Pipeline Pipeline::open(const std::vector<std::uint8_t>& blob, const ResourcePaths& paths, int reference_year) {
  std::map<std::string, std::string> meta;
  auto model = classifier::HierarchicalModel::from_blob(blob, &meta);
  auto res = Resources::load(paths);
  for (const auto& [key, value] : res.hashes()) {
    auto it = meta.find(key);
    if (it == meta.end()) fail(ErrorKind::kFormat, "model metadata lacks " + key);
    if (it->second != value) {
      fail(ErrorKind::kMismatch, "resource " + key.substr(kHashPrefix.size()) +
                                     " differs from the file the model was trained with (model " + it->second +
                                     ", file " + value + ")");
    }
  }
  preprocess::PreprocessConfig pc{metadata_size(meta, "max_len"), metadata_size(meta, "min_frequency"),
                                  metadata_size(meta, "max_size")};
  Pipeline p;
  p.pre_ = std::make_unique<preprocess::Preprocessor>(res.patterns, res.cities, pc);
  if (p.pre_->config_hash() != model.preprocess_hash()) {
    fail(ErrorKind::kMismatch, "preprocessing settings differ from the ones the model was trained with");
  }
  p.model_ = std::make_unique<classifier::HierarchicalModel>(std::move(model));
  p.extractor_ = std::make_unique<entities::EntityExtractor>(std::move(res.patterns), std::move(res.parsers),
                                                             std::move(res.vendors));
  p.cards_ = std::move(res.cards);
  p.reference_year_ = reference_year;
  p.blob_size_ = blob.size();
  return p;
}

Pipeline Pipeline::open(const PipelineConfig& config) {
  if (config.model.empty()) fail(ErrorKind::kInvalidArgument, "no model path given");
  config.check_files();
  const auto bytes = read_file(config.model);
  return open(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), config.resources, config.reference_year);
}

classifier::Prediction Pipeline::classify(std::string_view text) const {
  return classifier::predict(*model_, *pre_, text);
}

entities::EntitySet Pipeline::extract_entities(std::string_view text, const corpus::TaxonomyLabel& leaf) const {
  return extractor_->extract(text, leaf, reference_year_);
}

render::Card Pipeline::extract(std::string_view source_id, std::string_view text) const {
  const auto pred = classify(text);
  return render::render_card(source_id, text, extract_entities(text, pred.leaf), cards_);
}

ordered_json prediction_to_json(const classifier::Prediction& p, std::string_view id) {
  ordered_json j;
  if (!id.empty()) j["id"] = id;
  j["leaf"] = p.leaf.name();
  j["major"] = corpus::major_name(p.leaf.major());
  j["route"] = p.route;
  j["major_probs"] = p.major;
  j["sub_probs"] = p.sub;
  return j;
}

TimingStats timing_stats(std::vector<double> samples_ms) {
  TimingStats t;
  if (samples_ms.empty()) return t;
  std::sort(samples_ms.begin(), samples_ms.end());
  const auto n = samples_ms.size();
  t.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(n);
  t.median_ms = n % 2 ? samples_ms[n / 2] : 0.5 * (samples_ms[n / 2 - 1] + samples_ms[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  t.p95_ms = samples_ms[std::max<std::size_t>(rank, 1) - 1];
  return t;
}

ordered_json BenchReport::to_json() const {
  ordered_json j;
  j["messages"] = messages;
  j["classify"] = timing_json(classify);
  j["extract"] = timing_json(extract);
  j["total"] = timing_json(total);
  j["model_size_bytes"] = model_size_bytes;
  j["projected_batch_seconds"] = projected_batch_seconds;
  j["batch_messages"] = batch_messages;
  j["batch_seconds"] = batch_seconds;
  return j;
}

BenchReport bench(const Pipeline& pipeline, const corpus::Corpus& corpus, const BenchConfig& config) {
  if (corpus.empty()) fail(ErrorKind::kInvalidArgument, "bench needs at least one message");
  for (std::size_t i = 0; i < config.warmup; ++i) {
    const auto& sms = corpus[i % corpus.size()];
    (void)pipeline.extract(sms.id, sms.text);
  }
  std::vector<double> cls, ext, tot;
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    for (const auto& sms : corpus) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto pred = pipeline.classify(sms.text);
      const double c = elapsed_ms(t0);
      const auto t1 = std::chrono::steady_clock::now();
      const auto card = render::render_card(sms.id, sms.text, pipeline.extract_entities(sms.text, pred.leaf),
                                            pipeline.cards());
      const double e = elapsed_ms(t1);
      cls.push_back(c);
      ext.push_back(e);
      tot.push_back(c + e);
    }
  }
  BenchReport r;
  r.messages = cls.size();
  r.classify = timing_stats(std::move(cls));
  r.extract = timing_stats(std::move(ext));
  r.total = timing_stats(std::move(tot));
  r.model_size_bytes = pipeline.blob_size();
  r.projected_batch_seconds = r.total.mean_ms * static_cast<double>(config.batch_size) / 1000.0;
  if (config.batch_size > 0) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < config.batch_size; ++i) {
      const auto& sms = corpus[i % corpus.size()];
      (void)card_to_json(pipeline.extract(sms.id, sms.text)).dump();
    }
    r.batch_messages = config.batch_size;
    r.batch_seconds = elapsed_ms(t0) / 1000.0;
  }
  return r;
}

}  // namespace smsie::pipeline

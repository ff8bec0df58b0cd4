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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include "classifier/network.hpp"
#include "corpus/corpus.hpp"
#include "nn/optim.hpp"
#include "preprocess/preprocess.hpp"

namespace smsie::classifier {

enum class Variant { kAllCnn, kAllLstm, kAllCnnLstm, kHybrid };

std::string_view variant_name(Variant v);
// Accepts "Hybrid", "AllCnnLstm", "all-cnn-lstm", ...; throws kInvalidArgument.
Variant parse_variant(std::string_view name);

struct TrainingConfig {
  std::size_t batch_size = 16;
  std::size_t epochs = 200;
  double dev_fraction = 0.1;
  nn::AdamConfig adam;
  std::uint64_t seed = 42;
  std::size_t patience = 20;

  void validate() const;
};

struct EpochLog {
  std::string net;
  std::size_t epoch = 0;
  double loss = 0.0;
  double dev_accuracy = 0.0;
};

struct Prediction {
  corpus::TaxonomyLabel leaf;
  std::vector<double> major;  // kMajorCount entries
  std::vector<double> sub;    // empty unless routed to a second-level net
  std::vector<std::string> route;
};

struct TrainingExample {
  preprocess::Encoded input;
  corpus::TaxonomyLabel label;
};

inline constexpr std::string_view kMajorNet = "major_net";
inline constexpr std::string_view kReminderNet = "reminder_net";
inline constexpr std::string_view kOfferNet = "offer_net";

class HierarchicalModel {
 public:
  // Fresh, randomly initialised model.
  static HierarchicalModel build(Variant variant, const nn::LayerSpec& spec, preprocess::Vocabulary vocab,
                                 std::uint64_t preprocess_hash, std::uint64_t seed);

  // Restores a model written by to_blob. Metadata keys not used by the
  // classifier are returned through `extra`.
  static HierarchicalModel from_blob(const std::vector<std::uint8_t>& blob,
                                     std::map<std::string, std::string>* extra = nullptr);
  std::vector<std::uint8_t> to_blob(const std::map<std::string, std::string>& extra = {}) const;

  Variant variant() const { return variant_; }
  const nn::LayerSpec& spec() const { return spec_; }
  const preprocess::Vocabulary& vocab() const { return vocab_; }
  std::uint64_t preprocess_hash() const { return preprocess_hash_; }
  std::size_t parameter_count() const { return store_.parameter_count(); }
  const nn::ParameterStore<float>& store() const { return store_; }
  nn::ParameterStore<float>& store() { return store_; }

  Net<float>& major_net() { return nets_[0]; }
  const Net<float>& major_net() const { return nets_[0]; }
  // Second-level net for Reminder or Offer.
  const Net<float>& sub_net(corpus::Major m) const;
  Net<float>& sub_net(corpus::Major m);

  Prediction predict(const preprocess::Encoded& input) const;

 private:
  HierarchicalModel(Variant variant, const nn::LayerSpec& spec, preprocess::Vocabulary vocab,
                    std::uint64_t preprocess_hash);

  Variant variant_;
  nn::LayerSpec spec_;
  preprocess::Vocabulary vocab_;
  std::uint64_t preprocess_hash_;
  nn::ParameterStore<float> store_;
  std::vector<Net<float>> nets_;  // major, reminder, offer
};

// Runs the preprocessor and the model; the preprocessor must be the one the
// model was trained with (kMismatch otherwise).
Prediction predict(const HierarchicalModel& model, const preprocess::Preprocessor& pre,
                   std::string_view text);

// Trains the major net on every example, then the reminder and offer nets on
// their own subsets. A dev split is carved per leaf for early stopping.
std::vector<EpochLog> train_hierarchical(HierarchicalModel& model, const std::vector<TrainingExample>& data,
                                         const TrainingConfig& config, std::ostream* jsonl_log = nullptr);

// Tokenizes the corpus, builds the vocabulary, then builds and trains a model.
HierarchicalModel train_from_corpus(const corpus::Corpus& train, const preprocess::Preprocessor& pre,
                                    Variant variant, const nn::LayerSpec& spec, const TrainingConfig& config,
                                    std::ostream* jsonl_log = nullptr);

struct EvalReport {
  double overall = 0.0;
  double major_accuracy = 0.0;
  std::size_t total = 0;
  std::map<std::string, double> per_leaf;  // leaves present in the test set
  std::array<std::array<std::size_t, corpus::kLeafCount>, corpus::kLeafCount> confusion{};  // [gold][pred]

  nlohmann::ordered_json to_json() const;
};

using Classifier = std::function<corpus::TaxonomyLabel(const corpus::LabeledSms&)>;

EvalReport evaluate(const corpus::Corpus& test, const Classifier& classify);
EvalReport evaluate(const HierarchicalModel& model, const preprocess::Preprocessor& pre,
                    const corpus::Corpus& test);

struct ComparisonRow {
  Variant variant;
  EvalReport report;
  std::size_t parameters = 0;
};

// Trains each variant on the same split and seed; rows follow `variants`.
std::vector<ComparisonRow> compare_architectures(const corpus::Corpus& train, const corpus::Corpus& test,
                                                 const preprocess::Preprocessor& pre,
                                                 const std::vector<Variant>& variants,
                                                 const nn::LayerSpec& spec, const TrainingConfig& config);

nlohmann::ordered_json comparison_to_json(const std::vector<ComparisonRow>& rows);

}  // namespace smsie::classifier

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

#include "classifier/model.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include "common/error.hpp"
#include "common/text.hpp"

namespace smsie::classifier {

using corpus::Major;
using corpus::TaxonomyLabel;

namespace {

constexpr std::array<std::string_view, 4> kVariantNames = {"AllCnn", "AllLstm", "AllCnnLstm", "Hybrid"};

NetArch major_arch(Variant v) {
  switch (v) {
    case Variant::kAllCnn: return NetArch::kCnn;
    case Variant::kAllLstm: return NetArch::kLstm;
    case Variant::kAllCnnLstm:
    case Variant::kHybrid: return NetArch::kCnnLstm;
  }
  return NetArch::kCnn;
}

NetArch sub_arch(Variant v) {
  switch (v) {
    case Variant::kAllCnn:
    case Variant::kHybrid: return NetArch::kCnn;
    case Variant::kAllLstm: return NetArch::kLstm;
    case Variant::kAllCnnLstm: return NetArch::kCnnLstm;
  }
  return NetArch::kCnn;
}

template <typename T>
std::size_t argmax(const std::vector<T>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct Sample {
  const preprocess::Encoded* input;
  TaxonomyLabel label;
};

// Net slots inside a model: 0 major, 1 reminder, 2 offer.
Net<float>& net_at(HierarchicalModel& m, int slot) {
  if (slot == 0) return m.major_net();
  return m.sub_net(slot == 1 ? Major::kReminder : Major::kOffer);
}

// Class index a net is trained on for this label, if the net sees it at all.
std::optional<std::size_t> target_for(const TaxonomyLabel& label, int slot) {
  if (slot == 0) return static_cast<std::size_t>(label.major());
  const Major want = slot == 1 ? Major::kReminder : Major::kOffer;
  if (label.major() != want) return std::nullopt;
  return static_cast<std::size_t>(*label.sub());
}

double net_accuracy(const HierarchicalModel& m, const Net<float>& net, int slot, const std::vector<Sample>& set) {
  std::size_t seen = 0, hits = 0;
  Net<float>::Trace tr;
  for (const auto& s : set) {
    auto y = target_for(s.label, slot);
    if (!y) continue;
    ++seen;
    auto p = net.forward(m.store(), s.input->ids, s.input->length, false, nullptr, tr);
    if (argmax(p) == *y) ++hits;
  }
  return seen ? static_cast<double>(hits) / static_cast<double>(seen) : 0.0;
}

double cascade_accuracy(const HierarchicalModel& m, const std::vector<Sample>& set) {
  std::size_t hits = 0;
  for (const auto& s : set) {
    if (m.predict(*s.input).leaf == s.label) ++hits;
  }
  return set.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(set.size());
}

void write_log(std::ostream* jsonl, const EpochLog& e) {
  if (!jsonl) return;
  nlohmann::ordered_json j;
  j["net"] = e.net;
  j["epoch"] = e.epoch;
  j["loss"] = e.loss;
  j["dev_acc"] = e.dev_accuracy;
  *jsonl << j.dump() << '\n';
}

// Trains the nets in `slots` together on their own targets until the dev
// score stops improving, then restores the best parameters. With a single
// net the score is that net's accuracy, otherwise leaf accuracy of the
// cascade.
void train_phase(HierarchicalModel& model, const std::vector<int>& slots, std::vector<Sample> train,
                 const std::vector<Sample>& dev, const TrainingConfig& config, Rng& rng,
                 std::vector<EpochLog>& log, std::ostream* jsonl) {
  auto& store = model.store();
  std::vector<std::size_t> params;
  for (int slot : slots) {
    for (auto i : net_at(model, slot).parameters()) {
      if (std::find(params.begin(), params.end(), i) == params.end()) params.push_back(i);
    }
  }
  nn::Adam<float> adam(store, config.adam);
  std::vector<nn::Tensor<float>> best;
  double best_score = -1.0;
  std::size_t stale = 0;
  Net<float>::Trace tr;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<Sample>(train));
    std::vector<double> loss(slots.size(), 0.0);
    std::vector<std::size_t> seen(slots.size(), 0);
    for (std::size_t start = 0; start < train.size(); start += config.batch_size) {
      const std::size_t end = std::min(train.size(), start + config.batch_size);
      const float scale = 1.0f / static_cast<float>(end - start);
      for (auto i : params) store.grad(i).zero();
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = train[k];
        for (std::size_t n = 0; n < slots.size(); ++n) {
          auto y = target_for(s.label, slots[n]);
          if (!y) continue;
          const auto& net = net_at(model, slots[n]);
          auto p = net.forward(store, s.input->ids, s.input->length, true, &rng, tr);
          loss[n] += nn::cross_entropy<float>(p, *y);
          ++seen[n];
          auto d = nn::softmax_cross_entropy_grad<float>(p, *y);
          for (auto& v : d) v *= scale;
          net.backward(store, s.input->ids, tr, d);
        }
      }
      adam.step(store, params);
    }
    for (std::size_t n = 0; n < slots.size(); ++n) {
      const auto& net = net_at(model, slots[n]);
      EpochLog e{net.name(), epoch, seen[n] ? loss[n] / static_cast<double>(seen[n]) : 0.0,
                 net_accuracy(model, net, slots[n], dev)};
      log.push_back(e);
      write_log(jsonl, e);
    }
    double score = log.back().dev_accuracy;
    if (slots.size() > 1) {
      double total = 0.0;
      for (std::size_t n = 0; n < slots.size(); ++n) total += loss[n];
      EpochLog e{"cascade", epoch, total / static_cast<double>(train.size()), cascade_accuracy(model, dev)};
      log.push_back(e);
      write_log(jsonl, e);
      score = e.dev_accuracy;
    }
    if (score > best_score) {
      best_score = score;
      stale = 0;
      best.clear();
      for (auto i : params) best.push_back(store.param(i));
    } else if (++stale >= config.patience) {
      break;
    }
    // Nothing can beat a perfect dev score, so the snapshot is final.
    if (best_score >= 1.0) break;
  }
  for (std::size_t k = 0; k < params.size(); ++k) store.param(params[k]) = std::move(best[k]);
}

// Per-leaf dev carve; returns a dev flag per example.
std::vector<bool> carve_dev(const std::vector<TrainingExample>& data, double fraction, Rng& rng) {
  std::array<std::vector<std::size_t>, corpus::kLeafCount> by_leaf;
  for (std::size_t i = 0; i < data.size(); ++i) by_leaf[data[i].label.leaf()].push_back(i);
  std::vector<bool> dev(data.size(), false);
  for (auto& idx : by_leaf) {
    if (idx.size() < 2) continue;
    rng.shuffle(std::span<std::size_t>(idx));
    auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    n = std::clamp<std::size_t>(n, 1, idx.size() - 1);
    for (std::size_t k = 0; k < n; ++k) dev[idx[k]] = true;
  }
  return dev;
}

std::vector<double> widen(const std::vector<float>& p) { return {p.begin(), p.end()}; }

}  // namespace

std::string_view variant_name(Variant v) { return kVariantNames[static_cast<int>(v)]; }

Variant parse_variant(std::string_view name) {
  auto fold = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c != '-' && c != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  };
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (fold(kVariantNames[i]) == fold(name)) return static_cast<Variant>(i);
  }
  fail(ErrorKind::kInvalidArgument, "unknown variant: " + std::string(name));
}

void TrainingConfig::validate() const {
  if (batch_size < 1) fail(ErrorKind::kInvalidArgument, "batch_size must be >= 1");
  if (epochs < 1) fail(ErrorKind::kInvalidArgument, "epochs must be >= 1");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) fail(ErrorKind::kInvalidArgument, "dev_fraction must be in (0,1)");
  if (patience < 1) fail(ErrorKind::kInvalidArgument, "patience must be >= 1");
}

HierarchicalModel::HierarchicalModel(Variant variant, const nn::LayerSpec& spec, preprocess::Vocabulary vocab,
                                     std::uint64_t preprocess_hash)
    : variant_(variant), spec_(spec), vocab_(std::move(vocab)), preprocess_hash_(preprocess_hash) {
  spec_.validate();
  const auto v = vocab_.size();
  nets_.emplace_back(major_arch(variant), std::string(kMajorNet), corpus::kMajorCount, spec_, v);
  nets_.emplace_back(sub_arch(variant), std::string(kReminderNet), corpus::kReminderSubCount, spec_, v);
  nets_.emplace_back(sub_arch(variant), std::string(kOfferNet), corpus::kOfferSubCount, spec_, v);
}

HierarchicalModel HierarchicalModel::build(Variant variant, const nn::LayerSpec& spec, preprocess::Vocabulary vocab,
                                           std::uint64_t preprocess_hash, std::uint64_t seed) {
  HierarchicalModel m(variant, spec, std::move(vocab), preprocess_hash);
  Rng rng(seed);
  for (auto& net : m.nets_) net.declare(m.store_, rng);
  return m;
}

std::vector<std::uint8_t> HierarchicalModel::to_blob(const std::map<std::string, std::string>& extra) const {
  auto meta = extra;
  meta["variant"] = std::string(variant_name(variant_));
  meta["preprocess_hash"] = hex64(preprocess_hash_);
  std::string tokens;
  for (const auto& t : vocab_.tokens()) {
    tokens += t;
    tokens += '\n';
  }
  meta["vocab"] = tokens;
  return nn::serialize_model(store_, spec_, vocab_.hash(), meta);
}

HierarchicalModel HierarchicalModel::from_blob(const std::vector<std::uint8_t>& blob,
                                               std::map<std::string, std::string>* extra) {
  auto decoded = nn::deserialize_model(blob);
  auto& meta = decoded.metadata;
  for (const char* key : {"variant", "preprocess_hash", "vocab"}) {
    if (!meta.count(key)) fail(ErrorKind::kFormat, std::string("model metadata lacks ") + key);
  }
  auto tokens = split(meta["vocab"], '\n');
  if (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
  auto vocab = preprocess::Vocabulary::from_tokens(std::move(tokens));
  if (vocab.hash() != decoded.vocab_hash) fail(ErrorKind::kFormat, "vocabulary hash mismatch");
  const auto hash = std::stoull(meta["preprocess_hash"], nullptr, 16);
  HierarchicalModel m(parse_variant(meta["variant"]), decoded.spec, std::move(vocab), hash);
  m.store_ = std::move(decoded.store);
  for (auto& net : m.nets_) net.bind(m.store_);
  if (m.store_.param(m.store_.require("embedding")).rows() != m.vocab_.size()) {
    fail(ErrorKind::kFormat, "embedding rows do not match the vocabulary");
  }
  if (extra) {
    for (const char* key : {"variant", "preprocess_hash", "vocab"}) meta.erase(key);
    *extra = std::move(meta);
  }
  return m;
}

const Net<float>& HierarchicalModel::sub_net(Major m) const {
  if (m == Major::kReminder) return nets_[1];
  if (m == Major::kOffer) return nets_[2];
  fail(ErrorKind::kInvalidArgument, "no second-level net for " + std::string(corpus::major_name(m)));
}

Net<float>& HierarchicalModel::sub_net(Major m) {
  return const_cast<Net<float>&>(static_cast<const HierarchicalModel*>(this)->sub_net(m));
}

Prediction HierarchicalModel::predict(const preprocess::Encoded& input) const {
  Prediction out;
  Net<float>::Trace tr;
  auto major = nets_[0].forward(store_, input.ids, input.length, false, nullptr, tr);
  out.major = widen(major);
  out.route.emplace_back(kMajorNet);
  const auto m = static_cast<Major>(argmax(major));
  std::optional<int> sub;
  if (corpus::has_subclasses(m)) {
    const auto& net = sub_net(m);
    auto p = net.forward(store_, input.ids, input.length, false, nullptr, tr);
    out.sub = widen(p);
    out.route.push_back(net.name());
    sub = static_cast<int>(argmax(p));
  }
  out.leaf = TaxonomyLabel::make(m, sub);
  return out;
}

Prediction predict(const HierarchicalModel& model, const preprocess::Preprocessor& pre, std::string_view text) {
  if (pre.config_hash() != model.preprocess_hash()) {
    fail(ErrorKind::kMismatch, "preprocessing configuration differs from the one the model was trained with");
  }
  return model.predict(pre.encode(text, model.vocab()));
}

std::vector<EpochLog> train_hierarchical(HierarchicalModel& model, const std::vector<TrainingExample>& data,
                                         const TrainingConfig& config, std::ostream* jsonl_log) {
  config.validate();
  for (int slot = 1; slot <= 2; ++slot) {
    const bool any = std::any_of(data.begin(), data.end(),
                                 [&](const TrainingExample& ex) { return target_for(ex.label, slot).has_value(); });
    if (!any) fail(ErrorKind::kData, "empty training set: " + net_at(model, slot).name());
  }
  Rng rng(config.seed);
  const auto dev_flag = carve_dev(data, config.dev_fraction, rng);
  std::vector<Sample> train, dev;
  for (std::size_t i = 0; i < data.size(); ++i) (dev_flag[i] ? dev : train).push_back({&data[i].input, data[i].label});
  for (int slot = 0; slot <= 2; ++slot) {
    const bool any = std::any_of(dev.begin(), dev.end(), [&](const Sample& s) { return target_for(s.label, slot).has_value(); });
    if (!any) fail(ErrorKind::kData, "empty dev set: " + net_at(model, slot).name());
  }

  std::vector<EpochLog> log;
  train_phase(model, {0}, train, dev, config, rng, log, jsonl_log);
  train_phase(model, {0, 1, 2}, std::move(train), dev, config, rng, log, jsonl_log);
  return log;
}

HierarchicalModel train_from_corpus(const corpus::Corpus& train, const preprocess::Preprocessor& pre, Variant variant,
                                    const nn::LayerSpec& spec, const TrainingConfig& config, std::ostream* jsonl_log) {
  std::vector<preprocess::TokenSequence> seqs;
  seqs.reserve(train.size());
  for (const auto& sms : train) seqs.push_back(pre.tokens(sms.text));
  auto vocab = preprocess::Vocabulary::build(seqs, pre.config().min_frequency, pre.config().max_size);
  std::vector<TrainingExample> data;
  data.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    data.push_back({preprocess::encode(seqs[i], vocab, pre.config().max_len), train[i].label});
  }
  auto model = HierarchicalModel::build(variant, spec, std::move(vocab), pre.config_hash(), config.seed);
  train_hierarchical(model, data, config, jsonl_log);
  return model;
}

EvalReport evaluate(const corpus::Corpus& test, const Classifier& classify) {
  EvalReport r;
  std::array<std::size_t, corpus::kLeafCount> gold_count{}, hit_count{};
  std::size_t major_hits = 0;
  for (const auto& sms : test) {
    const auto pred = classify(sms);
    const int g = sms.label.leaf(), p = pred.leaf();
    ++r.confusion[g][p];
    ++gold_count[g];
    if (g == p) ++hit_count[g];
    if (pred.major() == sms.label.major()) ++major_hits;
  }
  r.total = test.size();
  std::size_t hits = 0;
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
    hits += hit_count[leaf];
    if (gold_count[leaf] > 0) {
      r.per_leaf[TaxonomyLabel::from_leaf(leaf).name()] =
          static_cast<double>(hit_count[leaf]) / static_cast<double>(gold_count[leaf]);
    }
  }
  if (r.total > 0) {
    r.overall = static_cast<double>(hits) / static_cast<double>(r.total);
    r.major_accuracy = static_cast<double>(major_hits) / static_cast<double>(r.total);
  }
  return r;
}

EvalReport evaluate(const HierarchicalModel& model, const preprocess::Preprocessor& pre, const corpus::Corpus& test) {
  return evaluate(test, [&](const corpus::LabeledSms& sms) { return predict(model, pre, sms.text).leaf; });
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["overall"] = overall;
  j["major_accuracy"] = major_accuracy;
  j["total"] = total;
  auto leaves = nlohmann::ordered_json::object();
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
    auto name = TaxonomyLabel::from_leaf(leaf).name();
    if (auto it = per_leaf.find(name); it != per_leaf.end()) leaves[name] = it->second;
  }
  j["per_leaf"] = leaves;
  auto labels = nlohmann::ordered_json::array();
  for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) labels.push_back(TaxonomyLabel::from_leaf(leaf).name());
  j["labels"] = labels;
  j["confusion"] = confusion;
  return j;
}

std::vector<ComparisonRow> compare_architectures(const corpus::Corpus& train, const corpus::Corpus& test,
                                                 const preprocess::Preprocessor& pre,
                                                 const std::vector<Variant>& variants, const nn::LayerSpec& spec,
                                                 const TrainingConfig& config) {
  std::vector<ComparisonRow> rows;
  for (auto v : variants) {
    auto model = train_from_corpus(train, pre, v, spec, config);
    rows.push_back({v, evaluate(model, pre, test), model.parameter_count()});
  }
  return rows;
}

nlohmann::ordered_json comparison_to_json(const std::vector<ComparisonRow>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["variant"] = variant_name(row.variant);
    j["accuracy"] = row.report.overall;
    j["major_accuracy"] = row.report.major_accuracy;
    j["parameters"] = row.parameters;
    out.push_back(j);
  }
  return out;
}

}  // namespace smsie::classifier

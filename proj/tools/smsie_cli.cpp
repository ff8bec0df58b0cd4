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

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "smsie/smsie.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitGate = 3;

constexpr double kClassifyBudgetMs = 39.0;
constexpr double kTotalBudgetMs = 116.0;
constexpr double kBatchBudgetSeconds = 19.0 * 60.0;

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct CString {
  char* p = nullptr;
  ~CString() { smsie_free(p); }
  std::string str() const { return p ? p : ""; }
};

void check(smsie_status s) {
  if (s == SMSIE_OK) return;
  const int code = s == SMSIE_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
  throw Failure(code, std::string(smsie_status_name(s)) + ": " + smsie_last_error());
}

struct PipelineHandle {
  smsie_pipeline* p = nullptr;
  ~PipelineHandle() { smsie_pipeline_close(p); }
};

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string model;
  std::string variant;
  std::string data_dir;
};

struct Settings {
  json config = json::object();
  fs::path base_dir = ".";
};

Settings load_settings(const Common& c) {
  Settings s;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw Failure(kExitData, "cannot open config " + c.config_path);
    try {
      s.config = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Failure(kExitData, c.config_path + ": " + e.what());
    }
    s.base_dir = fs::path(c.config_path).parent_path();
    if (s.base_dir.empty()) s.base_dir = ".";
  }
  if (c.seed) s.config["seed"] = *c.seed;
  if (!c.variant.empty()) s.config["variant"] = c.variant;
  if (!c.model.empty()) s.config["paths"]["model"] = fs::absolute(c.model).string();
  if (!c.data_dir.empty()) s.config["data_dir"] = fs::absolute(c.data_dir).string();
  return s;
}

std::string resolved(const Settings& s, const json& value) {
  fs::path p(value.get<std::string>());
  return (p.is_absolute() ? p : s.base_dir / p).string();
}

std::string model_path(const Settings& s) {
  if (!s.config.contains("paths") || !s.config["paths"].contains("model")) {
    throw Failure(kExitUsage, "no model given (use --model or paths.model in the config)");
  }
  return resolved(s, s.config["paths"]["model"]);
}

void open_pipeline(const Settings& s, PipelineHandle& h) {
  std::string data_dir;
  if (s.config.contains("data_dir")) data_dir = resolved(s, s.config["data_dir"]);
  const int year = s.config.value("reference_year", 2019);
  check(smsie_pipeline_open(model_path(s).c_str(), data_dir.empty() ? nullptr : data_dir.c_str(), year, &h.p));
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--model", c.model, "Model file");
  cmd->add_option("--variant", c.variant, "Hybrid, all-cnn, all-lstm or all-cnn-lstm");
  cmd->add_option("--data-dir", c.data_dir, "Resource directory");
}

// Each stdin line is a {"id","text"} object; an empty line is an empty message.
template <typename Fn>
void for_each_input(const std::string& text, bool has_text, Fn&& fn) {
  if (has_text) {
    fn("", text);
    return;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(std::cin, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      fn("", "");
      continue;
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Failure(kExitData, "stdin line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("text") || !rec["text"].is_string()) {
      throw Failure(kExitData, "stdin line " + std::to_string(lineno) + ": expected an object with \"text\"");
    }
    fn(rec.value("id", std::string()), rec["text"].get<std::string>());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"SMS classification and information extraction"};
  app.require_subcommand(1);
  Common common;

  auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic labelled corpus");
  add_common(gen, common);
  std::string out_path, slots_path;
  int per_leaf = 0;
  bool reference = false;
  gen->add_option("--out", out_path, "Corpus JSONL output")->required();
  gen->add_option("--slots", slots_path, "Slot sidecar JSONL output");
  auto* per_leaf_opt = gen->add_option("--per-leaf", per_leaf, "Messages per leaf")->check(CLI::PositiveNumber);
  gen->add_flag("--reference", reference, "Use the reference class distribution")->excludes(per_leaf_opt);

  auto* train = app.add_subcommand("train", "Train a model");
  add_common(train, common);
  std::string corpus_path, log_path;
  std::optional<std::size_t> epochs;
  train->add_option("--corpus", corpus_path, "Training corpus JSONL");
  train->add_option("--log", log_path, "Epoch log JSONL output");
  train->add_option("--epochs", epochs, "Maximum epochs per phase");

  auto* eval = app.add_subcommand("eval", "Evaluate a model on a labelled corpus");
  add_common(eval, common);
  eval->add_option("--corpus", corpus_path, "Test corpus JSONL")->required();

  std::string text;
  auto* classify = app.add_subcommand("classify", "Classify messages (--text or JSONL on stdin)");
  add_common(classify, common);
  classify->add_option("--text", text, "Single message");

  auto* extract = app.add_subcommand("extract", "Extract information cards (--text or JSONL on stdin)");
  add_common(extract, common);
  extract->add_option("--text", text, "Single message");

  auto* bench = app.add_subcommand("bench", "Time classification and extraction");
  add_common(bench, common);
  std::size_t warmup = 100, repetitions = 1, batch = 10000;
  bool gate = false;
  bench->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
  bench->add_option("--warmup", warmup, "Untimed warm-up messages");
  bench->add_option("--repetitions", repetitions, "Timed passes over the corpus")->check(CLI::PositiveNumber);
  bench->add_option("--batch", batch, "End-to-end batch size (0 skips it)");
  bench->add_flag("--gate", gate, "Exit with status 3 when a latency budget is exceeded");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  const auto settings = load_settings(common);

  if (gen->parsed()) {
    if (!reference && per_leaf == 0) throw Failure(kExitUsage, "give --per-leaf N or --reference");
    std::array<std::int32_t, 18> counts{};
    if (reference) {
      smsie_reference_leaf_counts(counts.data());
    } else {
      counts.fill(per_leaf);
    }
    std::string data_dir;
    if (settings.config.contains("data_dir")) data_dir = resolved(settings, settings.config["data_dir"]);
    CString stats;
    check(smsie_generate_corpus(data_dir.empty() ? nullptr : data_dir.c_str(), counts.data(),
                                settings.config.value("seed", std::uint64_t{42}), out_path.c_str(),
                                slots_path.empty() ? nullptr : slots_path.c_str(), &stats.p));
    std::cout << stats.str();
  } else if (train->parsed()) {
    auto config = settings.config;
    if (epochs) config["training"]["epochs"] = *epochs;
    const auto model = model_path(settings);
    std::string corpus = corpus_path;
    if (corpus.empty() && config.contains("paths") && config["paths"].contains("corpus")) {
      corpus = resolved(settings, config["paths"]["corpus"]);
    }
    if (corpus.empty()) throw Failure(kExitUsage, "no corpus given (use --corpus or paths.corpus)");
    CString summary;
    check(smsie_train(config.dump().c_str(), settings.base_dir.c_str(), corpus.c_str(), model.c_str(),
                      log_path.empty() ? nullptr : log_path.c_str(), &summary.p));
    const auto s = json::parse(summary.str());
    for (const auto& [net, acc] : s["final_dev_acc"].items()) {
      std::cout << net << " dev accuracy " << acc.get<double>() << "\n";
    }
    std::cout << summary.str() << "\n";
  } else if (eval->parsed()) {
    PipelineHandle h;
    open_pipeline(settings, h);
    CString report;
    check(smsie_evaluate(h.p, corpus_path.c_str(), &report.p));
    std::cout << report.str() << "\n";
  } else if (classify->parsed() || extract->parsed()) {
    PipelineHandle h;
    open_pipeline(settings, h);
    const bool cards = extract->parsed();
    const bool has_text = cards ? extract->count("--text") > 0 : classify->count("--text") > 0;
    for_each_input(text, has_text, [&](const std::string& id, const std::string& msg) {
      CString out;
      check(cards ? smsie_extract(h.p, id.c_str(), msg.c_str(), &out.p)
                  : smsie_classify(h.p, id.c_str(), msg.c_str(), &out.p));
      std::cout << out.str() << "\n";
    });
  } else if (bench->parsed()) {
    PipelineHandle h;
    open_pipeline(settings, h);
    CString report;
    check(smsie_bench(h.p, corpus_path.c_str(), warmup, repetitions, batch, &report.p));
    std::cout << report.str() << "\n";
    if (gate) {
      const auto r = json::parse(report.str());
      bool ok = r["classify"]["mean_ms"].get<double>() <= kClassifyBudgetMs &&
                r["total"]["mean_ms"].get<double>() <= kTotalBudgetMs;
      if (batch > 0) ok = ok && r["batch_seconds"].get<double>() <= kBatchBudgetSeconds;
      if (!ok) {
        std::cerr << "latency budget exceeded\n";
        return kExitGate;
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.what() << "\n";
    return f.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

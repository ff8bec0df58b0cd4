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

#include "smsie/smsie.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <new>
#include <sstream>
#include <string>

#include "common/error.hpp"
#include "common/text.hpp"
#include "pipeline/pipeline.hpp"

struct smsie_pipeline {
  smsie::pipeline::Pipeline impl;
};

namespace {

using namespace smsie;

thread_local std::string g_last_error;

smsie_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SMSIE_ERR_INVALID_ARGUMENT;
    case ErrorKind::kData: return SMSIE_ERR_DATA;
    case ErrorKind::kFormat: return SMSIE_ERR_FORMAT;
    case ErrorKind::kIo: return SMSIE_ERR_IO;
    case ErrorKind::kMismatch: return SMSIE_ERR_MISMATCH;
  }
  return SMSIE_ERR_INTERNAL;
}

template <typename F>
smsie_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SMSIE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  }
  return SMSIE_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::kInvalidArgument, what);
}

char* copy_out(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

void write_text(const char* path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, std::string("cannot write ") + path);
  out << content;
  if (!out) fail(ErrorKind::kIo, std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* smsie_version(void) { return "1.0.0"; }

const char* smsie_status_name(smsie_status status) {
  switch (status) {
    case SMSIE_OK: return "ok";
    case SMSIE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SMSIE_ERR_DATA: return "data error";
    case SMSIE_ERR_FORMAT: return "format error";
    case SMSIE_ERR_IO: return "i/o error";
    case SMSIE_ERR_MISMATCH: return "resource mismatch";
    case SMSIE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* smsie_last_error(void) { return g_last_error.c_str(); }

void smsie_free(char* s) { std::free(s); }

void smsie_reference_leaf_counts(int32_t out[18]) {
  for (const auto& [leaf, n] : corpus::reference_leaf_counts()) out[leaf] = n;
}

smsie_status smsie_generate_corpus(const char* data_dir, const int32_t per_leaf[18], uint64_t seed,
                                   const char* corpus_path, const char* slots_path, char** stats_out) {
  return guarded([&] {
    require(per_leaf && corpus_path, "per_leaf and corpus_path are required");
    std::map<int, int> counts;
    for (int leaf = 0; leaf < corpus::kLeafCount; ++leaf) {
      require(per_leaf[leaf] >= 0, "per-leaf counts must be non-negative");
      counts[leaf] = per_leaf[leaf];
    }
    const auto items = pipeline::generate_corpus(data_dir ? data_dir : SMSIE_DATA_DIR, counts, seed);
    const auto corpus = corpus::to_corpus(items);
    std::ostringstream text;
    corpus::write_corpus(text, corpus);
    write_text(corpus_path, text.str());
    if (slots_path) {
      std::ostringstream slots;
      corpus::write_slots(slots, items);
      write_text(slots_path, slots.str());
    }
    if (stats_out) *stats_out = copy_out(corpus::format_stats(corpus::corpus_stats(corpus)));
  });
}

smsie_status smsie_train(const char* config_json, const char* base_dir, const char* corpus_path,
                         const char* model_path, const char* log_path, char** summary_out) {
  return guarded([&] {
    require(model_path, "model_path is required");
    nlohmann::json j = nlohmann::json::object();
    if (config_json && *config_json) {
      try {
        j = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::kData, std::string("config: ") + e.what());
      }
    }
    auto config = pipeline::PipelineConfig::from_json(j, base_dir ? base_dir : ".");
    if (corpus_path) config.corpus = corpus_path;
    require(!config.corpus.empty(), "no corpus path given");
    const auto train = corpus::load_corpus(config.corpus);
    std::ostringstream log;
    const auto result = pipeline::train_model(config, train, &log);
    write_text(model_path, std::string(result.blob.begin(), result.blob.end()));
    if (log_path) write_text(log_path, log.str());
    if (summary_out) {
      nlohmann::ordered_json s;
      s["variant"] = classifier::variant_name(config.variant);
      s["parameters"] = result.parameters;
      s["model_size_bytes"] = result.blob.size();
      nlohmann::ordered_json dev = nlohmann::ordered_json::object();
      for (const auto& e : result.log) dev[e.net] = e.dev_accuracy;
      s["final_dev_acc"] = std::move(dev);
      *summary_out = copy_out(s.dump());
    }
  });
}

smsie_status smsie_pipeline_open(const char* model_path, const char* data_dir, int32_t reference_year,
                                 smsie_pipeline** out) {
  return guarded([&] {
    require(model_path && out, "model_path and out are required");
    *out = nullptr;
    const auto bytes = read_file(model_path);
    auto paths = pipeline::ResourcePaths::in(data_dir ? data_dir : SMSIE_DATA_DIR);
    auto p = pipeline::Pipeline::open(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), paths,
                                      reference_year);
    *out = new smsie_pipeline{std::move(p)};
  });
}

void smsie_pipeline_close(smsie_pipeline* pipeline) { delete pipeline; }

smsie_status smsie_classify(const smsie_pipeline* pipeline, const char* id, const char* text, char** json_out) {
  return guarded([&] {
    require(pipeline && text && json_out, "pipeline, text and json_out are required");
    const auto pred = pipeline->impl.classify(text);
    *json_out = copy_out(pipeline::prediction_to_json(pred, id ? id : "").dump());
  });
}

smsie_status smsie_extract(const smsie_pipeline* pipeline, const char* id, const char* text, char** json_out) {
  return guarded([&] {
    require(pipeline && text && json_out, "pipeline, text and json_out are required");
    *json_out = copy_out(render::card_to_json(pipeline->impl.extract(id ? id : "", text)).dump());
  });
}

smsie_status smsie_extract_entities(const smsie_pipeline* pipeline, const char* leaf, const char* text,
                                    char** json_out) {
  return guarded([&] {
    require(pipeline && leaf && text && json_out, "pipeline, leaf, text and json_out are required");
    const auto label = corpus::TaxonomyLabel::parse(leaf);
    *json_out = copy_out(pipeline->impl.extract_entities(text, label).to_json().dump());
  });
}

smsie_status smsie_evaluate(const smsie_pipeline* pipeline, const char* corpus_path, char** json_out) {
  return guarded([&] {
    require(pipeline && corpus_path && json_out, "pipeline, corpus_path and json_out are required");
    const auto test = corpus::load_corpus(corpus_path);
    const auto& p = pipeline->impl;
    *json_out = copy_out(classifier::evaluate(p.model(), p.preprocessor(), test).to_json().dump());
  });
}

smsie_status smsie_bench(const smsie_pipeline* pipeline, const char* corpus_path, size_t warmup,
                         size_t repetitions, size_t batch_size, char** json_out) {
  return guarded([&] {
    require(pipeline && corpus_path && json_out, "pipeline, corpus_path and json_out are required");
    require(repetitions > 0, "repetitions must be positive");
    const auto corpus = corpus::load_corpus(corpus_path);
    const auto report = pipeline::bench(pipeline->impl, corpus, {warmup, repetitions, batch_size});
    *json_out = copy_out(report.to_json().dump());
  });
}

}  // extern "C"

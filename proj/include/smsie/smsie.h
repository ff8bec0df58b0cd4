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

#ifndef SMSIE_SMSIE_H_
#define SMSIE_SMSIE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SMSIE_BUILDING_LIBRARY)
#define SMSIE_API __attribute__((visibility("default")))
#else
#define SMSIE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smsie_status {
  SMSIE_OK = 0,
  SMSIE_ERR_INVALID_ARGUMENT = 1,
  SMSIE_ERR_DATA = 2,
  SMSIE_ERR_FORMAT = 3,
  SMSIE_ERR_IO = 4,
  SMSIE_ERR_MISMATCH = 5,
  SMSIE_ERR_INTERNAL = 6
} smsie_status;

typedef struct smsie_pipeline smsie_pipeline;

// Strings returned through `char** out` are owned by the caller and must be
// released with smsie_free. Text arguments are NUL-terminated UTF-8.

SMSIE_API const char* smsie_version(void);
SMSIE_API const char* smsie_status_name(smsie_status status);
// Message of the last failure on the calling thread; empty after success.
SMSIE_API const char* smsie_last_error(void);
SMSIE_API void smsie_free(char* s);

// Per-leaf message counts of the reference class distribution, in leaf
// order (Info, Transaction, Otp, Reminder x8, Offer x7).
SMSIE_API void smsie_reference_leaf_counts(int32_t out[18]);

// Writes a synthetic corpus (JSONL) and its slot sidecar with per_leaf[i]
// messages for leaf i. *stats_out receives the class-count tables.
SMSIE_API smsie_status smsie_generate_corpus(const char* data_dir, const int32_t per_leaf[18], uint64_t seed,
                                             const char* corpus_path, const char* slots_path, char** stats_out);

// Trains with a JSON config (config_json may be NULL or "{}" for defaults).
// Relative paths in the config resolve against base_dir. Writes the model
// blob to model_path and the epoch log (JSONL) to log_path when non-NULL.
// *summary_out receives {"parameters", "model_size_bytes", "final_dev_acc"}.
SMSIE_API smsie_status smsie_train(const char* config_json, const char* base_dir, const char* corpus_path,
                                   const char* model_path, const char* log_path, char** summary_out);

// Opens a model against the resource files in data_dir (NULL for the
// built-in default). Fails with SMSIE_ERR_MISMATCH when a resource file
// differs from the one the model was trained with.
SMSIE_API smsie_status smsie_pipeline_open(const char* model_path, const char* data_dir, int32_t reference_year,
                                           smsie_pipeline** out);
SMSIE_API void smsie_pipeline_close(smsie_pipeline* pipeline);

// Prediction JSON: {"id"?, "leaf", "major", "route", "major_probs", "sub_probs"}.
SMSIE_API smsie_status smsie_classify(const smsie_pipeline* pipeline, const char* id, const char* text,
                                      char** json_out);
// Card JSON for the message under its predicted category.
SMSIE_API smsie_status smsie_extract(const smsie_pipeline* pipeline, const char* id, const char* text,
                                     char** json_out);
// Entity set JSON under a given leaf label such as "Reminder_Bill".
SMSIE_API smsie_status smsie_extract_entities(const smsie_pipeline* pipeline, const char* leaf, const char* text,
                                              char** json_out);

// Accuracy report over a labelled corpus file.
SMSIE_API smsie_status smsie_evaluate(const smsie_pipeline* pipeline, const char* corpus_path, char** json_out);

// Single-threaded timing report over a corpus file.
SMSIE_API smsie_status smsie_bench(const smsie_pipeline* pipeline, const char* corpus_path, size_t warmup,
                                   size_t repetitions, size_t batch_size, char** json_out);

#ifdef __cplusplus
}
#endif

#endif  // SMSIE_SMSIE_H_

/*
 Copyright 2026 The regimes Authors.
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef REGIMES_H
#define REGIMES_H

#include <stddef.h>
#include <stdint.h>

#if defined(RG_BUILDING_LIBRARY)
#define RG_API __attribute__((visibility("default")))
#else
#define RG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rg_status {
  RG_OK = 0,
  RG_E_INVALID_ARGUMENT = 1,
  RG_E_EMPTY_SERIES = 2,
  RG_E_ALREADY_STANDARDIZED = 3,
  RG_E_CHANNEL_MISMATCH = 4,
  RG_E_LENGTH_MISMATCH = 5,
  RG_E_DEGENERATE_INPUT = 6,
  RG_E_EMPTY_STATE_COLLAPSE = 7,
  RG_E_NUMERICAL_UNDERFLOW = 8,
  RG_E_PARSE = 9,
  RG_E_NON_CONTIGUOUS_INDEX = 10,
  RG_E_INCONSISTENT_CHANNELS = 11,
  RG_E_NON_FINITE_VALUE = 12,
  RG_E_VERSION_MISMATCH = 13,
  RG_E_IO = 14,
  RG_E_INTERNAL = 15
} rg_status;

typedef enum rg_model_kind { RG_MODEL_HMM = 0, RG_MODEL_STICKY = 1 } rg_model_kind;

enum {
  RG_MODALITY_TEXT = 1,
  RG_MODALITY_AUDIO = 2,
  RG_MODALITY_VIDEO = 4
};

typedef struct rg_series rg_series;
typedef struct rg_labels rg_labels;
typedef struct rg_model rg_model;
typedef struct rg_report rg_report;
typedef struct rg_manifest rg_manifest;

typedef struct rg_em_config {
  int num_states;
  int max_iters;
  double tol;
  int n_restarts;
  uint64_t seed;
  int tied_covariance;
} rg_em_config;

typedef struct rg_sticky_config {
  int k_max;
  int burn_in;
  int n_samples;
  int thin;
  uint64_t seed;
  int sample_hypers;
} rg_sticky_config;

typedef struct rg_synth_config {
  int num_regimes;
  size_t length;
  double self_transition;
  double min_separation;
  double covariance_scale;
  unsigned modalities;
  double decoupling;
  uint64_t seed;
} rg_synth_config;

/* Errors. Messages are per thread and valid until the next failing call. */
RG_API const char* rg_last_error(void);
RG_API const char* rg_status_string(rg_status status);
RG_API int rg_status_is_numerical(rg_status status);

/* Strings returned through char** out-parameters. */
RG_API void rg_string_free(char* s);

RG_API uint64_t rg_derive_seed(uint64_t seed, uint64_t stream);

/* Series. format may be NULL ("csv" or "json" otherwise). */
RG_API rg_status rg_series_read(const char* path, const char* format, rg_series** out);
RG_API rg_status rg_series_write(const rg_series* s, const char* path, const char* format);
RG_API rg_status rg_series_standardize(const rg_series* s, rg_series** out);
RG_API rg_status rg_series_standardize_corpus(const rg_series* const* in, size_t n,
                                              rg_series** out);
RG_API size_t rg_series_length(const rg_series* s);
RG_API unsigned rg_series_modalities(const rg_series* s);
RG_API const char* rg_series_id(const rg_series* s);
RG_API rg_status rg_series_set_id(rg_series* s, const char* id);
RG_API void rg_series_free(rg_series* s);

/* Label sequences. */
RG_API rg_status rg_labels_read(const char* path, rg_labels** out);
RG_API rg_status rg_labels_write(const rg_labels* l, const char* path);
RG_API rg_status rg_labels_create(const int* values, size_t n, rg_labels** out);
RG_API size_t rg_labels_length(const rg_labels* l);
RG_API int rg_labels_get(const rg_labels* l, size_t t);
RG_API void rg_labels_free(rg_labels* l);

/* Model fitting. */
RG_API void rg_em_config_defaults(rg_em_config* cfg);
RG_API void rg_sticky_config_defaults(rg_sticky_config* cfg);
RG_API rg_status rg_hmm_fit(const rg_series* const* series, size_t n, const rg_em_config* cfg,
                            rg_model** out);
RG_API rg_status rg_sticky_fit(const rg_series* s, const rg_sticky_config* cfg, rg_model** out);

/* Fitted models. */
RG_API rg_model_kind rg_model_get_kind(const rg_model* m);
RG_API int rg_model_num_states(const rg_model* m);
RG_API rg_status rg_model_decode(const rg_model* m, const rg_series* s, rg_labels** out,
                                 double* path_log_prob);
RG_API rg_status rg_model_loglik(const rg_model* m, const rg_series* s, double* out);
/* Sticky: posterior effective K. HMM: distinct states on the Viterbi path of s. */
RG_API rg_status rg_model_effective_k(const rg_model* m, const rg_series* s, int* out);
RG_API rg_status rg_model_regime_va(const rg_model* m, int state, double* valence,
                                    double* arousal);
RG_API rg_status rg_model_write(const rg_model* m, const char* path, int include_samples);
RG_API rg_status rg_model_read(const char* path, rg_model** out);
RG_API void rg_model_free(rg_model* m);

/* Metrics. ref may be NULL. */
RG_API rg_status rg_evaluate(const rg_labels* pred, const rg_labels* ref, const rg_series* s,
                             rg_report** out);
RG_API rg_status rg_report_aggregate(const rg_report* const* reports, size_t n, rg_report** out);
RG_API rg_status rg_report_to_json(const rg_report* r, char** out);
RG_API rg_status rg_report_from_json(const char* text, rg_report** out);
RG_API rg_status rg_report_get(const rg_report* r, const char* metric, double* value,
                               int* present);
RG_API void rg_report_free(rg_report* r);
RG_API rg_status rg_compare_reports(const rg_report* const* a, const rg_report* const* b,
                                    size_t n, char** csv_out);

/* Pipeline. query < 0 selects the midpoint T / 2. */
RG_API rg_status rg_sweep_k(const rg_series* const* series, size_t n, int k_min, int k_max,
                            const rg_em_config* base, char** csv_out);
RG_API rg_status rg_summarize(const rg_labels* labels, const rg_model* m, long query,
                              char** text_out);

/* Synthetic data. */
RG_API void rg_synth_config_defaults(rg_synth_config* cfg);
RG_API rg_status rg_synth_generate(const rg_synth_config* cfg, const char* id, rg_series** series,
                                   rg_labels** truth);

/* Corpus manifests. labels may be NULL. */
RG_API rg_status rg_manifest_read(const char* path, rg_manifest** out);
RG_API rg_manifest* rg_manifest_create(int corpus_scope);
RG_API rg_status rg_manifest_add(rg_manifest* m, const char* id, const char* series,
                                 const char* labels);
RG_API rg_status rg_manifest_write(const rg_manifest* m, const char* path);
RG_API size_t rg_manifest_size(const rg_manifest* m);
RG_API int rg_manifest_corpus_scope(const rg_manifest* m);
RG_API const char* rg_manifest_id(const rg_manifest* m, size_t i);
RG_API const char* rg_manifest_series(const rg_manifest* m, size_t i);
RG_API const char* rg_manifest_labels(const rg_manifest* m, size_t i);
RG_API void rg_manifest_free(rg_manifest* m);

#ifdef __cplusplus
}
#endif

#endif

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

#include "regimes.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "regimes/alignment.hpp"
#include "regimes/core.hpp"
#include "regimes/error.hpp"
#include "regimes/gaussian_hmm.hpp"
#include "regimes/io.hpp"
#include "regimes/metrics.hpp"
#include "regimes/pipeline.hpp"
#include "regimes/random.hpp"
#include "regimes/sticky_hdphmm.hpp"
#include "regimes/synthetic.hpp"

struct rg_series {
  regimes::ConversationSeries value;
};

struct rg_labels {
  regimes::LabelSequence value;
};

struct rg_model {
  regimes::io::FittedModel value;
};

struct rg_report {
  regimes::MetricReport value;
};

struct rg_manifest {
  regimes::io::CorpusManifest value;
  std::vector<std::string> ids, series, labels;
  std::vector<bool> has_labels;
};

namespace {

thread_local std::string g_last_error;

rg_status from_code(regimes::ErrorCode c) {
  return static_cast<rg_status>(static_cast<int>(c) + 1);
}

rg_status fail(rg_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

template <class F>
rg_status guard(F&& f) {
  try {
    f();
    return RG_OK;
  } catch (const regimes::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RG_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RG_E_INTERNAL, e.what());
  } catch (...) {
    return fail(RG_E_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw regimes::Error(regimes::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::optional<regimes::io::SeriesFormat> format_arg(const char* format) {
  if (!format) return std::nullopt;
  auto f = regimes::io::parse_format(format);
  if (!f) throw regimes::Error(regimes::ErrorCode::InvalidArgument, std::string("unknown format '") + format + "'");
  return f;
}

unsigned modality_bits(regimes::ChannelSet cs) { return cs.bits(); }

regimes::ChannelSet channels_from_bits(unsigned bits) {
  regimes::ChannelSet cs;
  for (auto m : regimes::kAllModalities)
    if (bits & (1u << unsigned(m))) cs.insert(m);
  return cs;
}

std::vector<regimes::ConversationSeries> collect(const rg_series* const* in, size_t n) {
  require(in != nullptr && n > 0, "series list is empty");
  std::vector<regimes::ConversationSeries> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    require(in[i] != nullptr, "null series handle");
    out.push_back(in[i]->value);
  }
  return out;
}

regimes::HmmModel as_hmm(const rg_model* m) {
  if (const auto* h = std::get_if<regimes::HmmModel>(&m->value)) return *h;
  return std::get<regimes::StickyPosterior>(m->value).mean_model();
}

}  // namespace

extern "C" {

const char* rg_last_error(void) { return g_last_error.c_str(); }

const char* rg_status_string(rg_status status) {
  if (status == RG_OK) return "OK";
  if (status == RG_E_INTERNAL) return "Internal";
  if (status < RG_OK || status > RG_E_INTERNAL) return "Unknown";
  return regimes::to_string(static_cast<regimes::ErrorCode>(int(status) - 1));
}

int rg_status_is_numerical(rg_status status) {
  if (status <= RG_OK || status >= RG_E_INTERNAL) return 0;
  return regimes::is_numerical(static_cast<regimes::ErrorCode>(int(status) - 1)) ? 1 : 0;
}

void rg_string_free(char* s) { std::free(s); }

uint64_t rg_derive_seed(uint64_t seed, uint64_t stream) {
  return regimes::Rng(seed).derive(stream).next_u64();
}

rg_status rg_series_read(const char* path, const char* format, rg_series** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new rg_series{regimes::io::read_series(path, format_arg(format))};
  });
}

rg_status rg_series_write(const rg_series* s, const char* path, const char* format) {
  return guard([&] {
    require(s && path, "null argument");
    regimes::io::write_series(s->value, path, format_arg(format));
  });
}

rg_status rg_series_standardize(const rg_series* s, rg_series** out) {
  return guard([&] {
    require(s && out, "null argument");
    *out = new rg_series{regimes::standardize(s->value)};
  });
}

rg_status rg_series_standardize_corpus(const rg_series* const* in, size_t n, rg_series** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    auto z = regimes::standardize_corpus(collect(in, n));
    for (size_t i = 0; i < n; ++i) out[i] = nullptr;
    try {
      for (size_t i = 0; i < n; ++i) out[i] = new rg_series{std::move(z[i])};
    } catch (...) {
      for (size_t i = 0; i < n; ++i) delete out[i], out[i] = nullptr;
      throw;
    }
  });
}

size_t rg_series_length(const rg_series* s) { return s ? s->value.size() : 0; }

unsigned rg_series_modalities(const rg_series* s) { return s ? modality_bits(s->value.channels()) : 0; }

const char* rg_series_id(const rg_series* s) { return s ? s->value.id().c_str() : ""; }

rg_status rg_series_set_id(rg_series* s, const char* id) {
  return guard([&] {
    require(s && id, "null argument");
    s->value.set_id(id);
  });
}

void rg_series_free(rg_series* s) { delete s; }

rg_status rg_labels_read(const char* path, rg_labels** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new rg_labels{regimes::io::read_labels(path)};
  });
}

rg_status rg_labels_write(const rg_labels* l, const char* path) {
  return guard([&] {
    require(l && path, "null argument");
    regimes::io::write_labels(l->value, path);
  });
}

rg_status rg_labels_create(const int* values, size_t n, rg_labels** out) {
  return guard([&] {
    require(out && (values || n == 0), "null argument");
    for (size_t i = 0; i < n; ++i) require(values[i] >= 0, "labels must be non-negative");
    *out = new rg_labels{regimes::LabelSequence(std::vector<int>(values, values + n))};
  });
}

size_t rg_labels_length(const rg_labels* l) { return l ? l->value.size() : 0; }

int rg_labels_get(const rg_labels* l, size_t t) {
  return l && t < l->value.size() ? l->value[t] : -1;
}

void rg_labels_free(rg_labels* l) { delete l; }

void rg_em_config_defaults(rg_em_config* cfg) {
  if (!cfg) return;
  const regimes::EmConfig d;
  *cfg = rg_em_config{d.num_states, d.max_iters, d.tol, d.n_restarts, d.seed, d.tied_covariance ? 1 : 0};
}

void rg_sticky_config_defaults(rg_sticky_config* cfg) {
  if (!cfg) return;
  const regimes::StickyConfig d;
  *cfg = rg_sticky_config{d.k_max, d.burn_in, d.n_samples, d.thin, d.seed, d.sample_hypers ? 1 : 0};
}

namespace {

regimes::EmConfig em_config(const rg_em_config* cfg) {
  regimes::EmConfig c;
  if (!cfg) return c;
  c.num_states = cfg->num_states;
  c.max_iters = cfg->max_iters;
  c.tol = cfg->tol;
  c.n_restarts = cfg->n_restarts;
  c.seed = cfg->seed;
  c.tied_covariance = cfg->tied_covariance != 0;
  return c;
}

}  // namespace

rg_status rg_hmm_fit(const rg_series* const* series, size_t n, const rg_em_config* cfg,
                     rg_model** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    const auto data = collect(series, n);
    auto fit = regimes::fit_em(std::span<const regimes::ConversationSeries>(data), em_config(cfg));
    *out = new rg_model{std::move(fit.model)};
  });
}

rg_status rg_sticky_fit(const rg_series* s, const rg_sticky_config* cfg, rg_model** out) {
  return guard([&] {
    require(s && out, "null argument");
    regimes::StickyConfig c;
    if (cfg) {
      c.k_max = cfg->k_max;
      c.burn_in = cfg->burn_in;
      c.n_samples = cfg->n_samples;
      c.thin = cfg->thin;
      c.seed = cfg->seed;
      c.sample_hypers = cfg->sample_hypers != 0;
    }
    *out = new rg_model{regimes::fit_sticky(s->value, c, regimes::NiwPrior{})};
  });
}

rg_model_kind rg_model_get_kind(const rg_model* m) {
  return m && std::holds_alternative<regimes::StickyPosterior>(m->value) ? RG_MODEL_STICKY
                                                                         : RG_MODEL_HMM;
}

int rg_model_num_states(const rg_model* m) {
  if (!m) return 0;
  if (const auto* h = std::get_if<regimes::HmmModel>(&m->value)) return h->num_states();
  return std::get<regimes::StickyPosterior>(m->value).k_max();
}

rg_status rg_model_decode(const rg_model* m, const rg_series* s, rg_labels** out,
                          double* path_log_prob) {
  return guard([&] {
    require(m && s && out, "null argument");
    regimes::Decoding d;
    if (const auto* h = std::get_if<regimes::HmmModel>(&m->value)) d = regimes::viterbi(*h, s->value);
    else d = regimes::decode(std::get<regimes::StickyPosterior>(m->value), s->value);
    if (path_log_prob) *path_log_prob = d.path_log_prob;
    *out = new rg_labels{std::move(d.labels)};
  });
}

rg_status rg_model_loglik(const rg_model* m, const rg_series* s, double* out) {
  return guard([&] {
    require(m && s && out, "null argument");
    *out = regimes::forward_loglik(as_hmm(m), s->value);
  });
}

rg_status rg_model_effective_k(const rg_model* m, const rg_series* s, int* out) {
  return guard([&] {
    require(m && out, "null argument");
    if (const auto* p = std::get_if<regimes::StickyPosterior>(&m->value)) {
      *out = p->effective_k;
      return;
    }
    require(s != nullptr, "series required for an HMM model");
    *out = int(regimes::viterbi(std::get<regimes::HmmModel>(m->value), s->value).labels.num_labels());
  });
}

rg_status rg_model_regime_va(const rg_model* m, int state, double* valence, double* arousal) {
  return guard([&] {
    require(m && valence && arousal, "null argument");
    const auto h = as_hmm(m);
    require(state >= 0 && state < h.num_states(), "state index out of range");
    regimes::Vec2 sum = regimes::Vec2::Zero();
    const auto& row = h.emissions[std::size_t(state)];
    for (const auto& e : row) sum += e.mean();
    sum /= double(row.size());
    *valence = sum(0);
    *arousal = sum(1);
  });
}

rg_status rg_model_write(const rg_model* m, const char* path, int include_samples) {
  return guard([&] {
    require(m && path, "null argument");
    regimes::io::write_model(m->value, path, include_samples != 0);
  });
}

rg_status rg_model_read(const char* path, rg_model** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new rg_model{regimes::io::read_model(path)};
  });
}

void rg_model_free(rg_model* m) { delete m; }

rg_status rg_evaluate(const rg_labels* pred, const rg_labels* ref, const rg_series* s,
                      rg_report** out) {
  return guard([&] {
    require(pred && s && out, "null argument");
    std::optional<regimes::LabelSequence> r;
    if (ref) r = ref->value;
    *out = new rg_report{regimes::evaluate(pred->value, r, s->value)};
  });
}

rg_status rg_report_aggregate(const rg_report* const* reports, size_t n, rg_report** out) {
  return guard([&] {
    require(reports && n > 0 && out, "null argument");
    std::vector<regimes::MetricReport> rs;
    for (size_t i = 0; i < n; ++i) {
      require(reports[i] != nullptr, "null report handle");
      rs.push_back(reports[i]->value);
    }
    *out = new rg_report{regimes::aggregate(rs)};
  });
}

rg_status rg_report_to_json(const rg_report* r, char** out) {
  return guard([&] {
    require(r && out, "null argument");
    *out = dup_string(regimes::io::report_to_json(r->value));
  });
}

rg_status rg_report_from_json(const char* text, rg_report** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new rg_report{regimes::io::report_from_json(text)};
  });
}

rg_status rg_report_get(const rg_report* r, const char* metric, double* value, int* present) {
  return guard([&] {
    require(r && metric && value, "null argument");
    const auto& v = r->value;
    const std::string name(metric);
    std::optional<double> x;
    bool known = true;
    if (name == "segment_f1") x = v.segment_f1;
    else if (name == "boundary_f1") x = v.boundary_f1;
    else if (name == "nmi") x = v.nmi;
    else if (name == "temporal_purity") x = v.temporal_purity;
    else if (name == "mean_regime_duration") x = v.mean_regime_duration;
    else if (name == "single_utterance_fraction") x = v.single_utterance_fraction;
    else if (name == "regime_shifts") x = v.regime_shifts;
    else if (name == "transition_entropy") x = v.transition_entropy;
    else if (name == "intra_regime_variance") x = v.intra_regime_variance;
    else if (name == "inter_regime_centroid_distance") x = v.inter_regime_centroid_distance;
    else if (name == "effective_regimes") x = v.effective_regimes;
    else if (name == "dominant_regime_share") x = v.dominant_regime_share;
    else known = false;
    if (!known) throw regimes::Error(regimes::ErrorCode::InvalidArgument, "unknown metric '" + name + "'");
    if (present) *present = x.has_value() ? 1 : 0;
    *value = x.value_or(0.0);
  });
}

void rg_report_free(rg_report* r) { delete r; }

rg_status rg_compare_reports(const rg_report* const* a, const rg_report* const* b, size_t n,
                             char** csv_out) {
  return guard([&] {
    require(a && b && csv_out && n > 0, "null argument");
    std::vector<regimes::MetricReport> ra, rb;
    for (size_t i = 0; i < n; ++i) {
      require(a[i] && b[i], "null report handle");
      ra.push_back(a[i]->value);
      rb.push_back(b[i]->value);
    }
    *csv_out = dup_string(regimes::format_comparison_csv(regimes::compare_reports(ra, rb)));
  });
}

rg_status rg_sweep_k(const rg_series* const* series, size_t n, int k_min, int k_max,
                     const rg_em_config* base, char** csv_out) {
  return guard([&] {
    require(csv_out != nullptr, "null argument");
    const auto data = collect(series, n);
    const auto rows = regimes::sweep_k(std::span<const regimes::ConversationSeries>(data), k_min,
                                       k_max, em_config(base));
    *csv_out = dup_string(regimes::format_sweep_csv(rows));
  });
}

rg_status rg_summarize(const rg_labels* labels, const rg_model* m, long query, char** text_out) {
  return guard([&] {
    require(labels && m && text_out, "null argument");
    std::optional<std::size_t> q;
    if (query >= 0) q = std::size_t(query);
    *text_out = dup_string(regimes::format_summary(regimes::summarize(labels->value, as_hmm(m), q)));
  });
}

void rg_synth_config_defaults(rg_synth_config* cfg) {
  if (!cfg) return;
  const regimes::SynthConfig d;
  *cfg = rg_synth_config{d.num_regimes, d.length, d.self_transition, d.min_separation,
                         d.covariance_scale, modality_bits(d.modalities), d.decoupling, d.seed};
}

rg_status rg_synth_generate(const rg_synth_config* cfg, const char* id, rg_series** series,
                            rg_labels** truth) {
  return guard([&] {
    require(cfg && series && truth, "null argument");
    regimes::SynthConfig c;
    c.num_regimes = cfg->num_regimes;
    c.length = cfg->length;
    c.self_transition = cfg->self_transition;
    c.min_separation = cfg->min_separation;
    c.covariance_scale = cfg->covariance_scale;
    c.modalities = channels_from_bits(cfg->modalities);
    c.decoupling = cfg->decoupling;
    c.seed = cfg->seed;
    if (id) c.id = id;
    auto [s, l] = regimes::generate(c);
    auto* hs = new rg_series{std::move(s)};
    try {
      *truth = new rg_labels{std::move(l)};
    } catch (...) {
      delete hs;
      throw;
    }
    *series = hs;
  });
}

namespace {

void refresh(rg_manifest& m) {
  m.ids.clear();
  m.series.clear();
  m.labels.clear();
  m.has_labels.clear();
  for (const auto& e : m.value.conversations) {
    m.ids.push_back(e.id);
    m.series.push_back(e.series.string());
    m.labels.push_back(e.labels ? e.labels->string() : std::string());
    m.has_labels.push_back(e.labels.has_value());
  }
}

}  // namespace

rg_status rg_manifest_read(const char* path, rg_manifest** out) {
  return guard([&] {
    require(path && out, "null argument");
    auto* m = new rg_manifest{regimes::io::read_manifest(path), {}, {}, {}, {}};
    refresh(*m);
    *out = m;
  });
}

rg_manifest* rg_manifest_create(int corpus_scope) {
  auto* m = new (std::nothrow) rg_manifest{};
  if (m && corpus_scope) m->value.scope = regimes::io::StandardizationScope::Corpus;
  return m;
}

rg_status rg_manifest_add(rg_manifest* m, const char* id, const char* series, const char* labels) {
  return guard([&] {
    require(m && id && series, "null argument");
    for (const auto& e : m->value.conversations)
      if (e.id == id) throw regimes::Error(regimes::ErrorCode::InvalidArgument, std::string("duplicate conversation id '") + id + "'");
    regimes::io::ManifestEntry e;
    e.id = id;
    e.series = series;
    if (labels) e.labels = std::filesystem::path(labels);
    m->value.conversations.push_back(std::move(e));
    refresh(*m);
  });
}

rg_status rg_manifest_write(const rg_manifest* m, const char* path) {
  return guard([&] {
    require(m && path, "null argument");
    regimes::io::write_text(path, regimes::io::format_manifest(m->value));
  });
}

size_t rg_manifest_size(const rg_manifest* m) { return m ? m->ids.size() : 0; }

int rg_manifest_corpus_scope(const rg_manifest* m) {
  return m && m->value.scope == regimes::io::StandardizationScope::Corpus ? 1 : 0;
}

const char* rg_manifest_id(const rg_manifest* m, size_t i) {
  return m && i < m->ids.size() ? m->ids[i].c_str() : nullptr;
}

const char* rg_manifest_series(const rg_manifest* m, size_t i) {
  return m && i < m->series.size() ? m->series[i].c_str() : nullptr;
}

const char* rg_manifest_labels(const rg_manifest* m, size_t i) {
  return m && i < m->labels.size() && m->has_labels[i] ? m->labels[i].c_str() : nullptr;
}

void rg_manifest_free(rg_manifest* m) { delete m; }

}  // extern "C"

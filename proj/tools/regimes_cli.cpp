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

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regimes.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Failure : std::runtime_error {
  int exit_code;
  Failure(int code, const std::string& what) : std::runtime_error(what), exit_code(code) {}
};

[[noreturn]] void usage(const std::string& what) { throw Failure(kExitInput, what); }

void check(rg_status s) {
  if (s == RG_OK) return;
  throw Failure(rg_status_is_numerical(s) ? kExitNumerical : kExitInput, rg_last_error());
}

struct SeriesDel { void operator()(rg_series* p) const { rg_series_free(p); } };
struct LabelsDel { void operator()(rg_labels* p) const { rg_labels_free(p); } };
struct ModelDel { void operator()(rg_model* p) const { rg_model_free(p); } };
struct ReportDel { void operator()(rg_report* p) const { rg_report_free(p); } };
struct ManifestDel { void operator()(rg_manifest* p) const { rg_manifest_free(p); } };
struct StringDel { void operator()(char* p) const { rg_string_free(p); } };

using Series = std::unique_ptr<rg_series, SeriesDel>;
using Labels = std::unique_ptr<rg_labels, LabelsDel>;
using Model = std::unique_ptr<rg_model, ModelDel>;
using Report = std::unique_ptr<rg_report, ReportDel>;
using Manifest = std::unique_ptr<rg_manifest, ManifestDel>;
using CString = std::unique_ptr<char, StringDel>;

std::string take(char* s) {
  CString owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

Series read_series(const std::string& path) {
  rg_series* s = nullptr;
  check(rg_series_read(path.c_str(), nullptr, &s));
  return Series(s);
}

Labels read_labels(const std::string& path) {
  rg_labels* l = nullptr;
  check(rg_labels_read(path.c_str(), &l));
  return Labels(l);
}

Model read_model(const std::string& path) {
  rg_model* m = nullptr;
  check(rg_model_read(path.c_str(), &m));
  return Model(m);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(kExitInput, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Failure(kExitInput, "failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kExitInput, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) std::cout << text << std::flush;
  else write_file(out_path, text);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("REGIME_SEG_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    usage(std::string("REGIME_SEG_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// A corpus of conversations resolved from a manifest or positional files.
struct Corpus {
  std::vector<std::string> ids;
  std::vector<Series> series;  // standardized unless disabled
  std::vector<std::optional<std::string>> labels;
};

struct CorpusArgs {
  std::string manifest;
  std::vector<std::string> files;
  bool no_standardize = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--manifest", manifest, "Corpus manifest (JSON)");
    cmd->add_option("inputs", files, "Series files (CSV or JSON)");
    cmd->add_flag("--no-standardize", no_standardize, "Use values as given");
  }

  Corpus load() const {
    if (manifest.empty() == files.empty())
      usage("give either --manifest or one or more series files");
    Corpus c;
    bool corpus_scope = false;
    if (!manifest.empty()) {
      rg_manifest* raw = nullptr;
      check(rg_manifest_read(manifest.c_str(), &raw));
      Manifest m(raw);
      corpus_scope = rg_manifest_corpus_scope(m.get()) != 0;
      for (std::size_t i = 0; i < rg_manifest_size(m.get()); ++i) {
        c.ids.emplace_back(rg_manifest_id(m.get(), i));
        auto s = read_series(rg_manifest_series(m.get(), i));
        check(rg_series_set_id(s.get(), c.ids.back().c_str()));
        c.series.push_back(std::move(s));
        const char* l = rg_manifest_labels(m.get(), i);
        c.labels.push_back(l ? std::optional<std::string>(l) : std::nullopt);
      }
    } else {
      for (const auto& f : files) {
        c.series.push_back(read_series(f));
        c.ids.emplace_back(rg_series_id(c.series.back().get()));
        c.labels.emplace_back();
      }
      auto sorted = c.ids;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        usage("duplicate conversation id among inputs");
    }
    if (no_standardize) return c;
    if (corpus_scope) {
      std::vector<const rg_series*> in;
      for (const auto& s : c.series) in.push_back(s.get());
      std::vector<rg_series*> out(in.size(), nullptr);
      check(rg_series_standardize_corpus(in.data(), in.size(), out.data()));
      for (std::size_t i = 0; i < out.size(); ++i) c.series[i].reset(out[i]);
    } else {
      for (auto& s : c.series) {
        rg_series* z = nullptr;
        check(rg_series_standardize(s.get(), &z));
        s.reset(z);
      }
    }
    return c;
  }
};

// Runs job(i) for every i, at most `threads` at a time; rethrows the first failure by index.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F job) {
  std::vector<std::exception_ptr> errors(n);
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n) return;
        i = next++;
      }
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") usage("--format must be csv or json");
}

// fit

struct FitArgs {
  CorpusArgs corpus;
  std::string model;
  std::optional<int> k;
  int k_max = 8;
  std::optional<std::uint64_t> seed;
  int restarts = 5;
  int max_iters = 200;
  int burn_in = 500;
  int samples = 500;
  int thin = 1;
  bool pooled = false;
  bool include_samples = false;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned threads = default_threads();
};

struct FitRow {
  std::string id;
  double loglik = 0.0;
  int effective_k = 0;
};

int cmd_fit(const FitArgs& a) {
  check_format(a.format);
  if (a.model != "hmm" && a.model != "sticky") usage("--model must be hmm or sticky");
  if (a.model == "hmm" && !a.k) usage("--model hmm requires --k");
  if (a.model == "sticky" && a.pooled) usage("--pooled applies to --model hmm only");
  const auto corpus = a.corpus.load();
  const std::uint64_t seed = resolve_seed(a.seed);
  const fs::path out(a.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) usage("cannot create output directory '" + a.out_dir + "'");

  rg_em_config em;
  rg_em_config_defaults(&em);
  if (a.k) em.num_states = *a.k;
  em.n_restarts = a.restarts;
  em.max_iters = a.max_iters;
  rg_sticky_config st;
  rg_sticky_config_defaults(&st);
  st.k_max = a.k_max;
  st.burn_in = a.burn_in;
  st.n_samples = a.samples;
  st.thin = a.thin;

  const std::size_t n = corpus.series.size();
  std::vector<FitRow> rows(n);
  auto finish = [&](std::size_t i, const rg_model* m) {
    const rg_series* s = corpus.series[i].get();
    rg_labels* raw = nullptr;
    check(rg_model_decode(m, s, &raw, nullptr));
    Labels labels(raw);
    rows[i].id = corpus.ids[i];
    check(rg_model_loglik(m, s, &rows[i].loglik));
    check(rg_model_effective_k(m, s, &rows[i].effective_k));
    check(rg_labels_write(labels.get(), (out / (corpus.ids[i] + ".labels.csv")).string().c_str()));
  };

  if (a.pooled) {
    em.seed = seed;
    std::vector<const rg_series*> in;
    for (const auto& s : corpus.series) in.push_back(s.get());
    rg_model* raw = nullptr;
    check(rg_hmm_fit(in.data(), in.size(), &em, &raw));
    Model m(raw);
    check(rg_model_write(m.get(), (out / "pooled.model.json").string().c_str(), 0));
    for (std::size_t i = 0; i < n; ++i) finish(i, m.get());
  } else {
    parallel_for(n, a.threads, [&](std::size_t i) {
      const std::uint64_t s = rg_derive_seed(seed, i);
      rg_model* raw = nullptr;
      const rg_series* series = corpus.series[i].get();
      if (a.model == "hmm") {
        auto cfg = em;
        cfg.seed = s;
        check(rg_hmm_fit(&series, 1, &cfg, &raw));
      } else {
        auto cfg = st;
        cfg.seed = s;
        check(rg_sticky_fit(series, &cfg, &raw));
      }
      Model m(raw);
      check(rg_model_write(m.get(), (out / (corpus.ids[i] + ".model.json")).string().c_str(),
                           a.include_samples ? 1 : 0));
      finish(i, m.get());
    });
  }

  if (a.format == "csv") {
    std::cout << "id,model,loglik,effective_k\n";
    for (const auto& r : rows)
      std::cout << r.id << ',' << a.model << ',' << fmt(r.loglik) << ',' << r.effective_k << '\n';
  } else {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"id", r.id}, {"model", a.model}, {"loglik", r.loglik}, {"effective_k", r.effective_k}});
    std::cout << j.dump(2) << '\n';
  }
  return kExitOk;
}

// eval

struct EvalArgs {
  CorpusArgs corpus;
  std::string pred_dir;
  std::string pred;
  std::string ref;
  std::string out;
  std::string format = "json";
};

const char* const kMetricNames[] = {
    "segment_f1", "boundary_f1", "nmi", "mean_regime_duration", "single_utterance_fraction",
    "regime_shifts", "temporal_purity", "transition_entropy", "intra_regime_variance",
    "inter_regime_centroid_distance", "effective_regimes", "dominant_regime_share"};

std::string report_json(const rg_report* r) {
  char* s = nullptr;
  check(rg_report_to_json(r, &s));
  return take(s);
}

int cmd_eval(const EvalArgs& a) {
  check_format(a.format);
  if (a.pred.empty() == a.pred_dir.empty()) usage("give exactly one of --pred or --pred-dir");
  const auto corpus = a.corpus.load();
  const std::size_t n = corpus.series.size();
  if (!a.pred.empty() && n != 1) usage("--pred evaluates a single conversation");
  if (!a.ref.empty() && n != 1) usage("--ref evaluates a single conversation");

  std::vector<Report> reports;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string pred_path =
        a.pred.empty() ? (fs::path(a.pred_dir) / (corpus.ids[i] + ".labels.csv")).string() : a.pred;
    auto pred = read_labels(pred_path);
    Labels ref;
    if (!a.ref.empty()) ref = read_labels(a.ref);
    else if (corpus.labels[i]) ref = read_labels(*corpus.labels[i]);
    rg_report* raw = nullptr;
    check(rg_evaluate(pred.get(), ref.get(), corpus.series[i].get(), &raw));
    reports.emplace_back(raw);
  }
  std::vector<const rg_report*> handles;
  for (const auto& r : reports) handles.push_back(r.get());
  rg_report* agg_raw = nullptr;
  check(rg_report_aggregate(handles.data(), handles.size(), &agg_raw));
  Report agg(agg_raw);

  if (a.format == "json") {
    json j;
    j["conversations"] = json::array();
    for (std::size_t i = 0; i < n; ++i)
      j["conversations"].push_back({{"id", corpus.ids[i]}, {"metrics", json::parse(report_json(reports[i].get()))}});
    j["aggregate"] = json::parse(report_json(agg.get()));
    emit(j.dump(2) + "\n", a.out);
    return kExitOk;
  }
  std::string text = "id";
  for (const char* m : kMetricNames) text += std::string(",") + m;
  text += '\n';
  auto row = [&](const std::string& id, const rg_report* r) {
    text += id;
    for (const char* m : kMetricNames) {
      double v = 0.0;
      int present = 0;
      check(rg_report_get(r, m, &v, &present));
      text += ',';
      if (present) text += fmt(v);
    }
    text += '\n';
  };
  for (std::size_t i = 0; i < n; ++i) row(corpus.ids[i], reports[i].get());
  row("aggregate", agg.get());
  emit(text, a.out);
  return kExitOk;
}

// compare

struct CompareArgs {
  std::string a;
  std::string b;
  std::string out;
  std::string format = "csv";
};

std::vector<std::pair<std::string, Report>> load_eval(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    usage("cannot parse '" + path + "': " + e.what());
  }
  std::vector<std::pair<std::string, Report>> out;
  try {
    for (const auto& c : j.at("conversations")) {
      rg_report* raw = nullptr;
      check(rg_report_from_json(c.at("metrics").dump().c_str(), &raw));
      out.emplace_back(c.at("id").get<std::string>(), Report(raw));
    }
  } catch (const json::exception& e) {
    usage("malformed evaluation file '" + path + "': " + e.what());
  }
  if (out.empty()) usage("evaluation file '" + path + "' lists no conversations");
  return out;
}

int cmd_compare(const CompareArgs& args) {
  check_format(args.format);
  auto a = load_eval(args.a);
  auto b = load_eval(args.b);
  auto by_id = [](auto& v) {
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  };
  by_id(a);
  by_id(b);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].first == b[i].first;
  if (!same) usage("the two evaluations cover different conversations");
  std::vector<const rg_report*> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ra.push_back(a[i].second.get());
    rb.push_back(b[i].second.get());
  }
  char* raw = nullptr;
  check(rg_compare_reports(ra.data(), rb.data(), ra.size(), &raw));
  const std::string csv = take(raw);
  if (args.format == "csv") {
    emit(csv, args.out);
    return kExitOk;
  }
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  for (std::stringstream hs(line); std::getline(hs, line, ',');) header.push_back(line);
  json j = json::array();
  while (std::getline(in, line)) {
    json row;
    std::stringstream rs(line);
    std::string cell;
    for (std::size_t c = 0; c < header.size() && std::getline(rs, cell, ','); ++c) {
      if (c < 2) row[header[c]] = cell;
      else row[header[c]] = json::parse(cell);
    }
    j.push_back(row);
  }
  emit(j.dump(2) + "\n", args.out);
  return kExitOk;
}

// sweep-k

struct SweepArgs {
  CorpusArgs corpus;
  int k_min = 2;
  int k_max = 12;
  int restarts = 5;
  int max_iters = 200;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

int cmd_sweep(const SweepArgs& a) {
  check_format(a.format);
  if (a.k_min < 1 || a.k_max < a.k_min)
    usage("invalid K range " + std::to_string(a.k_min) + ".." + std::to_string(a.k_max));
  const auto corpus = a.corpus.load();
  rg_em_config em;
  rg_em_config_defaults(&em);
  em.n_restarts = a.restarts;
  em.max_iters = a.max_iters;
  em.seed = resolve_seed(a.seed);
  std::vector<const rg_series*> in;
  for (const auto& s : corpus.series) in.push_back(s.get());
  char* raw = nullptr;
  check(rg_sweep_k(in.data(), in.size(), a.k_min, a.k_max, &em, &raw));
  const std::string csv = take(raw);
  if (a.format == "csv") {
    emit(csv, a.out);
    return kExitOk;
  }
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  json j = json::array();
  while (std::getline(lines, line)) {
    std::stringstream rs(line);
    std::string k, ll, dur, ent;
    std::getline(rs, k, ',');
    std::getline(rs, ll, ',');
    std::getline(rs, dur, ',');
    std::getline(rs, ent, ',');
    j.push_back({{"k", std::stoi(k)}, {"log_likelihood", json::parse(ll)},
                 {"mean_regime_duration", json::parse(dur)}, {"transition_entropy", json::parse(ent)}});
  }
  emit(j.dump(2) + "\n", a.out);
  return kExitOk;
}

// summarize

struct SummarizeArgs {
  std::string labels;
  std::string model;
  std::optional<long> query;
  std::string out;
};

int cmd_summarize(const SummarizeArgs& a) {
  auto labels = read_labels(a.labels);
  auto model = read_model(a.model);
  const long q = a.query.value_or(-1);
  if (a.query && (*a.query < 0 || std::size_t(*a.query) >= rg_labels_length(labels.get())))
    usage("query index " + std::to_string(*a.query) + " out of range");
  char* raw = nullptr;
  check(rg_summarize(labels.get(), model.get(), q, &raw));
  emit(take(raw), a.out);
  return kExitOk;
}

// gen-synth

struct SynthArgs {
  std::string out_dir = ".";
  int conversations = 1;
  int regimes = 3;
  std::size_t length = 120;
  double self_transition = 0.95;
  double separation = 3.0;
  double scale = 1.0;
  std::string modalities = "txt,aud";
  double decoupling = 0.0;
  std::optional<std::uint64_t> seed;
  std::string prefix = "synth";
  std::string format = "csv";
};

unsigned parse_modalities(const std::string& text) {
  unsigned bits = 0;
  std::stringstream ss(text);
  for (std::string tag; std::getline(ss, tag, ',');) {
    if (tag == "txt") bits |= RG_MODALITY_TEXT;
    else if (tag == "aud") bits |= RG_MODALITY_AUDIO;
    else if (tag == "vid") bits |= RG_MODALITY_VIDEO;
    else usage("unknown modality '" + tag + "' (expected txt, aud or vid)");
  }
  if (!bits) usage("--modalities must name at least one channel");
  return bits;
}

int cmd_gen_synth(const SynthArgs& a) {
  check_format(a.format);
  if (a.conversations < 1) usage("--conversations must be at least 1");
  rg_synth_config cfg;
  rg_synth_config_defaults(&cfg);
  cfg.num_regimes = a.regimes;
  cfg.length = a.length;
  cfg.self_transition = a.self_transition;
  cfg.min_separation = a.separation;
  cfg.covariance_scale = a.scale;
  cfg.modalities = parse_modalities(a.modalities);
  cfg.decoupling = a.decoupling;
  const std::uint64_t seed = resolve_seed(a.seed);
  const fs::path out(a.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) usage("cannot create output directory '" + a.out_dir + "'");

  Manifest manifest(rg_manifest_create(0));
  if (!manifest) throw Failure(kExitInput, "out of memory");
  const int width = a.conversations > 1 ? 3 : 0;
  for (int i = 0; i < a.conversations; ++i) {
    std::string id = a.prefix;
    if (width) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "_%03d", i);
      id += buf;
    }
    auto c = cfg;
    c.seed = a.conversations > 1 ? rg_derive_seed(seed, std::uint64_t(i)) : seed;
    rg_series* s_raw = nullptr;
    rg_labels* l_raw = nullptr;
    check(rg_synth_generate(&c, id.c_str(), &s_raw, &l_raw));
    Series s(s_raw);
    Labels l(l_raw);
    const std::string series_name = id + "." + a.format;
    const std::string truth_name = id + ".truth.csv";
    check(rg_series_write(s.get(), (out / series_name).string().c_str(), a.format.c_str()));
    check(rg_labels_write(l.get(), (out / truth_name).string().c_str()));
    check(rg_manifest_add(manifest.get(), id.c_str(), series_name.c_str(), truth_name.c_str()));
  }
  check(rg_manifest_write(manifest.get(), (out / "manifest.json").string().c_str()));

  json echo;
  echo["conversations"] = a.conversations;
  echo["num_regimes"] = a.regimes;
  echo["length"] = a.length;
  echo["self_transition"] = a.self_transition;
  echo["min_separation"] = a.separation;
  echo["covariance_scale"] = a.scale;
  echo["modalities"] = a.modalities;
  echo["decoupling"] = a.decoupling;
  echo["seed"] = seed;
  echo["prefix"] = a.prefix;
  echo["format"] = a.format;
  echo["manifest"] = (out / "manifest.json").generic_string();
  std::cout << echo.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime segmentation of valence-arousal utterance series"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model per conversation and decode regimes");
  fit.corpus.add_to(fit_cmd);
  fit_cmd->add_option("--model", fit.model, "hmm or sticky")->required();
  fit_cmd->add_option("--k", fit.k, "Number of HMM states");
  fit_cmd->add_option("--k-max", fit.k_max, "Sticky truncation level")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Random seed (falls back to REGIME_SEG_SEED)");
  fit_cmd->add_option("--restarts", fit.restarts, "EM restarts")->capture_default_str();
  fit_cmd->add_option("--max-iters", fit.max_iters, "EM iteration cap")->capture_default_str();
  fit_cmd->add_option("--burn-in", fit.burn_in, "Gibbs burn-in sweeps")->capture_default_str();
  fit_cmd->add_option("--samples", fit.samples, "Retained Gibbs samples")->capture_default_str();
  fit_cmd->add_option("--thin", fit.thin, "Gibbs thinning interval")->capture_default_str();
  fit_cmd->add_flag("--pooled", fit.pooled, "Fit one HMM across all conversations");
  fit_cmd->add_flag("--include-samples", fit.include_samples, "Store retained posterior samples");
  fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory")->capture_default_str();
  fit_cmd->add_option("--format", fit.format, "csv or json")->capture_default_str();
  fit_cmd->add_option("--threads", fit.threads, "Worker threads");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate decoded labels");
  ev.corpus.add_to(eval_cmd);
  eval_cmd->add_option("--pred-dir", ev.pred_dir, "Directory holding {id}.labels.csv");
  eval_cmd->add_option("--pred", ev.pred, "Decoded labels for a single conversation");
  eval_cmd->add_option("--ref", ev.ref, "Reference labels for a single conversation");
  eval_cmd->add_option("--out", ev.out, "Output file (default stdout)");
  eval_cmd->add_option("--format", ev.format, "json or csv")->capture_default_str();

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired comparison of two evaluations");
  cmp_cmd->add_option("a", cmp.a, "Evaluation JSON of model A")->required();
  cmp_cmd->add_option("b", cmp.b, "Evaluation JSON of model B")->required();
  cmp_cmd->add_option("--out", cmp.out, "Output file (default stdout)");
  cmp_cmd->add_option("--format", cmp.format, "csv or json")->capture_default_str();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep-k", "Gaussian HMM diagnostics across K");
  sw.corpus.add_to(sweep_cmd);
  sweep_cmd->add_option("--k-min", sw.k_min, "Smallest K")->capture_default_str();
  sweep_cmd->add_option("--k-max", sw.k_max, "Largest K")->capture_default_str();
  sweep_cmd->add_option("--restarts", sw.restarts, "EM restarts per K")->capture_default_str();
  sweep_cmd->add_option("--max-iters", sw.max_iters, "EM iteration cap")->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "Random seed (falls back to REGIME_SEG_SEED)");
  sweep_cmd->add_option("--out", sw.out, "Output file (default stdout)");
  sweep_cmd->add_option("--format", sw.format, "csv or json")->capture_default_str();

  SummarizeArgs sm;
  auto* sum_cmd = app.add_subcommand("summarize", "Emit the regime summary block at a query turn");
  sum_cmd->add_option("--labels", sm.labels, "Decoded labels")->required();
  sum_cmd->add_option("--model", sm.model, "Fitted model JSON")->required();
  sum_cmd->add_option("--query", sm.query, "Query turn index (default T/2)");
  sum_cmd->add_option("--out", sm.out, "Output file (default stdout)");

  SynthArgs sy;
  auto* syn_cmd = app.add_subcommand("gen-synth", "Generate a synthetic corpus with truth labels");
  syn_cmd->add_option("--out-dir", sy.out_dir, "Output directory")->capture_default_str();
  syn_cmd->add_option("--conversations", sy.conversations, "Number of conversations")->capture_default_str();
  syn_cmd->add_option("--regimes", sy.regimes, "Number of regimes")->capture_default_str();
  syn_cmd->add_option("--length", sy.length, "Utterances per conversation")->capture_default_str();
  syn_cmd->add_option("--self-transition", sy.self_transition, "Self-transition probability")->capture_default_str();
  syn_cmd->add_option("--separation", sy.separation, "Minimum pairwise mean separation")->capture_default_str();
  syn_cmd->add_option("--scale", sy.scale, "Per-dimension noise standard deviation")->capture_default_str();
  syn_cmd->add_option("--modalities", sy.modalities, "Comma-separated txt,aud,vid")->capture_default_str();
  syn_cmd->add_option("--decoupling", sy.decoupling, "Per-channel probability of emitting from another regime")->capture_default_str();
  syn_cmd->add_option("--seed", sy.seed, "Random seed (falls back to REGIME_SEG_SEED)");
  syn_cmd->add_option("--prefix", sy.prefix, "Conversation id prefix")->capture_default_str();
  syn_cmd->add_option("--format", sy.format, "csv or json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help() << std::flush;
    return kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*eval_cmd) return cmd_eval(ev);
    if (*cmp_cmd) return cmd_compare(cmp);
    if (*sweep_cmd) return cmd_sweep(sw);
    if (*sum_cmd) return cmd_summarize(sm);
    if (*syn_cmd) return cmd_gen_synth(sy);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.what() << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

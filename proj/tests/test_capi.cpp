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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "regimes.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("regimes_capi_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  rg_string_free(s);
  return out;
}

rg_series* synth(std::uint64_t seed, const char* id, rg_labels** truth, std::size_t T = 80) {
  rg_synth_config cfg;
  rg_synth_config_defaults(&cfg);
  cfg.length = T;
  cfg.seed = seed;
  rg_series* s = nullptr;
  REQUIRE(rg_synth_generate(&cfg, id, &s, truth) == RG_OK);
  return s;
}

}  // namespace

TEST_CASE("status strings and error reporting") {
  CHECK(std::string(rg_status_string(RG_OK)) == "OK");
  CHECK(std::string(rg_status_string(RG_E_PARSE)) == "ParseError");
  CHECK(rg_status_is_numerical(RG_E_EMPTY_STATE_COLLAPSE));
  CHECK(rg_status_is_numerical(RG_E_NUMERICAL_UNDERFLOW));
  CHECK_FALSE(rg_status_is_numerical(RG_E_PARSE));
  rg_series* s = nullptr;
  CHECK(rg_series_read("/nonexistent/file.csv", nullptr, &s) == RG_E_IO);
  CHECK(s == nullptr);
  CHECK(std::string(rg_last_error()).find("nonexistent") != std::string::npos);
  CHECK(rg_series_read(nullptr, nullptr, &s) == RG_E_INVALID_ARGUMENT);
  CHECK(rg_derive_seed(7, 0) != rg_derive_seed(7, 1));
  CHECK(rg_derive_seed(7, 3) == rg_derive_seed(7, 3));
}

TEST_CASE("series and labels through files") {
  TempDir dir;
  rg_labels* truth = nullptr;
  rg_series* s = synth(1, "conv", &truth);
  CHECK(rg_series_length(s) == 80);
  CHECK(rg_series_modalities(s) == (RG_MODALITY_TEXT | RG_MODALITY_AUDIO));
  CHECK(std::string(rg_series_id(s)) == "conv");
  const auto path = (dir.path / "conv.json").string();
  REQUIRE(rg_series_write(s, path.c_str(), nullptr) == RG_OK);
  rg_series* back = nullptr;
  REQUIRE(rg_series_read(path.c_str(), "json", &back) == RG_OK);
  CHECK(rg_series_length(back) == 80);
  rg_series* z = nullptr;
  REQUIRE(rg_series_standardize(back, &z) == RG_OK);
  rg_series* twice = nullptr;
  CHECK(rg_series_standardize(z, &twice) == RG_E_ALREADY_STANDARDIZED);

  const auto lpath = (dir.path / "truth.csv").string();
  REQUIRE(rg_labels_write(truth, lpath.c_str()) == RG_OK);
  rg_labels* l = nullptr;
  REQUIRE(rg_labels_read(lpath.c_str(), &l) == RG_OK);
  CHECK(rg_labels_length(l) == 80);
  const int vals[] = {3, 3, 9};
  rg_labels* made = nullptr;
  REQUIRE(rg_labels_create(vals, 3, &made) == RG_OK);
  CHECK(rg_labels_get(made, 2) == 9);
  rg_labels_free(made);
  rg_labels_free(l);
  rg_series_free(z);
  rg_series_free(back);
  rg_series_free(s);
  rg_labels_free(truth);
}

TEST_CASE("fit, decode, evaluate, summarize") {
  TempDir dir;
  rg_labels* truth = nullptr;
  rg_series* raw = synth(2, "c", &truth, 120);
  rg_series* s = nullptr;
  REQUIRE(rg_series_standardize(raw, &s) == RG_OK);

  rg_em_config em;
  rg_em_config_defaults(&em);
  em.num_states = 3;
  em.seed = 4;
  rg_model* hmm = nullptr;
  const rg_series* one[] = {s};
  REQUIRE(rg_hmm_fit(one, 1, &em, &hmm) == RG_OK);
  CHECK(rg_model_get_kind(hmm) == RG_MODEL_HMM);
  CHECK(rg_model_num_states(hmm) == 3);
  double ll = 0;
  REQUIRE(rg_model_loglik(hmm, s, &ll) == RG_OK);
  CHECK(std::isfinite(ll));

  rg_sticky_config sc;
  rg_sticky_config_defaults(&sc);
  CHECK(sc.k_max == 8);
  sc.burn_in = 100;
  sc.n_samples = 50;
  sc.seed = 5;
  rg_model* sticky = nullptr;
  REQUIRE(rg_sticky_fit(s, &sc, &sticky) == RG_OK);
  CHECK(rg_model_get_kind(sticky) == RG_MODEL_STICKY);
  int k = 0;
  REQUIRE(rg_model_effective_k(sticky, s, &k) == RG_OK);
  CHECK(k >= 1);
  CHECK(k <= 8);

  rg_labels* pred = nullptr;
  double lp = 0;
  REQUIRE(rg_model_decode(sticky, s, &pred, &lp) == RG_OK);
  rg_report* rep = nullptr;
  REQUIRE(rg_evaluate(pred, truth, s, &rep) == RG_OK);
  double nmi = -1;
  int present = 0;
  REQUIRE(rg_report_get(rep, "nmi", &nmi, &present) == RG_OK);
  CHECK(present == 1);
  CHECK(nmi >= 0.0);
  CHECK(rg_report_get(rep, "bogus", &nmi, &present) == RG_E_INVALID_ARGUMENT);
  rg_report* self = nullptr;
  REQUIRE(rg_evaluate(truth, truth, s, &self) == RG_OK);
  REQUIRE(rg_report_get(self, "segment_f1", &nmi, &present) == RG_OK);
  CHECK(nmi == 1.0);
  rg_report* bare = nullptr;
  REQUIRE(rg_evaluate(pred, nullptr, s, &bare) == RG_OK);
  REQUIRE(rg_report_get(bare, "nmi", &nmi, &present) == RG_OK);
  CHECK(present == 0);

  char* json = nullptr;
  REQUIRE(rg_report_to_json(rep, &json) == RG_OK);
  rg_report* parsed = nullptr;
  REQUIRE(rg_report_from_json(json, &parsed) == RG_OK);
  rg_string_free(json);
  const rg_report* a[] = {rep, self};
  const rg_report* b[] = {parsed, self};
  char* csv = nullptr;
  REQUIRE(rg_compare_reports(a, b, 2, &csv) == RG_OK);
  CHECK(take(csv).find("nmi,higher,") != std::string::npos);
  rg_report* agg = nullptr;
  REQUIRE(rg_report_aggregate(a, 2, &agg) == RG_OK);

  char* text = nullptr;
  REQUIRE(rg_summarize(pred, sticky, -1, &text) == RG_OK);
  CHECK(take(text).rfind("[Emotional Regime Summary]\n", 0) == 0);
  CHECK(rg_summarize(pred, sticky, 1000, &text) == RG_E_INVALID_ARGUMENT);

  const auto mpath = (dir.path / "m.json").string();
  REQUIRE(rg_model_write(sticky, mpath.c_str(), 0) == RG_OK);
  rg_model* loaded = nullptr;
  REQUIRE(rg_model_read(mpath.c_str(), &loaded) == RG_OK);
  rg_labels* again = nullptr;
  REQUIRE(rg_model_decode(loaded, s, &again, nullptr) == RG_OK);
  for (std::size_t t = 0; t < rg_labels_length(pred); ++t) CHECK(rg_labels_get(again, t) == rg_labels_get(pred, t));

  char* sweep = nullptr;
  REQUIRE(rg_sweep_k(one, 1, 2, 4, &em, &sweep) == RG_OK);
  CHECK(take(sweep).rfind("k,log_likelihood", 0) == 0);
  CHECK(rg_sweep_k(one, 1, 5, 3, &em, &sweep) == RG_E_INVALID_ARGUMENT);

  for (auto* r : {rep, self, bare, parsed, agg}) rg_report_free(r);
  rg_labels_free(again);
  rg_labels_free(pred);
  rg_labels_free(truth);
  rg_model_free(loaded);
  rg_model_free(sticky);
  rg_model_free(hmm);
  rg_series_free(s);
  rg_series_free(raw);
}

TEST_CASE("manifests") {
  TempDir dir;
  rg_labels* truth = nullptr;
  rg_series* s = synth(3, "m0", &truth, 10);
  const auto sp = (dir.path / "m0.csv").string(), lp = (dir.path / "m0.truth.csv").string();
  REQUIRE(rg_series_write(s, sp.c_str(), nullptr) == RG_OK);
  REQUIRE(rg_labels_write(truth, lp.c_str()) == RG_OK);
  rg_manifest* m = rg_manifest_create(1);
  REQUIRE(rg_manifest_add(m, "m0", "m0.csv", "m0.truth.csv") == RG_OK);
  REQUIRE(rg_manifest_add(m, "m1", "m0.csv", nullptr) == RG_OK);
  const auto mp = (dir.path / "manifest.json").string();
  REQUIRE(rg_manifest_write(m, mp.c_str()) == RG_OK);
  rg_manifest* back = nullptr;
  REQUIRE(rg_manifest_read(mp.c_str(), &back) == RG_OK);
  CHECK(rg_manifest_size(back) == 2);
  CHECK(rg_manifest_corpus_scope(back) == 1);
  CHECK(std::string(rg_manifest_id(back, 1)) == "m1");
  CHECK(rg_manifest_labels(back, 1) == nullptr);
  CHECK(fs::equivalent(rg_manifest_series(back, 0), sp));
  rg_manifest_free(back);
  rg_manifest_free(m);
  rg_series_free(s);
  rg_labels_free(truth);
}

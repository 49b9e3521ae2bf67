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
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("regimes_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + REGIMES_CLI + "\" " + args + " >\"" + (log.string() + ".out") +
                          "\" 2>\"" + (log.string() + ".err") + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  TempDir d;
  const auto log = d.path / "log";
  REQUIRE(run("gen-synth --out-dir " + q(d.path / "data") + " --length 40 --seed 1", log) == 0);
  const auto series = q(d.path / "data" / "synth.csv");
  CHECK(run("fit --model hmm " + series, log) == 2);
  CHECK(!slurp(log.string() + ".err").empty());
  CHECK(run("fit --model banana --k 2 " + series, log) == 2);
  CHECK(run("sweep-k --k-min 5 --k-max 3 " + series, log) == 2);
  CHECK(run("fit --model hmm --k 2 " + q(d.path / "missing.csv"), log) == 2);
  CHECK(run("no-such-command", log) == 2);
  CHECK(run("gen-synth --out-dir " + q(d.path / "bad") + " --self-transition 1.5", log) == 2);
  CHECK(run("gen-synth --out-dir " + q(d.path / "bad") + " --decoupling -0.1", log) == 2);
}

TEST_CASE("seed repeat gives identical files") {
  TempDir d;
  const auto log = d.path / "log";
  for (const char* run_dir : {"a", "b"}) {
    const auto root = d.path / run_dir;
    REQUIRE(run("gen-synth --out-dir " + q(root / "data") + " --conversations 2 --length 50 --seed 3", log) == 0);
    REQUIRE(run("fit --model sticky --k-max 6 --burn-in 40 --samples 20 --seed 7 --out-dir " + q(root / "fit") +
                    " --manifest " + q(root / "data" / "manifest.json"),
                log) == 0);
  }
  for (const char* f : {"data/synth_000.csv", "data/synth_001.truth.csv", "fit/synth_000.model.json",
                        "fit/synth_001.labels.csv"}) {
    const auto a = slurp(d.path / "a" / f), b = slurp(d.path / "b" / f);
    CHECK(!a.empty());
    CHECK(a == b);
  }
  CHECK(slurp(d.path / "a" / "data" / "synth_000.csv") != slurp(d.path / "a" / "data" / "synth_001.csv"));
}

TEST_CASE("environment seed is used when no flag is given") {
  TempDir d;
  const auto log = d.path / "log";
  REQUIRE(run("gen-synth --out-dir " + q(d.path / "flag") + " --length 30 --seed 21", log) == 0);
  REQUIRE(run("gen-synth --out-dir " + q(d.path / "env") + " --length 30", log) == 0);
  const std::string env = "REGIME_SEG_SEED=21 ";
  const std::string cmd = env + "\"" + REGIMES_CLI + "\" gen-synth --out-dir " + q(d.path / "env2") +
                          " --length 30 >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(d.path / "flag" / "synth.csv") == slurp(d.path / "env2" / "synth.csv"));
  CHECK(slurp(d.path / "flag" / "synth.csv") != slurp(d.path / "env" / "synth.csv"));
}

TEST_CASE("full self-transition gives a single truth segment") {
  TempDir d;
  const auto log = d.path / "log";
  REQUIRE(run("gen-synth --out-dir " + q(d.path) + " --length 25 --self-transition 1 --seed 4", log) == 0);
  std::ifstream in(d.path / "synth.truth.csv");
  std::string line, first;
  std::getline(in, line);
  int rows = 0;
  bool constant = true;
  while (std::getline(in, line)) {
    const auto label = line.substr(line.find(',') + 1);
    if (rows == 0) first = label;
    constant = constant && label == first;
    ++rows;
  }
  CHECK(rows == 25);
  CHECK(constant);
}

TEST_CASE("pipeline smoke: generate, fit, evaluate, compare, sweep, summarize") {
  TempDir d;
  const auto log = d.path / "log";
  const auto manifest = q(d.path / "data" / "manifest.json");
  REQUIRE(run("gen-synth --out-dir " + q(d.path / "data") + " --conversations 2 --length 60 --seed 5", log) == 0);
  CHECK(slurp(log.string() + ".out").find("\"self_transition\"") != std::string::npos);
  REQUIRE(run("fit --model hmm --k 4 --seed 1 --out-dir " + q(d.path / "hmm") + " --manifest " + manifest, log) == 0);
  CHECK(slurp(log.string() + ".out").rfind("id,model,loglik,effective_k\n", 0) == 0);
  REQUIRE(run("fit --model sticky --burn-in 50 --samples 30 --seed 1 --out-dir " + q(d.path / "sticky") +
                  " --manifest " + manifest,
              log) == 0);
  REQUIRE(run("eval --pred-dir " + q(d.path / "hmm") + " --manifest " + manifest + " --out " + q(d.path / "hmm.json"),
              log) == 0);
  REQUIRE(run("eval --pred-dir " + q(d.path / "sticky") + " --manifest " + manifest + " --out " +
                  q(d.path / "sticky.json"),
              log) == 0);
  const auto ev = slurp(d.path / "hmm.json");
  CHECK(ev.find("\"aggregate\"") != std::string::npos);
  CHECK(ev.find("\"nmi\"") != std::string::npos);

  REQUIRE(run("compare " + q(d.path / "sticky.json") + " " + q(d.path / "sticky.json"), log) == 0);
  const auto same = slurp(log.string() + ".out");
  CHECK(same.find("mean_regime_duration,higher,") != std::string::npos);
  std::istringstream rows(same);
  std::string row;
  std::getline(rows, row);
  while (std::getline(rows, row)) CHECK(row.substr(row.rfind(',')) == ",2");
  REQUIRE(run("compare " + q(d.path / "sticky.json") + " " + q(d.path / "hmm.json"), log) == 0);

  REQUIRE(run("eval --pred " + q(d.path / "hmm" / "synth_000.labels.csv") + " " +
                  q(d.path / "data" / "synth_000.csv") + " --out " + q(d.path / "single.json"),
              log) == 0);
  CHECK(run("compare " + q(d.path / "single.json") + " " + q(d.path / "hmm.json"), log) == 2);

  REQUIRE(run("sweep-k --k-min 2 --k-max 4 --restarts 2 --seed 1 --manifest " + manifest, log) == 0);
  CHECK(slurp(log.string() + ".out").rfind("k,log_likelihood,mean_regime_duration,transition_entropy\n", 0) == 0);

  REQUIRE(run("summarize --labels " + q(d.path / "sticky" / "synth_000.labels.csv") + " --model " +
                  q(d.path / "sticky" / "synth_000.model.json"),
              log) == 0);
  const auto block = slurp(log.string() + ".out");
  CHECK(block.rfind("[Emotional Regime Summary]\nConsultation phase: history-taking\nCurrent regime: R", 0) == 0);
  CHECK(run("summarize --labels " + q(d.path / "sticky" / "synth_000.labels.csv") + " --model " +
                q(d.path / "sticky" / "synth_000.model.json") + " --query 60",
            log) == 2);
  REQUIRE(run("gen-synth --out-dir " + q(d.path / "short") + " --length 30 --seed 5", log) == 0);
  CHECK(run("eval --pred " + q(d.path / "hmm" / "synth_000.labels.csv") + " " + q(d.path / "short" / "synth.csv"),
            log) == 2);
}

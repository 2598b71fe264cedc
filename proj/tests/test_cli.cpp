// Copyright 2026 The bellkc Authors
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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"

namespace bellkc::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigs = fs::path(BELLKC_SOURCE_DIR) / "configs";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bellkc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bellkc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

TEST(ParseNumber, PiExpressions) {
  EXPECT_DOUBLE_EQ(parse_number("0.5"), 0.5);
  EXPECT_DOUBLE_EQ(parse_number("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_number("-pi/4"), -std::numbers::pi / 4);
  EXPECT_DOUBLE_EQ(parse_number("3*pi/8"), 3 * std::numbers::pi / 8);
  EXPECT_DOUBLE_EQ(parse_number("2pi"), 2 * std::numbers::pi);
  EXPECT_THROW(parse_number("pie"), ConfigError);
  EXPECT_THROW(parse_number(""), ConfigError);
  EXPECT_THROW(parse_number("pi/0"), ConfigError);
}

TEST(FlatConfig, NestsAndTypes) {
  const auto j = parse_flat_config(
      "# comment\nmodel.kind = quantum\nsettings.alice.angles = 0, pi/4\nrun.n_trials = 10\n"
      "report.combination = +-++\noutput.dir = ./out\n");
  EXPECT_EQ(j["model"]["kind"], "quantum");
  EXPECT_EQ(j["settings"]["alice"]["angles"].size(), 2u);
  EXPECT_DOUBLE_EQ(j["settings"]["alice"]["angles"][1].get<double>(), std::numbers::pi / 4);
  EXPECT_EQ(j["run"]["n_trials"], 10);
  EXPECT_EQ(j["report"]["combination"], "+-++");
  EXPECT_EQ(j["output"]["dir"], "./out");
  EXPECT_THROW(parse_flat_config("no equals sign\n"), ConfigError);
  EXPECT_THROW(parse_flat_config("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(parse_flat_config("a = 1\na.b = 2\n"), ConfigError);
}

TEST(Config, FlatAndJsonAreEquivalent) {
  const auto flat = load_config(kConfigs / "chsh_quantum.cfg");
  const auto path = fs::temp_directory_path() / "bellkc_equiv.json";
  std::ofstream(path) << flat.source.dump();
  const auto json = load_config(path);
  fs::remove(path);
  EXPECT_EQ(json.source, flat.source);
  EXPECT_EQ(json.model.description_hash(), flat.model.description_hash());
  EXPECT_EQ(flat.n_trials, 1000000u);
}

TEST(Config, BundledConfigsLoad) {
  for (const auto& e : fs::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
  }
}

TEST_F(CliTest, SimulateQuantumWritesArtifacts) {
  const auto r = run({"--out-dir", dir_.string(), "--format", "json", "simulate",
                      (kConfigs / "chsh_quantum.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"events.jsonl", "counts.csv", "report.json", "run_meta.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  const auto report = nlohmann::json::parse(slurp(dir_ / "report.json"));
  const double s = report["estimates"]["S"]["value"];
  const double se = report["estimates"]["S"]["se"];
  EXPECT_NEAR(s, 2 * std::numbers::sqrt2, 5 * se);
  EXPECT_NEAR(report["exact"]["S"].get<double>(), 2 * std::numbers::sqrt2, 1e-12);
  EXPECT_FALSE(report.contains("timestamp_utc"));
  EXPECT_EQ(report["reproducibility_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(nlohmann::json::parse(r.out)["reproducibility_hash"], report["reproducibility_hash"]);
}

TEST_F(CliTest, SimulateLhvUniformNearZero) {
  const auto r = run({"--out-dir", dir_.string(), "--quiet", "simulate", (kConfigs / "chsh_lhv_uniform.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto report = nlohmann::json::parse(slurp(dir_ / "report.json"));
  EXPECT_NEAR(report["estimates"]["S"]["value"].get<double>(), 0.0, 5 * report["estimates"]["S"]["se"].get<double>());
}

TEST_F(CliTest, SimulateIsByteReproducibleAcrossWorkers) {
  const auto cfg = write("small.cfg",
                         "model.kind = quantum\nsettings.alice.angles = 0, pi/4\nsettings.bob.angles = pi/8, 3*pi/8\n"
                         "run.n_trials = 30000\nrun.chunk_size = 1000\nrun.master_seed = 4\n");
  ASSERT_EQ(run({"--out-dir", (dir_ / "w1").string(), "--workers", "1", "simulate", cfg.string()}).code, 0);
  ASSERT_EQ(run({"--out-dir", (dir_ / "w8").string(), "--workers", "8", "simulate", cfg.string()}).code, 0);
  for (const char* f : {"events.jsonl", "counts.csv", "report.json"}) {
    EXPECT_EQ(slurp(dir_ / "w1" / f), slurp(dir_ / "w8" / f)) << f;
  }
  ASSERT_EQ(run({"--out-dir", (dir_ / "s").string(), "--seed", "5", "simulate", cfg.string()}).code, 0);
  EXPECT_NE(slurp(dir_ / "w1" / "events.jsonl"), slurp(dir_ / "s" / "events.jsonl"));
}

TEST_F(CliTest, SimulateCsvEvents) {
  const auto cfg = write("csv.cfg", "model.kind = nonlocal\nrun.n_trials = 100\noutput.events_format = csv\n");
  ASSERT_EQ(run({"--out-dir", dir_.string(), "simulate", cfg.string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "events.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "events.jsonl"));
}

TEST_F(CliTest, ExitCodesAndNoPartialOutputs) {
  const auto out = dir_ / "out";
  const auto malformed = write("bad.cfg", "model.kind = quantum\nthis line is broken\n");
  EXPECT_EQ(run({"--out-dir", out.string(), "simulate", malformed.string()}).code, kExitConfig);
  const auto unknown = write("unknown.cfg", "model.kind = quantum\nmodel.colour = blue\n");
  EXPECT_EQ(run({"--out-dir", out.string(), "simulate", unknown.string()}).code, kExitConfig);
  const auto invalid = write("invalid.cfg", "model.kind = deterministic_lhv\nmodel.a = 1, 3\nmodel.b = 1, 1\n");
  EXPECT_EQ(run({"--out-dir", out.string(), "simulate", invalid.string()}).code, kExitValidation);
  const auto bad_probs = write("probs.cfg", "model.kind = mixed_lhv\nmodel.strategies = uniform\nsettings.alice.probs = 0.5, 0.6\n");
  EXPECT_EQ(run({"--out-dir", out.string(), "simulate", bad_probs.string()}).code, kExitValidation);
  EXPECT_EQ(run({"--out-dir", out.string(), "simulate", (dir_ / "missing.cfg").string()}).code, kExitIo);
  EXPECT_FALSE(fs::exists(out) && !fs::is_empty(out));
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run({"--format", "xml", "lhv-bound"}).code, kExitConfig);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  const auto blocker = write("file", "x");
  EXPECT_EQ(run({"--out-dir", (blocker / "sub").string(), "simulate", (kConfigs / "chsh_signalling.cfg").string()}).code,
            kExitIo);
}

TEST_F(CliTest, OutDirFromEnvironment) {
  const auto env_dir = dir_ / "env";
  ::setenv(kOutDirEnv, env_dir.string().c_str(), 1);
  const auto r = run({"kc-verify", (kConfigs / "single_context.cfg").string()});
  ::unsetenv(kOutDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(env_dir / "kc_report.json"));
}

TEST_F(CliTest, KcVerifyQuantum) {
  const auto r = run({"--out-dir", dir_.string(), "kc-verify", (kConfigs / "chsh_quantum.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("16 atoms"), std::string::npos);
  EXPECT_NE(r.out.find("2.8284271247"), std::string::npos);
  EXPECT_NE(r.out.find("0.7071067812"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir_ / "kc_report.json"));
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["per_context"].size(), 4u);
  EXPECT_EQ(j["mixed_space"]["n_atoms"], 16);
  EXPECT_NEAR(j["chsh"]["S_global"].get<double>(), std::numbers::sqrt2 / 2, 1e-12);
}

TEST_F(CliTest, KcVerifySingleContext) {
  const auto r = run({"--out-dir", dir_.string(), "--format", "json", "kc-verify",
                      (kConfigs / "single_context.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["per_context"].size(), 1u);
  EXPECT_TRUE(j["per_context"][0]["report"]["passed"].get<bool>());
  EXPECT_FALSE(j.contains("chsh"));
}

TEST_F(CliTest, GleasonCheck) {
  const auto r3 = run({"--out-dir", dir_.string(), "--format", "json", "gleason-check", "--dim", "3"});
  ASSERT_EQ(r3.code, 0) << r3.err;
  const auto j3 = nlohmann::json::parse(r3.out);
  EXPECT_TRUE(j3["passed"].get<bool>());
  EXPECT_LE(j3["trace_form"]["fit"]["residual"].get<double>(), 1e-8);
  EXPECT_TRUE(j3.contains("extravalence"));

  const auto r2 = run({"--out-dir", dir_.string(), "gleason-check", "--dim", "2", "--contexts", "100"});
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_NE(r2.out.find("requires dim H >= 3"), std::string::npos);
  const auto j2 = nlohmann::json::parse(slurp(dir_ / "gleason_report.json"));
  EXPECT_TRUE(j2["counterexample"]["additivity"]["passed"].get<bool>());
  EXPECT_GT(j2["counterexample"]["fit"]["residual"].get<double>(), 0.01);

  EXPECT_EQ(run({"--out-dir", dir_.string(), "gleason-check", "--dim", "1"}).code, kExitConfig);
}

TEST_F(CliTest, GleasonCheckWithStateFile) {
  const auto state = write("rho.json", "{\"rho\": [[0.5, 0, 0], [0, 0.25, 0], [0, 0, 0.25]]}");
  const auto r = run({"--out-dir", dir_.string(), "--format", "json", "gleason-check", "--dim", "3", "--state",
                      state.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["state_source"], state.string());
  const auto bad = write("bad.json", "[[0.5, 0.4], [0, 0.5]]");
  EXPECT_EQ(run({"--out-dir", dir_.string(), "gleason-check", "--dim", "2", "--state", bad.string()}).code,
            kExitValidation);
  EXPECT_EQ(run({"--out-dir", dir_.string(), "gleason-check", "--dim", "3", "--state", bad.string()}).code,
            kExitValidation);
}

TEST_F(CliTest, LhvBound) {
  const auto r = run({"lhv-bound"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("= 2\n"), std::string::npos);
  const auto j = nlohmann::json::parse(run({"--format", "json", "lhv-bound"}).out);
  EXPECT_EQ(j["max_abs_s"], 2);
  EXPECT_EQ(j["maximizers"].size(), 8u);

  const auto q = run({"lhv-bound", "--tables", (kConfigs / "tables_quantum_optimal.json").string()});
  EXPECT_EQ(q.out, "nonlocal: violates CHSH, S = 2.8284 (pattern +-++)\n");
  const auto s = run({"lhv-bound", "--tables", (kConfigs / "tables_signalling.json").string()});
  EXPECT_EQ(s.out.rfind("ill-posed: signalling", 0), 0u);
  const auto l = run({"lhv-bound", "--config", (kConfigs / "chsh_lhv_uniform.cfg").string()});
  EXPECT_EQ(l.out.rfind("local:", 0), 0u);
  const auto malformed = write("t.json", "{\"tables\": [[1, 2]]}");
  EXPECT_EQ(run({"lhv-bound", "--tables", malformed.string()}).code, kExitConfig);
}

TEST_F(CliTest, PlotWritesSvg) {
  const auto svg = dir_ / "plots" / "chsh.svg";
  const auto cfg = write("plot.cfg",
                         "model.kind = quantum\nsettings.alice.angles = 0, pi/4\nsettings.bob.angles = pi/8, 3*pi/8\n"
                         "plot.points = 9\nplot.mc_trials = 2000\n");
  const auto r = run({"plot", cfg.string(), svg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(svg);
  EXPECT_EQ(text.rfind("<?xml", 0), 0u);
  EXPECT_NE(text.find("<svg xmlns"), std::string::npos);
  EXPECT_NE(text.find("LHV bound +2"), std::string::npos);
  EXPECT_NE(text.find("quantum max"), std::string::npos);
  EXPECT_EQ(text.find("href"), std::string::npos);
  EXPECT_NE(r.out.find("2.8284"), std::string::npos);

  const auto lhv = run({"plot", (kConfigs / "chsh_lhv_vertex.cfg").string(), (dir_ / "lhv.svg").string()});
  ASSERT_EQ(lhv.code, 0) << lhv.err;
  EXPECT_NE(lhv.out.find("= 2.0000"), std::string::npos);

  const auto empty = write("empty.cfg", "model.kind = quantum\nplot.theta_min = 1\nplot.theta_max = 1\n");
  EXPECT_EQ(run({"plot", empty.string(), (dir_ / "e.svg").string()}).code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir_ / "e.svg"));
}

}  // namespace
}  // namespace bellkc::cli

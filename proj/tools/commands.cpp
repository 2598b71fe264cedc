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

#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <list>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bellkc/gleason.hpp"
#include "bellkc/haar.hpp"
#include "bellkc/harness.hpp"
#include "bellkc/models.hpp"
#include "bellkc/probability_space.hpp"
#include "bellkc/quantum_json.hpp"
#include "config.hpp"
#include "svg_plot.hpp"

namespace bellkc::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kReportSchemaVersion = 1;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string reproducibility_hash(const nlohmann::json& config, std::uint64_t seed) {
  std::uint64_t h = fnv1a("bellkc.report/" + std::to_string(kReportSchemaVersion));
  h = fnv1a(config.dump(), h);
  h = fnv1a(std::to_string(seed), h);
  return hex64(h);
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

/// Files are written next to their destination with a ".partial" suffix and
/// renamed only on commit, so a failed command leaves no artifacts behind.
class StagedFiles {
 public:
  StagedFiles() = default;
  StagedFiles(const StagedFiles&) = delete;
  StagedFiles& operator=(const StagedFiles&) = delete;
  ~StagedFiles() {
    if (committed_) return;
    for (auto& s : streams_) s.close();
    std::error_code ec;
    for (const auto& [partial, final_path] : paths_) fs::remove(partial, ec);
  }

  std::ofstream& open(const fs::path& final_path) {
    fs::path partial = final_path;
    partial += ".partial";
    auto& s = streams_.emplace_back(partial, std::ios::binary | std::ios::trunc);
    if (!s) throw IoError("cannot write '" + final_path.string() + "'");
    paths_.emplace_back(partial, final_path);
    return s;
  }

  void write(const fs::path& final_path, const std::string& content) { open(final_path) << content; }

  void commit() {
    for (auto& s : streams_) {
      s.flush();
      if (!s) throw IoError("write failed");
      s.close();
    }
    for (const auto& [partial, final_path] : paths_) fs::rename(partial, final_path);
    committed_ = true;
  }

 private:
  std::list<std::ofstream> streams_;
  std::vector<std::pair<fs::path, fs::path>> paths_;
  bool committed_ = false;
};

fs::path resolve_out_dir(const GlobalOptions& g, const ExperimentConfig* cfg) {
  if (g.out_dir) return *g.out_dir;
  if (cfg && cfg->output_dir) return *cfg->output_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "bellkc_out";
}

fs::path prepare_out_dir(const GlobalOptions& g, const ExperimentConfig* cfg) {
  const fs::path dir = resolve_out_dir(g, cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

ExperimentConfig load(const GlobalOptions& g, const fs::path& path) {
  auto cfg = load_config(path);
  if (g.seed) cfg.master_seed = *g.seed;
  return cfg;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

/// Hidden-variable branches that reproduce a model's tables in a mixed space.
std::vector<HiddenVariableBranch> branches_for(const OutcomeModel& model) {
  if (const auto* m = std::get_if<MixedLHVModel>(&model.variant())) {
    std::vector<HiddenVariableBranch> out;
    for (const auto& w : m->strategies) {
      ConditionalTables t(model.n_alice(), std::vector<JointTable>(model.n_bob()));
      for (std::size_t x = 0; x < model.n_alice(); ++x)
        for (std::size_t y = 0; y < model.n_bob(); ++y) t[x][y] = w.strategy.table(x, y);
      out.push_back({w.weight, std::move(t)});
    }
    return out;
  }
  return {{1.0, exact_tables(model)}};
}

MixedContextSpace mixed_space_for(const ExperimentConfig& cfg) {
  if (const auto* q = std::get_if<QuantumModel>(&cfg.model.variant())) {
    return build_mixed_context_space(q->rho, cfg.settings);
  }
  const auto branches = branches_for(cfg.model);
  return build_mixed_context_space(branches, cfg.settings);
}

bool is_binary(const OutcomeModel& m) { return m.n_alice() == 2 && m.n_bob() == 2; }

nlohmann::json model_json(const ExperimentConfig& cfg) {
  return {{"kind", to_string(cfg.model.kind())},
          {"description", cfg.model_description},
          {"hash", hex64(cfg.model.description_hash())},
          {"assumptions", cfg.model.flags().to_json()}};
}

nlohmann::json report_envelope(const char* command, const ExperimentConfig& cfg) {
  return {{"schema", "bellkc.report"},
          {"schema_version", kReportSchemaVersion},
          {"bellkc_version", BELLKC_VERSION},
          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
          {"command", command},
          {"config", cfg.source},
          {"master_seed", cfg.master_seed},
          {"reproducibility_hash", reproducibility_hash(cfg.source, cfg.master_seed)}};
}

std::string estimate_text(const Estimate& e) { return fmt("%.5f", e.value) + " ± " + fmt("%.5f", e.se); }

}  // namespace

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOptions& g, const fs::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto started = std::chrono::steady_clock::now();
    const auto cfg = load(g, config_path);
    const fs::path dir = prepare_out_dir(g, &cfg);

    RunSpec spec;
    spec.alice_probs = cfg.settings.alice_probs();
    spec.bob_probs = cfg.settings.bob_probs();
    spec.n_trials = cfg.n_trials;
    spec.master_seed = cfg.master_seed;
    spec.chunk_size = cfg.chunk_size;
    spec.workers = g.workers;

    StagedFiles files;
    const bool csv_events = cfg.events_format == "csv";
    const fs::path events_path = dir / (csv_events ? "events.csv" : "events.jsonl");
    auto& events = files.open(events_path);
    CountsTable counts(cfg.model.n_alice(), cfg.model.n_bob());
    if (csv_events) {
      CsvEventWriter writer(events);
      counts = run_experiment(cfg.model, spec, writer);
    } else {
      JsonlEventWriter writer(events, event_log_header(cfg.master_seed, cfg.chunk_size, cfg.model.description_hash()));
      counts = run_experiment(cfg.model, spec, writer);
    }
    const auto estimates = make_estimate_report(counts, cfg.combination, cfg.z_threshold);

    nlohmann::json exact = nlohmann::json::object();
    nlohmann::json kc = nlohmann::json::object();
    const auto mixed = mixed_space_for(cfg);
    const auto kc_report = verify_kolmogorov(mixed.space());
    kc = {{"mixed_space_atoms", mixed.space().size()}, {"report", kc_report.to_json()}};
    if (is_binary(cfg.model)) {
      exact["S"] = model_chsh(cfg.model, cfg.combination);
      exact["S_global"] = szabo_chsh(mixed, cfg.combination);
    }

    auto report = report_envelope("simulate", cfg);
    report["model"] = model_json(cfg);
    report["counts"] = counts.to_json();
    report["estimates"] = estimates.to_json();
    report["exact"] = exact;
    report["kc"] = kc;
    report["artifacts"] = {{"events", events_path.filename().string()}, {"counts", "counts.csv"}};
    files.write(dir / "counts.csv", counts.to_csv());
    files.write(dir / "report.json", dump(report));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    files.write(dir / "run_meta.json",
                dump({{"command", "simulate"},
                      {"timestamp_utc", utc_timestamp()},
                      {"wall_clock_seconds", seconds},
                      {"workers", g.workers},
                      {"reproducibility_hash", report["reproducibility_hash"]}}));
    files.commit();

    if (g.quiet) return kExitOk;
    if (g.format == OutputFormat::Json) {
      out << dump(report);
    } else if (g.format == OutputFormat::Csv) {
      out << counts.to_csv();
    } else {
      out << "model: " << to_string(cfg.model.kind()) << " (hash " << hex64(cfg.model.description_hash()) << ")\n";
      out << "trials: " << counts.n_total() << "  master_seed: " << cfg.master_seed << "\n";
      for (std::size_t x = 0; x < counts.n_alice(); ++x)
        for (std::size_t y = 0; y < counts.n_bob(); ++y) {
          const auto& e = estimates.correlations[x][y];
          out << "E(" << x << "," << y << ") = " << (e ? estimate_text(*e) : std::string("absent")) << "  (n = "
              << counts.context_total(x, y) << ")\n";
        }
      if (estimates.s) {
        out << "S        = " << estimate_text(*estimates.s) << "  [" << cfg.combination.label() << "; exact "
            << fmt("%.5f", exact["S"].get<double>()) << "]\n";
      }
      if (estimates.s_global) {
        out << "S_global = " << estimate_text(*estimates.s_global) << "  [exact "
            << fmt("%.5f", exact["S_global"].get<double>()) << "; 4*S_global = "
            << fmt("%.5f", 4 * estimates.s_global->value) << "]\n";
      }
      if (estimates.s_max_over_patterns) {
        out << "max over 8 patterns: S = " << estimate_text(estimates.s_max_over_patterns->second) << "  ["
            << estimates.s_max_over_patterns->first.label() << "]\n";
      }
      std::size_t flagged = 0;
      for (const auto& d : estimates.nosig) flagged += d.flagged;
      out << "no-signalling: " << estimates.nosig.size() << " comparisons, " << flagged << " flagged at |z| > "
          << cfg.z_threshold << "\n";
      for (const auto& note : estimates.notes) out << "note: " << note << "\n";
      out << "wrote " << events_path.string() << ", " << (dir / "counts.csv").string() << ", "
          << (dir / "report.json").string() << "\n";
    }
    return kExitOk;
  });
}

int cmd_kc_verify(const GlobalOptions& g, const fs::path& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load(g, config_path);
    const fs::path dir = prepare_out_dir(g, &cfg);
    bool all_passed = true;

    nlohmann::json contexts = nlohmann::json::array();
    const auto* q = std::get_if<QuantumModel>(&cfg.model.variant());
    for (std::size_t x = 0; x < cfg.model.n_alice(); ++x) {
      for (std::size_t y = 0; y < cfg.model.n_bob(); ++y) {
        std::vector<std::string> labels{"a+b+", "a+b-", "a-b+", "a-b-"};
        const auto space =
            q ? build_single_context_space(q->rho,
                                           joint_context(polarization_observable(cfg.settings.alice[x].angle),
                                                         polarization_observable(cfg.settings.bob[y].angle)),
                                           labels)
              : [&] {
                  const auto t = exact_joint_table(cfg.model, x, y);
                  return ClassicalProbabilitySpace::make(labels, {t.begin(), t.end()});
                }();
        const auto report = verify_kolmogorov(space);
        all_passed = all_passed && report.passed();
        contexts.push_back({{"x_index", x},
                            {"y_index", y},
                            {"alice_angle", cfg.settings.alice[x].angle},
                            {"bob_angle", cfg.settings.bob[y].angle},
                            {"space", space.to_json()},
                            {"report", report.to_json()}});
      }
    }
    const auto mixed = mixed_space_for(cfg);
    const auto mixed_report = verify_kolmogorov(mixed.space());
    all_passed = all_passed && mixed_report.passed();

    auto report = report_envelope("kc-verify", cfg);
    report["model"] = model_json(cfg);
    report["per_context"] = contexts;
    report["mixed_space"] = {{"n_atoms", mixed.space().size()},
                             {"space", mixed.space().to_json()},
                             {"report", mixed_report.to_json()}};
    std::optional<double> s;
    std::optional<double> s_global;
    if (is_binary(cfg.model)) {
      s = q ? per_context_chsh(q->rho, cfg.settings, cfg.combination) : model_chsh(cfg.model, cfg.combination);
      s_global = szabo_chsh(mixed, cfg.combination);
      report["chsh"] = {{"combination", cfg.combination.label()},
                        {"S_per_context", *s},
                        {"S_global", *s_global},
                        {"S_global_times_4", 4 * *s_global},
                        {"note",
                         "S_global normalizes every correlation by all counts; with uniform binary settings "
                         "S_global = S/4. Its classical reference is 2 read literally or 1/2 after the same "
                         "rescaling; both raw and x4 values are reported."}};
    }
    report["passed"] = all_passed;
    StagedFiles files;
    files.write(dir / "kc_report.json", dump(report));
    files.commit();

    if (!g.quiet) {
      if (g.format == OutputFormat::Json) {
        out << dump(report);
      } else if (g.format == OutputFormat::Csv) {
        out << mixed.space().to_text();
      } else {
        for (const auto& c : contexts) {
          out << "context (" << c["x_index"].get<std::size_t>() << "," << c["y_index"].get<std::size_t>()
              << "): " << c["report"]["n_atoms"].get<std::size_t>() << " atoms, "
              << (c["report"]["passed"].get<bool>() ? "passed" : "FAILED") << " (worst violation "
              << fmt("%.3g", c["report"]["worst_violation"].get<double>()) << ")\n";
        }
        out << "mixed-context space: " << mixed.space().size() << " atoms, "
            << (mixed_report.passed() ? "passed" : "FAILED") << " (" << mixed_report.n_additivity_checks
            << " additivity checks, worst violation " << fmt("%.3g", mixed_report.worst_violation) << ")\n";
        if (s) {
          out << "S (per-context normalization)  = " << fmt("%.10f", *s) << "\n";
          out << "S_global (all-count normalization) = " << fmt("%.10f", *s_global) << "  (x4 = "
              << fmt("%.10f", 4 * *s_global) << ")\n";
        }
        out << "wrote " << (dir / "kc_report.json").string() << "\n";
      }
    }
    return all_passed ? kExitOk : kExitFailed;
  });
}

int cmd_gleason_check(const GlobalOptions& g, const GleasonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const std::uint64_t seed = g.seed.value_or(1);
    std::optional<DensityOperator> rho;
    std::string state_source = "random";
    if (opts.state_file) {
      std::ifstream in(*opts.state_file);
      if (!in) throw IoError("cannot read state file '" + opts.state_file->string() + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
        if (j.is_object() && j.contains("rho")) j = j.at("rho");
        rho = DensityOperator::from_matrix(operator_from_json(j));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("state file: ") + e.what());
      } catch (const InvariantError& e) {
        throw ValidationError(std::string("state file: ") + e.what());
      }
      if (rho->dim() != opts.dim) {
        throw ConfigError("state file has dim " + std::to_string(rho->dim()) + " but --dim is " +
                          std::to_string(opts.dim));
      }
      state_source = opts.state_file->string();
    }
    if (opts.dim < 2) throw ConfigError("gleason-check: dim must be >= 2 (got " + std::to_string(opts.dim) + ")");
    if (opts.n_contexts < 1) throw ConfigError("gleason-check: --contexts must be >= 1");
    const Eigen::Index dim = opts.dim;
    if (!rho) {
      Stream rng(derive_seed(seed, 0xD0));
      rho = random_density_operator(dim, rng);
    }
    const fs::path dir = prepare_out_dir(g, nullptr);

    const auto m = FrameFunction::trace_form(*rho);
    const auto additivity = check_orthogonal_additivity(m, opts.n_contexts, dim, derive_seed(seed, 1));
    const std::size_t n_samples = std::max<std::size_t>(30, 3 * static_cast<std::size_t>(dim * dim));
    const auto samples = sample_frame_function(m, n_samples, derive_seed(seed, 2));
    const auto fit = fit_trace_form(samples, dim);
    const double recovery = max_abs(Operator(fit.rho_estimate.matrix() - rho->matrix()));
    bool passed = additivity.passed && fit.residual <= 1e-8 && recovery <= 1e-8;

    nlohmann::json report = {{"schema", "bellkc.gleason"},
                             {"schema_version", kReportSchemaVersion},
                             {"dim", dim},
                             {"seed", seed},
                             {"n_contexts", opts.n_contexts},
                             {"state_source", state_source},
                             {"state", operator_to_json(rho->matrix())}};
    report["trace_form"] = {{"additivity", additivity.to_json()},
                            {"fit", fit.to_json()},
                            {"recovery_error_max_norm", recovery}};
    std::vector<std::string> notes;
    if (dim >= 3) {
      Stream rng(derive_seed(seed, 3));
      const auto p = Projector::onto(haar_unitary(dim, rng).col(0));
      const auto extra = extravalence_check(m, p, 100, derive_seed(seed, 4));
      report["extravalence"] = extra.to_json();
      passed = passed && extra.passed;
    } else {
      const auto cex = dim2_counterexample();
      const auto cex_add = check_orthogonal_additivity(cex, opts.n_contexts, 2, derive_seed(seed, 5));
      const auto cex_samples = sample_frame_function(cex, 200, derive_seed(seed, 6));
      const auto cex_fit = fit_trace_form(cex_samples, 2);
      report["counterexample"] = {{"rule", "m(P_n) = (1 + n_z^3)/2"},
                                  {"additivity", cex_add.to_json()},
                                  {"fit", cex_fit.to_json()},
                                  {"not_trace_form", cex_fit.residual > 0.01}};
      notes.push_back(
          "Gleason's theorem requires dim H >= 3: in dim 2 every context is {P, I-P}, so additivity only "
          "asks m(P) + m(I-P) = 1. The cubic Bloch rule satisfies this on every context yet no density "
          "operator reproduces it.");
      passed = passed && cex_add.passed && cex_fit.residual > 0.01;
    }
    report["notes"] = notes;
    report["passed"] = passed;
    StagedFiles files;
    files.write(dir / "gleason_report.json", dump(report));
    files.commit();

    if (!g.quiet) {
      if (g.format == OutputFormat::Json) {
        out << dump(report);
      } else {
        out << "dim " << dim << ", " << additivity.n_contexts_tested << " random contexts\n";
        out << "trace form: additivity " << (additivity.passed ? "passed" : "FAILED") << " (worst violation "
            << fmt("%.3g", additivity.worst_violation) << ")\n";
        out << "trace-form fit: residual " << fmt("%.3g", fit.residual) << ", recovery error "
            << fmt("%.3g", recovery) << " (" << fit.n_samples << " samples)\n";
        if (report.contains("extravalence")) {
          out << "extravalence: spread " << fmt("%.3g", report["extravalence"]["spread"].get<double>()) << " over "
              << report["extravalence"]["n_contexts"].get<std::size_t>() << " intertwined contexts\n";
        }
        if (report.contains("counterexample")) {
          const auto& c = report["counterexample"];
          out << "counterexample (1 + n_z^3)/2: additivity "
              << (c["additivity"]["passed"].get<bool>() ? "passed" : "FAILED") << " (worst violation "
              << fmt("%.3g", c["additivity"]["worst_violation"].get<double>()) << "), trace-form fit residual "
              << fmt("%.4f", c["fit"]["residual"].get<double>()) << "\n";
        }
        for (const auto& n : notes) out << "note: " << n << "\n";
        out << (passed ? "passed" : "FAILED") << "; wrote " << (dir / "gleason_report.json").string() << "\n";
      }
    }
    return passed ? kExitOk : kExitFailed;
  });
}

namespace {

ConditionalTables tables_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("tables") : j;
  if (!arr.is_array() || arr.size() != 2) throw ConfigError("tables: expected a 2x2 array of tables");
  ConditionalTables t(2, std::vector<JointTable>(2));
  for (std::size_t x = 0; x < 2; ++x) {
    if (!arr[x].is_array() || arr[x].size() != 2) throw ConfigError("tables: expected a 2x2 array of tables");
    for (std::size_t y = 0; y < 2; ++y) {
      const auto& cell = arr[x][y];
      if (cell.is_object()) {
        t[x][y] = {cell.at("++").get<double>(), cell.at("+-").get<double>(), cell.at("-+").get<double>(),
                   cell.at("--").get<double>()};
      } else {
        const auto v = cell.get<std::vector<double>>();
        if (v.size() != 4) throw ConfigError("tables: each table needs 4 entries (++, +-, -+, --)");
        t[x][y] = {v[0], v[1], v[2], v[3]};
      }
    }
  }
  return t;
}

}  // namespace

int cmd_lhv_bound(const GlobalOptions& g, const LhvOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (opts.tables && opts.config) throw ConfigError("lhv-bound: give --tables or --config, not both");
    if (!opts.tables && !opts.config) {
      const auto bound = lhv_max_chsh();
      nlohmann::json vertices = nlohmann::json::array();
      for (auto i : bound.maximizers) {
        const auto& s = bound.strategies[i];
        vertices.push_back({{"index", i}, {"strategy", s.label()}, {"a", s.a_of_x}, {"b", s.b_of_y}, {"S", s.chsh()}});
      }
      const nlohmann::json j = {{"max_abs_s", bound.max_abs_s},
                                {"n_strategies", bound.strategies.size()},
                                {"n_patterns", 8},
                                {"combination", ChshCombination::standard().label()},
                                {"maximizers", vertices}};
      if (g.quiet) return kExitOk;
      if (g.format == OutputFormat::Json) {
        out << dump(j);
      } else {
        out << "max |S| over " << bound.strategies.size() << " deterministic strategies and 8 sign patterns = "
            << bound.max_abs_s << "\n";
        out << "strategies reaching S = +" << bound.max_abs_s << " for " << ChshCombination::standard().label()
            << " (a(x)a(x')|b(y)b(y')):\n";
        for (const auto& v : vertices) {
          out << "  #" << v["index"].get<std::size_t>() << "  " << v["strategy"].get<std::string>() << "\n";
        }
      }
      return kExitOk;
    }

    ConditionalTables tables;
    if (opts.tables) {
      std::ifstream in(*opts.tables);
      if (!in) throw IoError("cannot read tables file '" + opts.tables->string() + "'");
      try {
        tables = tables_from_json(nlohmann::json::parse(in));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("tables file: ") + e.what());
      }
    } else {
      const auto cfg = load(g, *opts.config);
      if (!is_binary(cfg.model)) throw ValidationError("lhv-bound: the model needs two settings per side");
      tables = exact_tables(cfg.model);
    }
    PolytopeVerdict verdict;
    try {
      verdict = local_polytope_membership(tables);
    } catch (const InvariantError& e) {
      throw ValidationError(e.what());
    }
    nlohmann::json j = {{"max_S", verdict.max_s}, {"best_pattern", verdict.best.label()}};
    std::string line;
    switch (verdict.status) {
      case PolytopeVerdict::Status::Local:
        j["verdict"] = "local";
        line = "local: satisfies all eight CHSH inequalities (max S = " + fmt("%.4f", verdict.max_s) + ", pattern " +
               verdict.best.label() + ")";
        break;
      case PolytopeVerdict::Status::Nonlocal:
        j["verdict"] = "nonlocal";
        j["witness"] = {{"pattern", verdict.witness->label()}, {"S", verdict.max_s}};
        line = "nonlocal: violates CHSH, S = " + fmt("%.4f", verdict.max_s) + " (pattern " + verdict.witness->label() +
               ")";
        break;
      case PolytopeVerdict::Status::Signalling:
        j["verdict"] = "signalling";
        j["signalling_delta"] = verdict.signalling_delta;
        line = "ill-posed: signalling (marginal difference " + fmt("%.4f", verdict.signalling_delta) +
               "); local-polytope membership needs no-signalling tables";
        break;
    }
    if (!g.quiet) out << (g.format == OutputFormat::Json ? dump(j) : line + "\n");
    return kExitOk;
  });
}

int cmd_plot(const GlobalOptions& g, const fs::path& config_path, const fs::path& svg_path, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto cfg = load(g, config_path);
    const auto& plot = cfg.plot;
    if (!(plot.theta_max > plot.theta_min) || plot.points < 2) {
      throw ConfigError("plot: empty sweep range (need plot.theta_max > plot.theta_min and plot.points >= 2)");
    }
    if (plot.mc_trials < 1) throw ConfigError("plot: plot.mc_trials must be >= 1");
    if (!is_binary(cfg.model)) throw ValidationError("plot: the model needs two settings per side");
    constexpr double pi = std::numbers::pi;
    const auto* q = std::get_if<QuantumModel>(&cfg.model.variant());

    auto mc_run = [&](const OutcomeModel& model, std::uint64_t stream) {
      RunSpec spec;
      spec.alice_probs.assign(model.n_alice(), 1.0 / static_cast<double>(model.n_alice()));
      spec.bob_probs.assign(model.n_bob(), 1.0 / static_cast<double>(model.n_bob()));
      spec.n_trials = plot.mc_trials;
      spec.master_seed = derive_seed(cfg.master_seed, stream);
      spec.chunk_size = cfg.chunk_size;
      spec.workers = g.workers;
      return run_experiment(model, spec);
    };

    Panel corr{"Correlation E(delta)", "delta = b - a (rad)", "E", 0.0, pi, -1.1, 1.1, {}, {}};
    if (q) {
      Series exact{"exact", "#1f77b4", {}, {}, {}, false};
      for (int i = 0; i <= 180; ++i) {
        const double d = pi * i / 180.0;
        exact.x.push_back(d);
        exact.y.push_back(correlation(q->rho, polarization_observable(0.0), polarization_observable(d)));
      }
      Series mc{"Monte Carlo", "#d62728", {}, {}, {}, true};
      for (int i = 0; i <= 12; ++i) {
        const double d = pi * i / 12.0;
        const auto counts = mc_run(quantum_model(q->rho, {0.0}, {d}), 1000 + static_cast<std::uint64_t>(i));
        const auto e = estimate_correlations(counts)[0][0];
        mc.x.push_back(d);
        mc.y.push_back(e->value);
        mc.err.push_back(e->se);
      }
      corr.series = {exact, mc};
    } else {
      corr.title = "Correlation per context (model has no angle dependence)";
      corr.x_label = "context index 2x + y";
      corr.x_min = -0.5;
      corr.x_max = 3.5;
      Series exact{"exact", "#1f77b4", {}, {}, {}, true};
      Series mc{"Monte Carlo", "#d62728", {}, {}, {}, true};
      const auto counts = mc_run(cfg.model, 999);
      const auto e = estimate_correlations(counts);
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
          const double pos = static_cast<double>(2 * x + y);
          exact.x.push_back(pos - 0.08);
          exact.y.push_back(table_correlation(exact_joint_table(cfg.model, x, y)));
          mc.x.push_back(pos + 0.08);
          mc.y.push_back(e[x][y] ? e[x][y]->value : 0.0);
          mc.err.push_back(e[x][y] ? e[x][y]->se : 0.0);
        }
      corr.series = {exact, mc};
    }

    Panel sweep{"CHSH S(theta) with a = {0, 2 theta}, b = {theta, 3 theta}", "theta (rad)", "S", plot.theta_min,
                plot.theta_max, -3.0, 3.0, {}, {}};
    Series s_exact{"exact", "#1f77b4", {}, {}, {}, q == nullptr};
    Series s_mc{"Monte Carlo", "#d62728", {}, {}, {}, true};
    double best_abs = 0.0;
    double best_theta = plot.theta_min;
    for (int i = 0; i < plot.points; ++i) {
      const double theta = plot.theta_min + (plot.theta_max - plot.theta_min) * i / (plot.points - 1);
      const OutcomeModel model = q ? quantum_model(q->rho, {0.0, 2 * theta}, {theta, 3 * theta}) : cfg.model;
      const double s = model_chsh(model, cfg.combination);
      const auto counts = mc_run(model, static_cast<std::uint64_t>(i));
      const auto est = chsh_estimate(estimate_correlations(counts), cfg.combination);
      s_exact.x.push_back(theta);
      s_exact.y.push_back(s);
      s_mc.x.push_back(theta);
      s_mc.y.push_back(est.value);
      s_mc.err.push_back(est.se);
      if (std::abs(s) > best_abs) {
        best_abs = std::abs(s);
        best_theta = theta;
      }
    }
    const double y_lim = std::max(3.0, best_abs + 0.4);
    sweep.y_min = -y_lim;
    sweep.y_max = y_lim;
    sweep.series = {s_exact, s_mc};
    sweep.references = {{2.0, "LHV bound +2", "#2ca02c"},
                        {-2.0, "LHV bound -2", "#2ca02c"},
                        {2 * std::numbers::sqrt2, "quantum max +2sqrt2", "#9467bd"},
                        {-2 * std::numbers::sqrt2, "quantum max -2sqrt2", "#9467bd"}};

    const fs::path parent = svg_path.parent_path();
    if (!parent.empty()) {
      std::error_code ec;
      fs::create_directories(parent, ec);
      if (ec) throw IoError("cannot create '" + parent.string() + "': " + ec.message());
    }
    StagedFiles files;
    files.write(svg_path, render_svg({corr, sweep}));
    files.commit();
    if (!g.quiet) {
      out << "max |S| (exact) over the sweep = " << fmt("%.4f", best_abs) << " at theta = " << fmt("%.4f", best_theta)
          << "\nwrote " << svg_path.string() << "\n";
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kolmogorov spaces, CHSH simulation and frame-function checks", "bellkc"};
  app.fallthrough();
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "text";
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  auto* out_opt = app.add_option("--out-dir", out_dir, std::string("Output directory (default: config, then $") +
                                                            kOutDirEnv + ", then ./bellkc_out)");
  app.add_option("--format", format, "Summary format on stdout")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_flag("--quiet", g.quiet, "Print nothing on success");
  app.add_option("--workers", g.workers, "Worker threads for trial generation")->check(CLI::Range(1u, 256u));

  std::string config;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo Bell test from a config");
  simulate->add_option("config", config, "Config file")->required();
  auto* kc = app.add_subcommand("kc-verify", "Build and verify per-context and mixed-context probability spaces");
  kc->add_option("config", config, "Config file")->required();
  GleasonOptions gopts;
  std::string state_file;
  auto* gleason = app.add_subcommand("gleason-check", "Check frame-function hypotheses numerically");
  gleason->add_option("--dim", gopts.dim, "Hilbert space dimension");
  gleason->add_option("--contexts", gopts.n_contexts, "Number of random contexts");
  auto* state_opt = gleason->add_option("--state", state_file, "Density operator JSON file");
  LhvOptions lopts;
  std::string tables_file;
  std::string lhv_config;
  auto* lhv = app.add_subcommand("lhv-bound", "Exhaustive LHV bound, or local-polytope membership of tables");
  auto* tables_opt = lhv->add_option("--tables", tables_file, "Four conditional tables (JSON)");
  auto* lhv_config_opt = lhv->add_option("--config", lhv_config, "Take the tables from a config's model");
  std::string svg;
  auto* plot = app.add_subcommand("plot", "Correlation curve and CHSH sweep as SVG");
  plot->add_option("config", config, "Config file")->required();
  plot->add_option("output", svg, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (*out_opt) g.out_dir = out_dir;
  g.format = format == "json" ? OutputFormat::Json : (format == "csv" ? OutputFormat::Csv : OutputFormat::Text);

  if (*simulate) return cmd_simulate(g, config, out, err);
  if (*kc) return cmd_kc_verify(g, config, out, err);
  if (*gleason) {
    if (*state_opt) gopts.state_file = state_file;
    return cmd_gleason_check(g, gopts, out, err);
  }
  if (*lhv) {
    if (*tables_opt) lopts.tables = tables_file;
    if (*lhv_config_opt) lopts.config = lhv_config;
    return cmd_lhv_bound(g, lopts, out, err);
  }
  if (*plot) return cmd_plot(g, config, svg, out, err);
  return kExitConfig;
}

}  // namespace bellkc::cli

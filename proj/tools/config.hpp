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

#pragma once

// Experiment configuration.
//
// Two equivalent encodings are accepted. The flat text format has one
// `key = value` per line, `#` comments, dotted keys for nesting, and
// comma-separated lists:
//
//     model.kind = quantum
//     model.state = photon_pair
//     settings.alice.angles = 0, pi/4
//     settings.bob.angles = pi/8, 3*pi/8
//     run.n_trials = 1000000
//
// Numbers may be written as multiples of pi ("3*pi/8", "-pi/4"). A file with
// a .json extension holds the same keys as nested objects.
//
// Keys:
//   model.kind              quantum | deterministic_lhv | mixed_lhv |
//                           superdeterministic | nonlocal
//   model.state             photon_pair | maximally_mixed | product_hh (quantum)
//   model.rho               operator as [[re, im], ...] rows (quantum, JSON only)
//   model.a, model.b        ±1 responses (deterministic_lhv)
//   model.strategies        "uniform" or a list of {a, b, weight} (mixed_lhv)
//   model.example           "s4" (superdeterministic)
//   model.rule              pr_box | signalling_control (nonlocal)
//   model.pattern           CHSH sign pattern for pr_box, default "+-++"
//   settings.{alice,bob}.angles   radians; default 0, 1, ... for non-quantum
//   settings.{alice,bob}.probs    default uniform
//   run.n_trials, run.master_seed, run.chunk_size
//   output.dir, output.events_format (jsonl | csv)
//   report.combination (default "+-++"), report.z_threshold (default 5)
//   plot.theta_min, plot.theta_max, plot.points, plot.mc_trials

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bellkc/chsh.hpp"
#include "bellkc/models.hpp"
#include "bellkc/probability_space.hpp"

namespace bellkc::cli {

/// Malformed or incomplete configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Configuration parsed but the model or settings are invalid (exit code 3).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

struct PlotOptions {
  double theta_min = 0.0;
  double theta_max = 1.5707963267948966;
  int points = 33;
  std::uint64_t mc_trials = 20000;
};

struct ExperimentConfig {
  nlohmann::json source;  // canonical nested form, echoed in reports
  nlohmann::json model_description;
  OutcomeModel model;
  SettingsSpec settings;
  std::uint64_t n_trials = 100000;
  std::uint64_t master_seed = 1;
  std::uint64_t chunk_size = 65536;
  std::optional<std::string> output_dir{};
  std::string events_format = "jsonl";
  ChshCombination combination{};
  double z_threshold = 5.0;
  PlotOptions plot{};
};

/// Parses "0.5", "-pi/4", "3*pi/8", "2pi". Throws ConfigError.
double parse_number(std::string_view text);

/// Flat key-value text to the nested JSON form.
nlohmann::json parse_flat_config(std::string_view text);

ExperimentConfig config_from_json(const nlohmann::json& source);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Density operator for a named preset (photon_pair, maximally_mixed, product_hh).
DensityOperator state_preset(const std::string& name);

}  // namespace bellkc::cli

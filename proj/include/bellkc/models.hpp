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

// Outcome models for a two-party, two-outcome Bell test: quantum (state plus
// per-context Born tables), local deterministic and mixed hidden variables,
// a superdeterministic model and nonlocal rules. Models are immutable values;
// randomness is always supplied by the caller.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bellkc/chsh.hpp"
#include "bellkc/probability_space.hpp"
#include "bellkc/quantum.hpp"
#include "bellkc/rng.hpp"

namespace bellkc {

enum class ModelKind { Quantum, DeterministicLHV, MixedLHV, Superdeterministic, Nonlocal };

std::string to_string(ModelKind kind);

/// Local response functions a(x), b(y) ∈ {±1}.
struct DeterministicStrategy {
  std::vector<int> a_of_x;
  std::vector<int> b_of_y;

  void validate() const;
  JointTable table(std::size_t x, std::size_t y) const;
  /// Integer CHSH value Σ sign·a(x)b(y) (two settings per side).
  int chsh(const ChshCombination& combination = ChshCombination::standard()) const;
  /// Signs as "a0a1|b0b1", e.g. "+-|++".
  std::string label() const;
  DeterministicStrategy flipped() const;
  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

struct WeightedStrategy {
  DeterministicStrategy strategy;
  double weight = 0.0;
};

struct MixedLHVModel {
  std::vector<WeightedStrategy> strategies;
  void validate() const;
};

/// λ drawn from a distribution that depends on the settings (x, y).
struct SuperdeterministicModel {
  /// conditional_lambda[x][y] is a distribution over strategies.
  std::vector<std::vector<std::vector<WeightedStrategy>>> conditional_lambda;
  void validate() const;
  /// True when the λ distribution differs between some settings pairs.
  bool lambda_depends_on_settings() const;
};

/// Rules with shared randomness r = ±1 (uniform) and outputs that may read
/// the remote setting.
struct NonlocalModel {
  enum class Rule {
    /// a = r; b = pattern.sign[x][y]·r.
    PrBox,
    /// a = r; b = +1 if x = 0 else −1. Observable signalling, negative control.
    SignallingControl,
  };
  Rule rule = Rule::PrBox;
  /// E(x, y) of the PR box.
  ChshCombination pattern = ChshCombination::standard();
  void validate() const;
};

/// Quantum state measured by polarizers at the given angles. Tables exist
/// only per context (x, y); no joint over all settings is ever formed.
struct QuantumModel {
  DensityOperator rho;
  std::vector<double> alice_angles;
  std::vector<double> bob_angles;
  ConditionalTables tables;  // [x][y], one Born table per context
};

/// Which assumption of Bell's theorem a model gives up.
struct AssumptionFlags {
  bool measurement_independence_violated = false;
  bool parameter_independence_violated = false;
  bool outcome_independence_violated = false;
  nlohmann::json to_json() const;
};

class OutcomeModel {
 public:
  using Variant = std::variant<QuantumModel, DeterministicStrategy, MixedLHVModel,
                               SuperdeterministicModel, NonlocalModel>;

  /// Validates the parameters; throws InvariantError.
  explicit OutcomeModel(Variant v);

  ModelKind kind() const noexcept;
  const Variant& variant() const noexcept { return v_; }
  std::size_t n_alice() const noexcept;
  std::size_t n_bob() const noexcept;
  AssumptionFlags flags() const;

  nlohmann::json to_json() const;
  static OutcomeModel from_json(const nlohmann::json& j);
  /// FNV-1a over the canonical JSON description.
  std::uint64_t description_hash() const;

 private:
  Variant v_;
};

OutcomeModel quantum_model(const DensityOperator& rho, std::vector<double> alice_angles,
                           std::vector<double> bob_angles);

/// P(ab|xy); throws DomainError for settings outside the model.
JointTable exact_joint_table(const OutcomeModel& model, std::size_t x, std::size_t y);
ConditionalTables exact_tables(const OutcomeModel& model);

struct Outcome {
  int a = 1;
  int b = 1;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

Outcome sample_trial(const OutcomeModel& model, std::size_t x, std::size_t y, Stream& rng);

/// All 16 strategies for two settings per side, ordered lexicographically by
/// (a(x), a(x'), b(y), b(y')) with +1 before −1.
std::vector<DeterministicStrategy> enumerate_deterministic_strategies(std::size_t n_alice = 2,
                                                                      std::size_t n_bob = 2);

MixedLHVModel uniform_lhv_mixture();

struct LhvBound {
  int max_abs_s = 0;  // over all strategies and all eight patterns
  /// Strategy indices reaching S = +max for the standard combination.
  std::vector<std::size_t> maximizers;
  std::vector<DeterministicStrategy> strategies;
};

/// Exhaustive integer maximum of |S| over deterministic strategies.
LhvBound lhv_max_chsh();

/// CHSH value of a model's exact tables.
double model_chsh(const OutcomeModel& model,
                  const ChshCombination& combination = ChshCombination::standard());
double tables_chsh(const ConditionalTables& tables,
                   const ChshCombination& combination = ChshCombination::standard());

struct PolytopeVerdict {
  enum class Status { Local, Nonlocal, Signalling };
  Status status = Status::Local;
  /// Largest S over the eight patterns and the pattern reaching it.
  double max_s = 0.0;
  ChshCombination best;
  /// Present when nonlocal.
  std::optional<ChshCombination> witness;
  /// Present when signalling: largest marginal difference across remote settings.
  double signalling_delta = 0.0;
};

/// Whether one distribution over the 16 deterministic strategies reproduces
/// all four tables. Positivity, normalization and no-signalling are checked
/// first; the eight CHSH inequalities then decide membership.
PolytopeVerdict local_polytope_membership(const ConditionalTables& tables, double tol = 1e-9);

/// λ depends on (x, y): per settings pair, an equal mixture of a strategy
/// realizing sign[x][y] for a(x)b(y) and its global flip. Reaches S = 4 with
/// no-signalling observable tables.
SuperdeterministicModel superdeterministic_s4_example(
    const ChshCombination& combination = ChshCombination::standard());

/// PR box with E(x, y) = combination.sign[x][y], so S = 4 for that combination.
NonlocalModel pr_box(const ChshCombination& combination = ChshCombination::standard());

}  // namespace bellkc

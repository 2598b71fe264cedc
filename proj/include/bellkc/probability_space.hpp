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

// Classical (Kolmogorov) probability spaces built from quantum data: one per
// measurement context, and one over a random mixture of contexts where the
// settings themselves are part of the sample point.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellkc/chsh.hpp"
#include "bellkc/quantum.hpp"

namespace bellkc {

/// Tolerance for classical distributions (normalization, additivity).
inline constexpr double kSpaceTol = 1e-12;

struct Setting {
  double angle = 0.0;  // radians
  double prob = 0.0;
};

/// Setting choices and their probabilities on each side.
struct SettingsSpec {
  std::vector<Setting> alice;
  std::vector<Setting> bob;

  static SettingsSpec uniform(const std::vector<double>& alice_angles,
                              const std::vector<double>& bob_angles);

  /// Throws InvariantError unless both sides are valid distributions.
  void validate() const;
  bool is_binary() const noexcept { return alice.size() == 2 && bob.size() == 2; }

  std::vector<double> alice_angles() const;
  std::vector<double> bob_angles() const;
  std::vector<double> alice_probs() const;
  std::vector<double> bob_probs() const;
};

/// Uniform settings at a ∈ {0, π/4}, b ∈ {π/8, 3π/8}: the angle set that
/// maximizes S for the photon-pair state.
SettingsSpec chsh_optimal_settings();

/// Finite sample space with the full power set as event algebra.
class ClassicalProbabilitySpace {
 public:
  /// Validates positivity and normalization (within kSpaceTol) and stores the
  /// distribution exactly renormalized. Labels must be distinct.
  static ClassicalProbabilitySpace make(std::vector<std::string> atoms, std::vector<double> probs);

  /// Stores the table as given. For checking foreign data with
  /// verify_kolmogorov.
  static ClassicalProbabilitySpace unchecked(std::vector<std::string> atoms,
                                             std::vector<double> probs);

  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// P(event) for an event given as atom indices.
  double probability(std::span<const std::size_t> event) const;

  /// Two-column text table: label, tab, probability (%.17g).
  std::string to_text() const;
  nlohmann::json to_json() const;

 private:
  ClassicalProbabilitySpace(std::vector<std::string> atoms, std::vector<double> probs)
      : atoms_(std::move(atoms)), probs_(std::move(probs)) {}
  std::vector<std::string> atoms_;
  std::vector<double> probs_;
};

/// Sample point (x, a, y, b) of a mixed-context space.
struct MixedAtom {
  std::size_t x_index = 0;
  int a = 1;
  std::size_t y_index = 0;
  int b = 1;
  friend bool operator==(const MixedAtom&, const MixedAtom&) = default;
};

/// Label like "x0[0.785398163]a+ y1[1.178097245]b-".
std::string mixed_atom_label(const MixedAtom& atom, double alice_angle, double bob_angle);

/// A ClassicalProbabilitySpace whose atoms are (x, a, y, b) tuples.
class MixedContextSpace {
 public:
  MixedContextSpace(ClassicalProbabilitySpace space, std::vector<MixedAtom> keys,
                    std::size_t n_alice, std::size_t n_bob);

  /// Recovers the tuple structure from atom labels; throws InvariantError on
  /// labels that do not parse or repeat a tuple.
  static MixedContextSpace from_space(const ClassicalProbabilitySpace& space);

  const ClassicalProbabilitySpace& space() const noexcept { return space_; }
  const std::vector<MixedAtom>& keys() const noexcept { return keys_; }
  std::size_t n_alice() const noexcept { return n_alice_; }
  std::size_t n_bob() const noexcept { return n_bob_; }

  /// P(x, a, y, b); zero for tuples not present.
  double prob(std::size_t x, int a, std::size_t y, int b) const;
  /// True when every (x, a, y, b) of an n_alice × n_bob × 2 × 2 grid is an
  /// atom exactly once.
  bool is_complete_grid() const noexcept;

 private:
  ClassicalProbabilitySpace space_;
  std::vector<MixedAtom> keys_;
  std::size_t n_alice_;
  std::size_t n_bob_;
};

/// P(ab|xy) for every settings pair, indexed [x][y].
using ConditionalTables = std::vector<std::vector<JointTable>>;

/// One value of the hidden variable: its weight P(λ) and P(ab|xyλ).
struct HiddenVariableBranch {
  double weight = 1.0;
  ConditionalTables tables;
};

/// One atom per projector; prob_i = Tr(ρ P_i). Default labels are "P0", "P1", ...
ClassicalProbabilitySpace build_single_context_space(const DensityOperator& rho, const Context& c);
ClassicalProbabilitySpace build_single_context_space(const DensityOperator& rho, const Context& c,
                                                     std::vector<std::string> labels);

/// P(x,a,y,b) = Σ_λ P(ab|xyλ) P(λ) P(x) P(y) over a weighted list of branches.
MixedContextSpace build_mixed_context_space(std::span<const HiddenVariableBranch> branches,
                                            const SettingsSpec& spec);

/// Quantum construction: a single branch whose tables are the Born
/// probabilities of polarization measurements on a two-photon state.
MixedContextSpace build_mixed_context_space(const DensityOperator& rho, const SettingsSpec& spec);

/// Per-context Born tables of polarization measurements at the spec angles.
ConditionalTables quantum_tables(const DensityOperator& rho, const SettingsSpec& spec);

struct KolmogorovReport {
  bool positivity_ok = false;
  bool normalization_ok = false;
  bool additivity_ok = false;
  double worst_violation = 0.0;
  std::uint64_t n_additivity_checks = 0;
  bool exhaustive = false;
  std::size_t n_atoms = 0;

  bool passed() const noexcept { return positivity_ok && normalization_ok && additivity_ok; }
  nlohmann::json to_json() const;
};

/// Checks positivity, normalization and additivity on disjoint events. On a
/// finite space countable additivity is finite additivity. Every ordered
/// pair of disjoint events is checked when the space has at most
/// `exhaustive_limit` atoms (3^n pairs); otherwise 10,000 pairs are sampled
/// with `seed`.
KolmogorovReport verify_kolmogorov(const ClassicalProbabilitySpace& space,
                                   std::size_t exhaustive_limit = 16,
                                   std::uint64_t seed = 0x5eed, double tol = kSpaceTol);

/// S from conditional correlations E(x,y) of the quantum state.
double per_context_chsh(const DensityOperator& rho, const SettingsSpec& spec,
                        const ChshCombination& combination = ChshCombination::standard());

/// Unconditioned correlations E'(x,y) = Σ_ab ab·P(x,a,y,b).
std::array<std::array<double, 2>, 2> global_correlations(const MixedContextSpace& space);

/// S' = signed sum of E'(x,y) over the mixed space (normalization by all
/// counts rather than per context).
double szabo_chsh(const MixedContextSpace& space,
                  const ChshCombination& combination = ChshCombination::standard());

}  // namespace bellkc

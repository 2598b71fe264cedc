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

#include "bellkc/probability_space.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "bellkc/rng.hpp"

namespace bellkc {

namespace {

void validate_side(const std::vector<Setting>& side, const char* name) {
  if (side.empty()) throw InvariantError(std::string(name) + " settings are empty");
  double total = 0.0;
  for (const auto& s : side) {
    if (!std::isfinite(s.angle)) throw InvariantError(std::string(name) + " angle not finite");
    if (!(s.prob >= 0.0)) throw InvariantError(std::string(name) + " setting probability < 0");
    total += s.prob;
  }
  if (std::abs(total - 1.0) > kSpaceTol) {
    throw InvariantError(std::string(name) + " setting probabilities do not sum to 1");
  }
}

template <typename F>
std::vector<double> project(const std::vector<Setting>& side, F f) {
  std::vector<double> out;
  out.reserve(side.size());
  for (const auto& s : side) out.push_back(f(s));
  return out;
}

}  // namespace

SettingsSpec SettingsSpec::uniform(const std::vector<double>& alice_angles,
                                   const std::vector<double>& bob_angles) {
  SettingsSpec spec;
  for (double a : alice_angles) spec.alice.push_back({a, 1.0 / static_cast<double>(alice_angles.size())});
  for (double b : bob_angles) spec.bob.push_back({b, 1.0 / static_cast<double>(bob_angles.size())});
  return spec;
}

void SettingsSpec::validate() const {
  validate_side(alice, "alice");
  validate_side(bob, "bob");
}

std::vector<double> SettingsSpec::alice_angles() const {
  return project(alice, [](const Setting& s) { return s.angle; });
}
std::vector<double> SettingsSpec::bob_angles() const {
  return project(bob, [](const Setting& s) { return s.angle; });
}
std::vector<double> SettingsSpec::alice_probs() const {
  return project(alice, [](const Setting& s) { return s.prob; });
}
std::vector<double> SettingsSpec::bob_probs() const {
  return project(bob, [](const Setting& s) { return s.prob; });
}

SettingsSpec chsh_optimal_settings() {
  constexpr double pi = std::numbers::pi;
  return SettingsSpec::uniform({0.0, pi / 4}, {pi / 8, 3 * pi / 8});
}

// ---------------------------------------------------------------------------

ClassicalProbabilitySpace ClassicalProbabilitySpace::make(std::vector<std::string> atoms,
                                                          std::vector<double> probs) {
  if (atoms.size() != probs.size()) throw InvariantError("space: atoms and probs differ in length");
  if (atoms.empty()) throw InvariantError("space: empty sample space");
  if (std::set<std::string>(atoms.begin(), atoms.end()).size() != atoms.size()) {
    throw InvariantError("space: duplicate atom labels");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvariantError("space: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kSpaceTol) throw InvariantError("space: probabilities do not sum to 1");
  for (double& p : probs) p /= total;
  return ClassicalProbabilitySpace(std::move(atoms), std::move(probs));
}

ClassicalProbabilitySpace ClassicalProbabilitySpace::unchecked(std::vector<std::string> atoms,
                                                               std::vector<double> probs) {
  if (atoms.size() != probs.size()) throw InvariantError("space: atoms and probs differ in length");
  return ClassicalProbabilitySpace(std::move(atoms), std::move(probs));
}

double ClassicalProbabilitySpace::probability(std::span<const std::size_t> event) const {
  double p = 0.0;
  for (std::size_t i : event) p += probs_.at(i);
  return p;
}

std::string ClassicalProbabilitySpace::to_text() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", probs_[i]);
    out += atoms_[i] + '\t' + buf + '\n';
  }
  return out;
}

nlohmann::json ClassicalProbabilitySpace::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    atoms.push_back({{"label", atoms_[i]}, {"prob", probs_[i]}});
  }
  return {{"n_atoms", atoms_.size()}, {"atoms", atoms}};
}

// ---------------------------------------------------------------------------

std::string mixed_atom_label(const MixedAtom& atom, double alice_angle, double bob_angle) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "x%zu[%.9f]a%c y%zu[%.9f]b%c", atom.x_index, alice_angle,
                atom.a > 0 ? '+' : '-', atom.y_index, bob_angle, atom.b > 0 ? '+' : '-');
  return buf;
}

MixedContextSpace::MixedContextSpace(ClassicalProbabilitySpace space, std::vector<MixedAtom> keys,
                                     std::size_t n_alice, std::size_t n_bob)
    : space_(std::move(space)), keys_(std::move(keys)), n_alice_(n_alice), n_bob_(n_bob) {
  if (keys_.size() != space_.size()) throw InvariantError("mixed space: one key per atom required");
}

MixedContextSpace MixedContextSpace::from_space(const ClassicalProbabilitySpace& space) {
  std::vector<MixedAtom> keys;
  std::size_t n_alice = 0;
  std::size_t n_bob = 0;
  for (const auto& label : space.atoms()) {
    MixedAtom k;
    double alice_angle = 0.0;
    double bob_angle = 0.0;
    char a = 0;
    char b = 0;
    int consumed = 0;
    const int n = std::sscanf(label.c_str(), "x%zu[%lf]a%c y%zu[%lf]b%c%n", &k.x_index,
                              &alice_angle, &a, &k.y_index, &bob_angle, &b, &consumed);
    if (n != 6 || static_cast<std::size_t>(consumed) != label.size() || (a != '+' && a != '-') ||
        (b != '+' && b != '-')) {
      throw InvariantError("malformed atom structure: cannot parse '" + label + "'");
    }
    k.a = a == '+' ? 1 : -1;
    k.b = b == '+' ? 1 : -1;
    if (std::find(keys.begin(), keys.end(), k) != keys.end()) {
      throw InvariantError("malformed atom structure: repeated tuple '" + label + "'");
    }
    n_alice = std::max(n_alice, k.x_index + 1);
    n_bob = std::max(n_bob, k.y_index + 1);
    keys.push_back(k);
  }
  return MixedContextSpace(space, std::move(keys), n_alice, n_bob);
}

double MixedContextSpace::prob(std::size_t x, int a, std::size_t y, int b) const {
  const MixedAtom key{x, a > 0 ? 1 : -1, y, b > 0 ? 1 : -1};
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return space_.probs()[i];
  }
  return 0.0;
}

bool MixedContextSpace::is_complete_grid() const noexcept {
  if (keys_.size() != 4 * n_alice_ * n_bob_) return false;
  std::vector<bool> seen(keys_.size(), false);
  for (const auto& k : keys_) {
    if (k.x_index >= n_alice_ || k.y_index >= n_bob_) return false;
    const std::size_t slot = ((k.x_index * n_bob_ + k.y_index) * 4) + outcome_index(k.a, k.b);
    if (seen[slot]) return false;
    seen[slot] = true;
  }
  return true;
}

// ---------------------------------------------------------------------------

ClassicalProbabilitySpace build_single_context_space(const DensityOperator& rho, const Context& c) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < c.size(); ++i) labels.push_back("P" + std::to_string(i));
  return build_single_context_space(rho, c, std::move(labels));
}

ClassicalProbabilitySpace build_single_context_space(const DensityOperator& rho, const Context& c,
                                                     std::vector<std::string> labels) {
  if (labels.size() != c.size()) throw InvariantError("space: one label per projector required");
  return ClassicalProbabilitySpace::make(std::move(labels), context_distribution(rho, c));
}

ConditionalTables quantum_tables(const DensityOperator& rho, const SettingsSpec& spec) {
  spec.validate();
  ConditionalTables tables(spec.alice.size(), std::vector<JointTable>(spec.bob.size()));
  for (std::size_t x = 0; x < spec.alice.size(); ++x) {
    const auto a = polarization_observable(spec.alice[x].angle);
    for (std::size_t y = 0; y < spec.bob.size(); ++y) {
      tables[x][y] = joint_outcome_distribution(rho, a, polarization_observable(spec.bob[y].angle));
    }
  }
  return tables;
}

MixedContextSpace build_mixed_context_space(std::span<const HiddenVariableBranch> branches,
                                            const SettingsSpec& spec) {
  spec.validate();
  if (branches.empty()) throw InvariantError("mixed space: no hidden-variable branches");
  double weight_total = 0.0;
  for (const auto& br : branches) {
    if (!(br.weight >= 0.0)) throw InvariantError("mixed space: negative branch weight");
    weight_total += br.weight;
    if (br.tables.size() != spec.alice.size()) throw InvariantError("mixed space: table rows != alice settings");
    for (const auto& row : br.tables) {
      if (row.size() != spec.bob.size()) throw InvariantError("mixed space: table cols != bob settings");
    }
  }
  if (std::abs(weight_total - 1.0) > kSpaceTol) throw InvariantError("mixed space: weights do not sum to 1");

  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<MixedAtom> keys;
  for (std::size_t x = 0; x < spec.alice.size(); ++x) {
    for (int a : {1, -1}) {
      for (std::size_t y = 0; y < spec.bob.size(); ++y) {
        for (int b : {1, -1}) {
          double p_ab = 0.0;
          for (const auto& br : branches) p_ab += br.tables[x][y][outcome_index(a, b)] * br.weight;
          const MixedAtom key{x, a, y, b};
          keys.push_back(key);
          labels.push_back(mixed_atom_label(key, spec.alice[x].angle, spec.bob[y].angle));
          probs.push_back(p_ab * spec.alice[x].prob * spec.bob[y].prob);
        }
      }
    }
  }
  return MixedContextSpace(ClassicalProbabilitySpace::make(std::move(labels), std::move(probs)),
                           std::move(keys), spec.alice.size(), spec.bob.size());
}

MixedContextSpace build_mixed_context_space(const DensityOperator& rho, const SettingsSpec& spec) {
  const HiddenVariableBranch single{1.0, quantum_tables(rho, spec)};
  return build_mixed_context_space(std::span(&single, 1), spec);
}

// ---------------------------------------------------------------------------

nlohmann::json KolmogorovReport::to_json() const {
  return {{"positivity_ok", positivity_ok},
          {"normalization_ok", normalization_ok},
          {"additivity_ok", additivity_ok},
          {"passed", passed()},
          {"worst_violation", worst_violation},
          {"n_additivity_checks", n_additivity_checks},
          {"additivity_mode", exhaustive ? "exhaustive" : "sampled"},
          {"additivity_note", "finite sample space: countable additivity reduces to finite additivity"},
          {"n_atoms", n_atoms}};
}

KolmogorovReport verify_kolmogorov(const ClassicalProbabilitySpace& space,
                                   std::size_t exhaustive_limit, std::uint64_t seed, double tol) {
  KolmogorovReport report;
  const auto& p = space.probs();
  const std::size_t n = p.size();
  report.n_atoms = n;

  double negativity = 0.0;
  for (double v : p) negativity = std::max(negativity, -v);
  report.positivity_ok = negativity <= 0.0;

  double additivity = 0.0;
  double total = 0.0;
  constexpr std::size_t kHardCap = 20;
  if (n <= std::min(exhaustive_limit, kHardCap)) {
    report.exhaustive = true;
    // Subset sums indexed by bitmask; every ordered disjoint pair (A, B) is a
    // submask B of the complement of A, 3^n pairs in total.
    const std::uint32_t full = n == 0 ? 0u : static_cast<std::uint32_t>((1ull << n) - 1);
    std::vector<double> mass(std::size_t{1} << n, 0.0);
    for (std::uint32_t s = 1; s <= full; ++s) {
      mass[s] = mass[s & (s - 1)] + p[static_cast<std::size_t>(std::countr_zero(s))];
    }
    total = mass[full];
    std::uint64_t checks = 0;
    for (std::uint32_t a = 0;; ++a) {
      const std::uint32_t rest = full & ~a;
      for (std::uint32_t b = rest;; b = (b - 1) & rest) {
        additivity = std::max(additivity, std::abs(mass[a | b] - mass[a] - mass[b]));
        ++checks;
        if (b == 0) break;
      }
      if (a == full) break;
    }
    report.n_additivity_checks = checks;
  } else {
    total = std::accumulate(p.begin(), p.end(), 0.0);
    Stream rng(seed);
    constexpr std::uint64_t kSamples = 10'000;
    std::vector<std::size_t> a_set;
    std::vector<std::size_t> b_set;
    std::vector<std::size_t> union_set;
    for (std::uint64_t k = 0; k < kSamples; ++k) {
      a_set.clear();
      b_set.clear();
      union_set.clear();
      for (std::size_t i = 0; i < n; ++i) {
        switch (rng() % 3) {
          case 0: a_set.push_back(i); union_set.push_back(i); break;
          case 1: b_set.push_back(i); union_set.push_back(i); break;
          default: break;
        }
      }
      additivity = std::max(additivity, std::abs(space.probability(union_set) -
                                                 space.probability(a_set) -
                                                 space.probability(b_set)));
    }
    report.n_additivity_checks = kSamples;
  }

  const double norm_violation = std::abs(total - 1.0);
  report.normalization_ok = norm_violation <= tol;
  report.additivity_ok = additivity <= tol;
  report.worst_violation = std::max({negativity, norm_violation, additivity});
  return report;
}

// ---------------------------------------------------------------------------

double per_context_chsh(const DensityOperator& rho, const SettingsSpec& spec,
                        const ChshCombination& combination) {
  if (!spec.is_binary()) throw DomainError("per_context_chsh: exactly two settings per side required");
  const auto tables = quantum_tables(rho, spec);
  std::array<std::array<double, 2>, 2> e{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) e[x][y] = table_correlation(tables[x][y]);
  return combination.apply(e);
}

std::array<std::array<double, 2>, 2> global_correlations(const MixedContextSpace& space) {
  if (space.n_alice() != 2 || space.n_bob() != 2 || !space.is_complete_grid()) {
    throw InvariantError("malformed atom structure: expected the 16-atom (x,a,y,b) grid");
  }
  std::array<std::array<double, 2>, 2> e{};
  for (std::size_t i = 0; i < space.keys().size(); ++i) {
    const auto& k = space.keys()[i];
    e[k.x_index][k.y_index] += k.a * k.b * space.space().probs()[i];
  }
  return e;
}

double szabo_chsh(const MixedContextSpace& space, const ChshCombination& combination) {
  return combination.apply(global_correlations(space));
}

}  // namespace bellkc

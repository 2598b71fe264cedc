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

#include "bellkc/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace bellkc {

namespace {

void check_sign(int v, const char* what) {
  if (v != 1 && v != -1) throw InvariantError(std::string(what) + ": outcomes must be +1 or -1");
}

void validate_weights(const std::vector<WeightedStrategy>& ws, const char* what) {
  if (ws.empty()) throw InvariantError(std::string(what) + ": empty strategy distribution");
  double total = 0.0;
  for (const auto& w : ws) {
    w.strategy.validate();
    if (!(w.weight >= 0.0)) throw InvariantError(std::string(what) + ": negative weight");
    total += w.weight;
  }
  if (std::abs(total - 1.0) > kSpaceTol) throw InvariantError(std::string(what) + ": weights do not sum to 1");
}

const DeterministicStrategy& draw(const std::vector<WeightedStrategy>& ws, Stream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  const DeterministicStrategy* last = &ws.front().strategy;
  for (const auto& w : ws) {
    if (w.weight <= 0.0) continue;
    last = &w.strategy;
    cumulative += w.weight;
    if (u < cumulative) break;
  }
  return *last;
}

JointTable mixture_table(const std::vector<WeightedStrategy>& ws, std::size_t x, std::size_t y) {
  JointTable t{};
  for (const auto& w : ws) t[outcome_index(w.strategy.a_of_x.at(x), w.strategy.b_of_y.at(y))] += w.weight;
  return t;
}

void require_setting(std::size_t x, std::size_t y, std::size_t nx, std::size_t ny) {
  if (x >= nx || y >= ny) {
    throw DomainError("settings (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside the model's " + std::to_string(nx) + "x" + std::to_string(ny));
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Quantum: return "quantum";
    case ModelKind::DeterministicLHV: return "deterministic_lhv";
    case ModelKind::MixedLHV: return "mixed_lhv";
    case ModelKind::Superdeterministic: return "superdeterministic";
    case ModelKind::Nonlocal: return "nonlocal";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

void DeterministicStrategy::validate() const {
  if (a_of_x.empty() || b_of_y.empty()) throw InvariantError("strategy: empty response map");
  for (int v : a_of_x) check_sign(v, "strategy");
  for (int v : b_of_y) check_sign(v, "strategy");
}

JointTable DeterministicStrategy::table(std::size_t x, std::size_t y) const {
  require_setting(x, y, a_of_x.size(), b_of_y.size());
  JointTable t{};
  t[outcome_index(a_of_x[x], b_of_y[y])] = 1.0;
  return t;
}

int DeterministicStrategy::chsh(const ChshCombination& combination) const {
  if (a_of_x.size() != 2 || b_of_y.size() != 2) throw DomainError("strategy chsh: two settings per side required");
  int s = 0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) s += combination.sign[x][y] * a_of_x[x] * b_of_y[y];
  return s;
}

std::string DeterministicStrategy::label() const {
  std::string s;
  for (int v : a_of_x) s.push_back(v > 0 ? '+' : '-');
  s.push_back('|');
  for (int v : b_of_y) s.push_back(v > 0 ? '+' : '-');
  return s;
}

DeterministicStrategy DeterministicStrategy::flipped() const {
  DeterministicStrategy f = *this;
  for (int& v : f.a_of_x) v = -v;
  for (int& v : f.b_of_y) v = -v;
  return f;
}

void MixedLHVModel::validate() const {
  validate_weights(strategies, "mixed LHV");
  const auto nx = strategies.front().strategy.a_of_x.size();
  const auto ny = strategies.front().strategy.b_of_y.size();
  for (const auto& w : strategies) {
    if (w.strategy.a_of_x.size() != nx || w.strategy.b_of_y.size() != ny) {
      throw InvariantError("mixed LHV: strategies disagree on setting counts");
    }
  }
}

void SuperdeterministicModel::validate() const {
  if (conditional_lambda.empty() || conditional_lambda.front().empty()) {
    throw InvariantError("superdeterministic: empty conditional table");
  }
  const auto ny = conditional_lambda.front().size();
  const auto nx = conditional_lambda.size();
  for (const auto& row : conditional_lambda) {
    if (row.size() != ny) throw InvariantError("superdeterministic: ragged conditional table");
    for (const auto& dist : row) {
      validate_weights(dist, "superdeterministic");
      for (const auto& w : dist) {
        if (w.strategy.a_of_x.size() != nx || w.strategy.b_of_y.size() != ny) {
          throw InvariantError("superdeterministic: strategy not total on the settings");
        }
      }
    }
  }
}

bool SuperdeterministicModel::lambda_depends_on_settings() const {
  auto mass = [](const std::vector<WeightedStrategy>& dist, const DeterministicStrategy& s) {
    double m = 0.0;
    for (const auto& w : dist)
      if (w.strategy == s) m += w.weight;
    return m;
  };
  const auto& ref = conditional_lambda.front().front();
  for (const auto& row : conditional_lambda) {
    for (const auto& dist : row) {
      for (const auto& w : dist)
        if (std::abs(mass(dist, w.strategy) - mass(ref, w.strategy)) > kSpaceTol) return true;
      for (const auto& w : ref)
        if (std::abs(mass(dist, w.strategy) - mass(ref, w.strategy)) > kSpaceTol) return true;
    }
  }
  return false;
}

void NonlocalModel::validate() const {
  for (const auto& row : pattern.sign)
    for (int v : row) check_sign(v, "nonlocal pattern");
}

nlohmann::json AssumptionFlags::to_json() const {
  return {{"measurement_independence_violated", measurement_independence_violated},
          {"parameter_independence_violated", parameter_independence_violated},
          {"outcome_independence_violated", outcome_independence_violated}};
}

// ---------------------------------------------------------------------------

OutcomeModel::OutcomeModel(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{
                 [](const QuantumModel& q) {
                   if (q.alice_angles.empty() || q.bob_angles.empty()) {
                     throw InvariantError("quantum model: empty angle list");
                   }
                   if (q.tables.size() != q.alice_angles.size()) {
                     throw InvariantError("quantum model: tables do not match angles");
                   }
                 },
                 [](const auto& m) { m.validate(); },
             },
             v_);
}

ModelKind OutcomeModel::kind() const noexcept {
  switch (v_.index()) {
    case 0: return ModelKind::Quantum;
    case 1: return ModelKind::DeterministicLHV;
    case 2: return ModelKind::MixedLHV;
    case 3: return ModelKind::Superdeterministic;
    default: return ModelKind::Nonlocal;
  }
}

std::size_t OutcomeModel::n_alice() const noexcept {
  return std::visit(overloaded{
                        [](const QuantumModel& q) { return q.alice_angles.size(); },
                        [](const DeterministicStrategy& s) { return s.a_of_x.size(); },
                        [](const MixedLHVModel& m) { return m.strategies.front().strategy.a_of_x.size(); },
                        [](const SuperdeterministicModel& m) { return m.conditional_lambda.size(); },
                        [](const NonlocalModel&) { return std::size_t{2}; },
                    },
                    v_);
}

std::size_t OutcomeModel::n_bob() const noexcept {
  return std::visit(overloaded{
                        [](const QuantumModel& q) { return q.bob_angles.size(); },
                        [](const DeterministicStrategy& s) { return s.b_of_y.size(); },
                        [](const MixedLHVModel& m) { return m.strategies.front().strategy.b_of_y.size(); },
                        [](const SuperdeterministicModel& m) { return m.conditional_lambda.front().size(); },
                        [](const NonlocalModel&) { return std::size_t{2}; },
                    },
                    v_);
}

AssumptionFlags OutcomeModel::flags() const {
  return std::visit(overloaded{
                        [](const QuantumModel&) { return AssumptionFlags{false, false, true}; },
                        [](const DeterministicStrategy&) { return AssumptionFlags{}; },
                        [](const MixedLHVModel&) { return AssumptionFlags{}; },
                        [](const SuperdeterministicModel& m) {
                          return AssumptionFlags{m.lambda_depends_on_settings(), false, false};
                        },
                        [](const NonlocalModel&) { return AssumptionFlags{false, true, false}; },
                    },
                    v_);
}

std::uint64_t OutcomeModel::description_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

OutcomeModel quantum_model(const DensityOperator& rho, std::vector<double> alice_angles,
                           std::vector<double> bob_angles) {
  if (rho.dim() != 4) throw DimensionError("quantum model: two-photon state must have dim 4");
  if (alice_angles.empty() || bob_angles.empty()) throw InvariantError("quantum model: empty angle list");
  const auto spec = SettingsSpec::uniform(alice_angles, bob_angles);
  auto tables = quantum_tables(rho, spec);
  return OutcomeModel(QuantumModel{rho, std::move(alice_angles), std::move(bob_angles), std::move(tables)});
}

JointTable exact_joint_table(const OutcomeModel& model, std::size_t x, std::size_t y) {
  require_setting(x, y, model.n_alice(), model.n_bob());
  return std::visit(overloaded{
                        [&](const QuantumModel& q) { return q.tables[x][y]; },
                        [&](const DeterministicStrategy& s) { return s.table(x, y); },
                        [&](const MixedLHVModel& m) { return mixture_table(m.strategies, x, y); },
                        [&](const SuperdeterministicModel& m) {
                          return mixture_table(m.conditional_lambda[x][y], x, y);
                        },
                        [&](const NonlocalModel& m) {
                          JointTable t{};
                          if (m.rule == NonlocalModel::Rule::PrBox) {
                            const int s = m.pattern.sign[x][y];
                            t[outcome_index(1, s)] = 0.5;
                            t[outcome_index(-1, -s)] = 0.5;
                          } else {
                            const int b = x == 0 ? 1 : -1;
                            t[outcome_index(1, b)] = 0.5;
                            t[outcome_index(-1, b)] = 0.5;
                          }
                          return t;
                        },
                    },
                    model.variant());
}

ConditionalTables exact_tables(const OutcomeModel& model) {
  ConditionalTables t(model.n_alice(), std::vector<JointTable>(model.n_bob()));
  for (std::size_t x = 0; x < model.n_alice(); ++x)
    for (std::size_t y = 0; y < model.n_bob(); ++y) t[x][y] = exact_joint_table(model, x, y);
  return t;
}

Outcome sample_trial(const OutcomeModel& model, std::size_t x, std::size_t y, Stream& rng) {
  require_setting(x, y, model.n_alice(), model.n_bob());
  return std::visit(
      overloaded{
          [&](const QuantumModel& q) {
            const auto k = rng.categorical(q.tables[x][y]);
            return Outcome{outcome_a(k), outcome_b(k)};
          },
          [&](const DeterministicStrategy& s) { return Outcome{s.a_of_x[x], s.b_of_y[y]}; },
          [&](const MixedLHVModel& m) {
            const auto& s = draw(m.strategies, rng);
            return Outcome{s.a_of_x[x], s.b_of_y[y]};
          },
          [&](const SuperdeterministicModel& m) {
            const auto& s = draw(m.conditional_lambda[x][y], rng);
            return Outcome{s.a_of_x[x], s.b_of_y[y]};
          },
          [&](const NonlocalModel& m) {
            const int r = rng.uniform() < 0.5 ? 1 : -1;
            if (m.rule == NonlocalModel::Rule::PrBox) return Outcome{r, m.pattern.sign[x][y] * r};
            return Outcome{r, x == 0 ? 1 : -1};
          },
      },
      model.variant());
}

// ---------------------------------------------------------------------------

std::vector<DeterministicStrategy> enumerate_deterministic_strategies(std::size_t n_alice,
                                                                      std::size_t n_bob) {
  if (n_alice != 2 || n_bob != 2) throw DomainError("strategy enumeration: two settings per side required");
  std::vector<DeterministicStrategy> out;
  for (unsigned code = 0; code < 16; ++code) {
    auto bit = [code](unsigned k) { return (code >> (3 - k)) & 1u ? -1 : 1; };
    out.push_back({{bit(0), bit(1)}, {bit(2), bit(3)}});
  }
  return out;
}

MixedLHVModel uniform_lhv_mixture() {
  MixedLHVModel m;
  for (auto& s : enumerate_deterministic_strategies()) m.strategies.push_back({std::move(s), 1.0 / 16});
  return m;
}

LhvBound lhv_max_chsh() {
  LhvBound bound;
  bound.strategies = enumerate_deterministic_strategies();
  for (const auto& s : bound.strategies)
    for (const auto& c : ChshCombination::all()) bound.max_abs_s = std::max(bound.max_abs_s, std::abs(s.chsh(c)));
  for (std::size_t i = 0; i < bound.strategies.size(); ++i) {
    if (bound.strategies[i].chsh() == bound.max_abs_s) bound.maximizers.push_back(i);
  }
  return bound;
}

double tables_chsh(const ConditionalTables& tables, const ChshCombination& combination) {
  if (tables.size() != 2 || tables[0].size() != 2 || tables[1].size() != 2) {
    throw DomainError("chsh: two settings per side required");
  }
  std::array<std::array<double, 2>, 2> e{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) e[x][y] = table_correlation(tables[x][y]);
  return combination.apply(e);
}

double model_chsh(const OutcomeModel& model, const ChshCombination& combination) {
  return tables_chsh(exact_tables(model), combination);
}

PolytopeVerdict local_polytope_membership(const ConditionalTables& tables, double tol) {
  if (tables.size() != 2 || tables[0].size() != 2 || tables[1].size() != 2) {
    throw DomainError("polytope membership: two settings per side required");
  }
  for (const auto& row : tables) {
    for (const auto& t : row) {
      double total = 0.0;
      for (double p : t) {
        if (!(p >= -tol)) throw InvariantError("polytope membership: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > tol) throw InvariantError("polytope membership: table does not sum to 1");
    }
  }
  PolytopeVerdict verdict;
  // P(a = +|x, y) must not depend on y, and P(b = +|x, y) not on x.
  for (std::size_t x = 0; x < 2; ++x) {
    const double d = (tables[x][0][0] + tables[x][0][1]) - (tables[x][1][0] + tables[x][1][1]);
    verdict.signalling_delta = std::max(verdict.signalling_delta, std::abs(d));
  }
  for (std::size_t y = 0; y < 2; ++y) {
    const double d = (tables[0][y][0] + tables[0][y][2]) - (tables[1][y][0] + tables[1][y][2]);
    verdict.signalling_delta = std::max(verdict.signalling_delta, std::abs(d));
  }
  verdict.max_s = -std::numeric_limits<double>::infinity();
  for (const auto& c : ChshCombination::all()) {
    const double s = tables_chsh(tables, c);
    if (s > verdict.max_s) {
      verdict.max_s = s;
      verdict.best = c;
    }
  }
  if (verdict.signalling_delta > tol) {
    verdict.status = PolytopeVerdict::Status::Signalling;
  } else if (verdict.max_s > 2.0 + tol) {
    verdict.status = PolytopeVerdict::Status::Nonlocal;
    verdict.witness = verdict.best;
  }
  return verdict;
}

SuperdeterministicModel superdeterministic_s4_example(const ChshCombination& combination) {
  SuperdeterministicModel m;
  m.conditional_lambda.assign(2, std::vector<std::vector<WeightedStrategy>>(2));
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      DeterministicStrategy s{{1, 1}, {1, 1}};
      s.b_of_y[y] = combination.sign[x][y];
      m.conditional_lambda[x][y] = {{s, 0.5}, {s.flipped(), 0.5}};
    }
  }
  return m;
}

NonlocalModel pr_box(const ChshCombination& combination) {
  return NonlocalModel{NonlocalModel::Rule::PrBox, combination};
}

}  // namespace bellkc

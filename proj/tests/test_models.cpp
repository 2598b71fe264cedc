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

#include <numbers>
#include <set>

#include "bellkc/haar.hpp"
#include "bellkc/models.hpp"
#include "oracles.hpp"

namespace bellkc {
namespace {

constexpr double kPi = std::numbers::pi;

oracle::Tables to_oracle(const ConditionalTables& t) {
  oracle::Tables out{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int k = 0; k < 4; ++k) out[x][y][k] = t[x][y][k];
  return out;
}

OutcomeModel optimal_quantum() {
  return quantum_model(photon_pair_state<double>(), {0.0, kPi / 4}, {kPi / 8, 3 * kPi / 8});
}

MixedLHVModel random_mixture(Stream& rng) {
  MixedLHVModel m;
  const auto all = enumerate_deterministic_strategies();
  double total = 0.0;
  std::vector<double> w(16);
  for (auto& v : w) total += (v = -std::log(1.0 - rng.uniform()));
  for (std::size_t i = 0; i < 16; ++i) m.strategies.push_back({all[i], w[i] / total});
  return m;
}

TEST(QuantumModel, TablesMatchOracle) {
  const auto model = optimal_quantum();
  const double a[2] = {0.0, kPi / 4}, b[2] = {kPi / 8, 3 * kPi / 8};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      const auto t = exact_joint_table(model, x, y);
      const auto ref = oracle::phi_plus_table(a[x], b[y]);
      for (int k = 0; k < 4; ++k) EXPECT_NEAR(t[k], ref[k], 1e-12);
    }
  EXPECT_THROW(exact_joint_table(model, 2, 0), DomainError);
}

TEST(QuantumModel, MaximallyMixedAndSingleContext) {
  const auto mixed = quantum_model(DensityOperator::maximally_mixed(4), {0.1, 0.7}, {0.2, 1.9});
  for (const auto& row : exact_tables(mixed))
    for (const auto& t : row)
      for (double v : t) EXPECT_NEAR(v, 0.25, 1e-12);
  const auto one = quantum_model(photon_pair_state<double>(), {0.0}, {0.4});
  EXPECT_EQ(one.n_alice(), 1u);
  const auto t = exact_joint_table(one, 0, 0);
  EXPECT_NEAR(t[0] + t[1] + t[2] + t[3], 1.0, 1e-12);
  EXPECT_THROW(quantum_model(DensityOperator::maximally_mixed(3), {0.0}, {0.0}), DimensionError);
  EXPECT_THROW(quantum_model(photon_pair_state<double>(), {}, {0.0}), InvariantError);
}

TEST(QuantumModel, NoSignallingExactly) {
  Stream rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto model = quantum_model(random_density_operator(4, rng), {rng.uniform() * kPi, rng.uniform() * kPi},
                                     {rng.uniform() * kPi, rng.uniform() * kPi});
    const auto t = exact_tables(model);
    for (std::size_t x = 0; x < 2; ++x) {
      EXPECT_NEAR(t[x][0][0] + t[x][0][1], t[x][1][0] + t[x][1][1], 1e-12);
    }
    for (std::size_t y = 0; y < 2; ++y) {
      EXPECT_NEAR(t[0][y][0] + t[0][y][2], t[1][y][0] + t[1][y][2], 1e-12);
    }
  }
}

TEST(ExactTables, ValidDistributionsForEveryKind) {
  Stream rng(2);
  const std::vector<OutcomeModel> models{
      optimal_quantum(), OutcomeModel(DeterministicStrategy{{1, -1}, {-1, 1}}), OutcomeModel(random_mixture(rng)),
      OutcomeModel(superdeterministic_s4_example()), OutcomeModel(pr_box()),
      OutcomeModel(NonlocalModel{NonlocalModel::Rule::SignallingControl, ChshCombination::standard()})};
  for (const auto& m : models)
    for (const auto& row : exact_tables(m))
      for (const auto& t : row) {
        double total = 0.0;
        for (double v : t) {
          EXPECT_GE(v, 0.0);
          total += v;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
}

TEST(ExactTables, Examples) {
  const OutcomeModel det(DeterministicStrategy{{1, 1}, {-1, -1}});
  const auto t = exact_joint_table(det, 1, 0);
  EXPECT_EQ(t[outcome_index(1, -1)], 1.0);
  EXPECT_EQ(t[0] + t[2] + t[3], 0.0);
  const OutcomeModel uni(uniform_lhv_mixture());
  for (const auto& row : exact_tables(uni))
    for (const auto& u : row)
      for (double v : u) EXPECT_NEAR(v, 0.25, 1e-15);
  const OutcomeModel box(pr_box());
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      const auto p = exact_joint_table(box, x, y);
      if (x == 0 && y == 1) {
        EXPECT_EQ(p[1], 0.5);
        EXPECT_EQ(p[2], 0.5);
      } else {
        EXPECT_EQ(p[0], 0.5);
        EXPECT_EQ(p[3], 0.5);
      }
    }
}

TEST(Strategies, EnumerationOrderAndCount) {
  const auto all = enumerate_deterministic_strategies();
  ASSERT_EQ(all.size(), 16u);
  std::set<std::string> labels;
  for (const auto& s : all) labels.insert(s.label());
  EXPECT_EQ(labels.size(), 16u);
  EXPECT_EQ(all.front().label(), "++|++");
  EXPECT_EQ(all[1].label(), "++|+-");
  EXPECT_EQ(all.back().label(), "--|--");
  for (int s = 0; s < 16; ++s) {
    const auto ref = oracle::strategy_tables(s);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        for (int k = 0; k < 4; ++k) EXPECT_EQ(all[s].table(x, y)[k], ref[x][y][k]);
  }
  EXPECT_THROW(enumerate_deterministic_strategies(3, 2), DomainError);
}

TEST(Strategies, EveryVertexHasAbsSTwo) {
  for (const auto& s : enumerate_deterministic_strategies())
    for (const auto& c : ChshCombination::all()) EXPECT_EQ(std::abs(s.chsh(c)), 2);
}

TEST(LhvBound, ExhaustiveMaximumIsTwo) {
  const auto b = lhv_max_chsh();
  EXPECT_EQ(b.max_abs_s, 2);
  EXPECT_EQ(b.maximizers.size(), 8u);
  for (auto i : b.maximizers) EXPECT_EQ(b.strategies[i].chsh(), 2);
}

TEST(LhvBound, MixturesStayBelowTwo) {
  Stream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto mix = random_mixture(rng);
    const OutcomeModel m(mix);
    for (const auto& c : ChshCombination::all()) {
      const double s = model_chsh(m, c);
      EXPECT_LE(std::abs(s), 2.0 + 1e-12);
      double convex = 0.0;
      for (const auto& w : mix.strategies) convex += w.weight * w.strategy.chsh(c);
      EXPECT_NEAR(s, convex, 1e-12);
    }
  }
}

TEST(Polytope, MixturesAreLocal) {
  Stream rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto tables = exact_tables(OutcomeModel(random_mixture(rng)));
    const auto v = local_polytope_membership(tables);
    EXPECT_EQ(v.status, PolytopeVerdict::Status::Local);
    EXPECT_LT(oracle::local_hull_residual(to_oracle(tables)), 1e-6);
  }
}

TEST(Polytope, QuantumOptimalIsNonlocal) {
  const auto tables = exact_tables(optimal_quantum());
  const auto v = local_polytope_membership(tables);
  ASSERT_EQ(v.status, PolytopeVerdict::Status::Nonlocal);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(*v.witness, ChshCombination::standard());
  EXPECT_NEAR(v.max_s, 2 * std::numbers::sqrt2, 1e-12);
  EXPECT_GT(oracle::local_hull_residual(to_oracle(tables)), 1e-3);
}

TEST(Polytope, PrBoxIsNonlocalAndSignallingIsIllPosed) {
  const auto box = local_polytope_membership(exact_tables(OutcomeModel(pr_box())));
  EXPECT_EQ(box.status, PolytopeVerdict::Status::Nonlocal);
  EXPECT_NEAR(box.max_s, 4.0, 1e-15);
  const auto sig = local_polytope_membership(exact_tables(
      OutcomeModel(NonlocalModel{NonlocalModel::Rule::SignallingControl, ChshCombination::standard()})));
  EXPECT_EQ(sig.status, PolytopeVerdict::Status::Signalling);
  EXPECT_NEAR(sig.signalling_delta, 1.0, 1e-15);
  ConditionalTables bad(2, std::vector<JointTable>(2, JointTable{0.5, 0.5, 0.5, 0.5}));
  EXPECT_THROW(local_polytope_membership(bad), InvariantError);
}

TEST(Polytope, AgreesWithHullOracleOnRandomNoSignallingTables) {
  // Noisy PR boxes v·PR + (1−v)·uniform are local iff v ≤ 1/2.
  for (double v : {0.2, 0.45, 0.55, 0.8}) {
    auto tables = exact_tables(OutcomeModel(pr_box()));
    for (auto& row : tables)
      for (auto& t : row)
        for (auto& p : t) p = v * p + (1 - v) * 0.25;
    const auto verdict = local_polytope_membership(tables);
    const double resid = oracle::local_hull_residual(to_oracle(tables));
    EXPECT_EQ(verdict.status == PolytopeVerdict::Status::Local, resid < 1e-6) << "v = " << v;
    EXPECT_EQ(verdict.status == PolytopeVerdict::Status::Local, v <= 0.5);
  }
}

TEST(Superdeterministic, S4Example) {
  const auto sd = superdeterministic_s4_example();
  EXPECT_TRUE(sd.lambda_depends_on_settings());
  const OutcomeModel m(sd);
  EXPECT_NEAR(model_chsh(m), 4.0, 1e-15);
  const auto flags = m.flags();
  EXPECT_TRUE(flags.measurement_independence_violated);
  EXPECT_FALSE(flags.parameter_independence_violated);
  const auto t = exact_tables(m);
  for (std::size_t x = 0; x < 2; ++x) EXPECT_NEAR(t[x][0][0] + t[x][0][1], t[x][1][0] + t[x][1][1], 1e-15);
  for (std::size_t y = 0; y < 2; ++y) EXPECT_NEAR(t[0][y][0] + t[0][y][2], t[1][y][0] + t[1][y][2], 1e-15);
  for (const auto& c : ChshCombination::all()) {
    EXPECT_NEAR(model_chsh(OutcomeModel(superdeterministic_s4_example(c)), c), 4.0, 1e-15);
  }
}

TEST(Flags, ExemplarsBreakDifferentAssumptions) {
  const auto box = OutcomeModel(pr_box()).flags();
  const auto sd = OutcomeModel(superdeterministic_s4_example()).flags();
  EXPECT_TRUE(box.parameter_independence_violated);
  EXPECT_FALSE(box.measurement_independence_violated);
  EXPECT_TRUE(sd.measurement_independence_violated);
  EXPECT_FALSE(sd.parameter_independence_violated);
  const auto q = optimal_quantum().flags();
  EXPECT_TRUE(q.outcome_independence_violated);
  const auto lhv = OutcomeModel(uniform_lhv_mixture()).flags();
  EXPECT_FALSE(lhv.measurement_independence_violated || lhv.parameter_independence_violated ||
               lhv.outcome_independence_violated);
}

TEST(SampleTrial, DeterministicAndSeeded) {
  const OutcomeModel det(DeterministicStrategy{{1, -1}, {-1, 1}});
  Stream rng(5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_trial(det, 1, 0, rng), (Outcome{-1, -1}));
  }
  const auto q = optimal_quantum();
  Stream r1(6), r2(6);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_trial(q, i % 2, (i / 2) % 2, r1), sample_trial(q, i % 2, (i / 2) % 2, r2));
}

TEST(SampleTrial, FrequenciesMatchExactTable) {
  Stream rng(7);
  for (const auto& m : {optimal_quantum(), OutcomeModel(superdeterministic_s4_example()), OutcomeModel(pr_box())}) {
    const auto t = exact_joint_table(m, 1, 1);
    std::array<int, 4> n{};
    const int trials = 1000000;
    for (int i = 0; i < trials; ++i) {
      const auto o = sample_trial(m, 1, 1, rng);
      ++n[outcome_index(o.a, o.b)];
    }
    for (int k = 0; k < 4; ++k) {
      const double sigma = std::sqrt(t[k] * (1 - t[k]) / trials);
      EXPECT_NEAR(n[k] / double(trials), t[k], 5 * sigma + 1e-15);
    }
  }
}

TEST(Validation, RejectsBadParameters) {
  EXPECT_THROW(OutcomeModel(DeterministicStrategy{{1, 0}, {1, 1}}), InvariantError);
  EXPECT_THROW(OutcomeModel(DeterministicStrategy{{}, {1}}), InvariantError);
  MixedLHVModel neg;
  neg.strategies.push_back({DeterministicStrategy{{1, 1}, {1, 1}}, -0.5});
  neg.strategies.push_back({DeterministicStrategy{{1, 1}, {1, 1}}, 1.5});
  EXPECT_THROW(OutcomeModel{neg}, InvariantError);
  MixedLHVModel unnorm;
  unnorm.strategies.push_back({DeterministicStrategy{{1, 1}, {1, 1}}, 0.7});
  EXPECT_THROW(OutcomeModel{unnorm}, InvariantError);
}

TEST(Json, RoundTripEveryKind) {
  Stream rng(8);
  const std::vector<OutcomeModel> models{
      optimal_quantum(), OutcomeModel(DeterministicStrategy{{1, -1}, {-1, 1}}), OutcomeModel(random_mixture(rng)),
      OutcomeModel(superdeterministic_s4_example()), OutcomeModel(pr_box(ChshCombination::parse("-+--"))),
      OutcomeModel(NonlocalModel{NonlocalModel::Rule::SignallingControl, ChshCombination::standard()})};
  for (const auto& m : models) {
    const auto back = OutcomeModel::from_json(m.to_json());
    EXPECT_EQ(back.kind(), m.kind());
    EXPECT_EQ(back.to_json(), m.to_json());
    EXPECT_EQ(back.description_hash(), m.description_hash());
    const auto a = exact_tables(m), b = exact_tables(back);
    for (std::size_t x = 0; x < a.size(); ++x)
      for (std::size_t y = 0; y < a[x].size(); ++y)
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[x][y][k], b[x][y][k], 1e-15);
  }
  EXPECT_THROW(OutcomeModel::from_json({{"kind", "bogus"}}), InvariantError);
  EXPECT_THROW(OutcomeModel::from_json({{"kind", "deterministic_lhv"}}), InvariantError);
}

}  // namespace
}  // namespace bellkc

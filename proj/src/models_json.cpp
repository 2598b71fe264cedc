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

// JSON descriptions of outcome models: a "kind" tag plus per-kind parameters.
//
//   {"kind": "quantum", "rho": [[[re, im], ...], ...],
//    "alice_angles": [...], "bob_angles": [...]}
//   {"kind": "deterministic_lhv", "a": [1, -1], "b": [1, 1]}
//   {"kind": "mixed_lhv", "strategies": [{"a": [...], "b": [...], "weight": w}, ...]}
//   {"kind": "superdeterministic", "conditional_lambda": [[[{strategy}, ...], ...], ...]}
//   {"kind": "nonlocal", "rule": "pr_box" | "signalling_control", "pattern": "+-++"}

#include "bellkc/models.hpp"
#include "bellkc/quantum_json.hpp"

namespace bellkc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

nlohmann::json strategy_json(const DeterministicStrategy& s) { return {{"a", s.a_of_x}, {"b", s.b_of_y}}; }

nlohmann::json weighted_json(const std::vector<WeightedStrategy>& ws) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& w : ws) {
    auto j = strategy_json(w.strategy);
    j["weight"] = w.weight;
    arr.push_back(std::move(j));
  }
  return arr;
}

DeterministicStrategy strategy_from(const nlohmann::json& j) {
  return {j.at("a").get<std::vector<int>>(), j.at("b").get<std::vector<int>>()};
}

std::vector<WeightedStrategy> weighted_from(const nlohmann::json& arr) {
  std::vector<WeightedStrategy> out;
  for (const auto& j : arr) out.push_back({strategy_from(j), j.at("weight").get<double>()});
  return out;
}

}  // namespace

nlohmann::json OutcomeModel::to_json() const {
  return std::visit(
      overloaded{
          [](const QuantumModel& q) -> nlohmann::json {
            return {{"kind", "quantum"},
                    {"rho", operator_to_json(q.rho.matrix())},
                    {"alice_angles", q.alice_angles},
                    {"bob_angles", q.bob_angles}};
          },
          [](const DeterministicStrategy& s) -> nlohmann::json {
            auto j = strategy_json(s);
            j["kind"] = "deterministic_lhv";
            return j;
          },
          [](const MixedLHVModel& m) -> nlohmann::json {
            return {{"kind", "mixed_lhv"}, {"strategies", weighted_json(m.strategies)}};
          },
          [](const SuperdeterministicModel& m) -> nlohmann::json {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& row : m.conditional_lambda) {
              nlohmann::json r = nlohmann::json::array();
              for (const auto& dist : row) r.push_back(weighted_json(dist));
              rows.push_back(std::move(r));
            }
            return {{"kind", "superdeterministic"}, {"conditional_lambda", rows}};
          },
          [](const NonlocalModel& m) -> nlohmann::json {
            return {{"kind", "nonlocal"},
                    {"rule", m.rule == NonlocalModel::Rule::PrBox ? "pr_box" : "signalling_control"},
                    {"pattern", m.pattern.label()}};
          },
      },
      v_);
}

OutcomeModel OutcomeModel::from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "quantum") {
      const auto rho = DensityOperator::from_matrix(operator_from_json(j.at("rho")));
      return quantum_model(rho, j.at("alice_angles").get<std::vector<double>>(),
                           j.at("bob_angles").get<std::vector<double>>());
    }
    if (kind == "deterministic_lhv") return OutcomeModel(strategy_from(j));
    if (kind == "mixed_lhv") return OutcomeModel(MixedLHVModel{weighted_from(j.at("strategies"))});
    if (kind == "superdeterministic") {
      SuperdeterministicModel m;
      for (const auto& row : j.at("conditional_lambda")) {
        std::vector<std::vector<WeightedStrategy>> r;
        for (const auto& dist : row) r.push_back(weighted_from(dist));
        m.conditional_lambda.push_back(std::move(r));
      }
      return OutcomeModel(std::move(m));
    }
    if (kind == "nonlocal") {
      NonlocalModel m;
      const auto rule = j.at("rule").get<std::string>();
      if (rule == "pr_box") {
        m.rule = NonlocalModel::Rule::PrBox;
      } else if (rule == "signalling_control") {
        m.rule = NonlocalModel::Rule::SignallingControl;
      } else {
        throw InvariantError("model json: unknown nonlocal rule '" + rule + "'");
      }
      if (j.contains("pattern")) m.pattern = ChshCombination::parse(j.at("pattern").get<std::string>());
      return OutcomeModel(m);
    }
    throw InvariantError("model json: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvariantError(std::string("model json: ") + e.what());
  }
}

}  // namespace bellkc

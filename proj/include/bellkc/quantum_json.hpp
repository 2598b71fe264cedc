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

// Operators serialize as nested arrays of [re, im] pairs, row-major.

#include <json.hpp>

#include "bellkc/quantum.hpp"

namespace bellkc {

template <typename Scalar>
nlohmann::json operator_to_json(const OperatorT<Scalar>& op) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < op.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < op.cols(); ++j) {
      row.push_back({op(i, j).real(), op(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Scalar = double>
OperatorT<Scalar> operator_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw InvariantError("operator json: expected non-empty array");
  const auto n = static_cast<Eigen::Index>(j.size());
  OperatorT<Scalar> op(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw InvariantError("operator json: rows must form a square matrix");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& z = row[static_cast<std::size_t>(c)];
      if (z.is_number()) {
        op(r, c) = {z.get<Scalar>(), Scalar(0)};
      } else if (z.is_array() && z.size() == 2) {
        op(r, c) = {z[0].get<Scalar>(), z[1].get<Scalar>()};
      } else {
        throw InvariantError("operator json: entries must be numbers or [re, im]");
      }
    }
  }
  return op;
}

template <typename Scalar>
nlohmann::json context_to_json(const ContextT<Scalar>& c) {
  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : c.projectors()) {
    ps.push_back({{"rank", p.rank()}, {"matrix", operator_to_json(p.matrix())}});
  }
  return {{"dim", c.dim()}, {"maximal", c.is_maximal()}, {"projectors", ps}};
}

}  // namespace bellkc

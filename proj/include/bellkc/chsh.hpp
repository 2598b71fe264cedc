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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "bellkc/errors.hpp"

namespace bellkc {

/// Sign pattern of a CHSH combination, S = Σ_xy sign[x][y]·E(x, y), over two
/// settings per side. The textbook form
///     S = E(x,y) + E(x',y) + E(x',y') − E(x,y')
/// is `standard()`. A valid pattern has an odd number of minus signs, which
/// gives eight patterns in total.
struct ChshCombination {
  std::array<std::array<int, 2>, 2> sign{{{1, -1}, {1, 1}}};

  static constexpr ChshCombination standard() { return {}; }

  /// The eight CHSH patterns: one minus sign in each position, then their
  /// negations.
  static constexpr std::array<ChshCombination, 8> all() {
    std::array<ChshCombination, 8> out{};
    for (std::size_t k = 0; k < 4; ++k) {
      ChshCombination c;
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) c.sign[x][y] = (2 * x + y == k) ? -1 : 1;
      out[k] = c;
      for (auto& row : c.sign)
        for (auto& s : row) s = -s;
      out[k + 4] = c;
    }
    return out;
  }

  /// "+-++" style label in (x0y0, x0y1, x1y0, x1y1) order.
  std::string label() const {
    std::string s;
    for (const auto& row : sign)
      for (int v : row) s.push_back(v > 0 ? '+' : '-');
    return s;
  }

  static ChshCombination parse(std::string_view label) {
    if (label.size() != 4) throw InvariantError("CHSH combination must have 4 signs");
    ChshCombination c;
    int minus = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (label[k] != '+' && label[k] != '-') {
        throw InvariantError("CHSH combination: expected '+' or '-'");
      }
      c.sign[k / 2][k % 2] = label[k] == '+' ? 1 : -1;
      minus += label[k] == '-';
    }
    if (minus % 2 == 0) throw InvariantError("CHSH combination needs an odd number of '-'");
    return c;
  }

  /// Signed sum over a 2×2 table of correlations.
  template <typename T>
  constexpr T apply(const std::array<std::array<T, 2>, 2>& e) const {
    T s{};
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) s += static_cast<T>(sign[x][y]) * e[x][y];
    return s;
  }

  friend constexpr bool operator==(const ChshCombination&, const ChshCombination&) = default;
};

}  // namespace bellkc

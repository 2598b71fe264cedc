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

// Independent reference computations for the tests. Nothing here calls into
// the library's linear algebra: plain std::complex loops only.

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;

inline Mat zeros(std::size_t n) { return Mat(n, std::vector<cd>(n, 0.0)); }

inline Mat kron(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), m = b.size();
  Mat out = zeros(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) out[i * m + k][j * m + l] = a[i][j] * b[k][l];
  return out;
}

/// Re Tr(a b).
inline double trace_product(const Mat& a, const Mat& b) {
  cd t = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a.size(); ++k) t += a[i][k] * b[k][i];
  return t.real();
}

inline Mat outer(const std::vector<cd>& v) {
  Mat out = zeros(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i][j] = v[i] * std::conj(v[j]);
  return out;
}

/// Φ⁺ joint table by amplitudes: P(a,b) = |(u_a ⊗ v_b)·ψ|² with ψ = (1,0,0,1)/√2,
/// u_+ = (cos θ, sin θ), u_− = (−sin θ, cos θ). Order (++, +−, −+, −−).
inline std::array<double, 4> phi_plus_table(double ta, double tb) {
  const double s = 1.0 / std::sqrt(2.0);
  const double psi[4] = {s, 0.0, 0.0, s};
  auto ket = [](double t, int sign) {
    return sign > 0 ? std::array<double, 2>{std::cos(t), std::sin(t)} : std::array<double, 2>{-std::sin(t), std::cos(t)};
  };
  std::array<double, 4> out{};
  int k = 0;
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      const auto u = ket(ta, a), v = ket(tb, b);
      double amp = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) amp += u[i] * v[j] * psi[2 * i + j];
      out[k++] = amp * amp;
    }
  return out;
}

inline double phi_plus_correlation(double ta, double tb) {
  const auto t = phi_plus_table(ta, tb);
  return t[0] + t[3] - t[1] - t[2];
}

struct GridOptimum {
  double s = 0.0;
  double a1 = 0.0, b0 = 0.0, b1 = 0.0;
};

/// Maximizes S = E(a0,b0) − E(a0,b1) + E(a1,b0) + E(a1,b1) over a grid with a0 = 0
/// (Φ⁺ correlations are invariant under a common rotation).
inline GridOptimum chsh_grid_search(int steps = 64) {
  GridOptimum best;
  const double h = std::numbers::pi / steps;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      for (int k = 0; k < steps; ++k) {
        const double a1 = i * h, b0 = j * h, b1 = k * h;
        const double s = phi_plus_correlation(0, b0) - phi_plus_correlation(0, b1) + phi_plus_correlation(a1, b0) +
                         phi_plus_correlation(a1, b1);
        if (s > best.s + 1e-12) best = {s, a1, b0, b1};
      }
  return best;
}

/// Tables as t[x][y][k], k in (++, +−, −+, −−).
using Tables = std::array<std::array<std::array<double, 4>, 2>, 2>;

/// Deterministic strategy number s: bit 3 → a(0) = −1, bit 2 → a(1), bit 1 → b(0), bit 0 → b(1).
inline Tables strategy_tables(int s) {
  Tables t{};
  const int a[2] = {(s >> 3) & 1 ? -1 : 1, (s >> 2) & 1 ? -1 : 1};
  const int b[2] = {(s >> 1) & 1 ? -1 : 1, s & 1 ? -1 : 1};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) t[x][y][(a[x] > 0 ? 0 : 2) + (b[y] > 0 ? 0 : 1)] = 1.0;
  return t;
}

/// Euclidean projection onto the probability simplex (sort-based).
inline std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) theta = t;
  }
  for (auto& x : v) x = std::max(0.0, x - theta);
  return v;
}

/// Least-squares distance from the tables to the convex hull of the 16
/// deterministic tables, by projected gradient descent on the simplex.
inline double local_hull_residual(const Tables& target, int iterations = 20000) {
  std::array<Tables, 16> verts;
  for (int s = 0; s < 16; ++s) verts[s] = strategy_tables(s);
  std::vector<double> w(16, 1.0 / 16);
  const double step = 1.0 / 16.0;  // 1/L with L ≤ largest eigenvalue of MᵀM (4 · 4)
  auto residual_vec = [&](const std::vector<double>& wt) {
    Tables r = target;
    for (int s = 0; s < 16; ++s)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int k = 0; k < 4; ++k) r[x][y][k] -= wt[s] * verts[s][x][y][k];
    return r;
  };
  for (int it = 0; it < iterations; ++it) {
    const Tables r = residual_vec(w);
    std::vector<double> g(16, 0.0);
    for (int s = 0; s < 16; ++s)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int k = 0; k < 4; ++k) g[s] -= verts[s][x][y][k] * r[x][y][k];
    for (int s = 0; s < 16; ++s) w[s] -= step * g[s];
    w = project_simplex(w);
  }
  const Tables r = residual_vec(w);
  double n2 = 0.0;
  for (const auto& row : r)
    for (const auto& t : row)
      for (double v : t) n2 += v * v;
  return std::sqrt(n2);
}

/// SplitMix64 step, written out from its published constants.
inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace oracle

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

// Finite-dimensional quantum probability: density operators, projectors,
// contexts (complete orthogonal families), dichotomic observables and the
// Born rule. Everything is templated on the real scalar type; the aliases at
// the bottom fix it to double for the rest of the library.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <limits>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bellkc/errors.hpp"

namespace bellkc {

template <typename Scalar>
using OperatorT =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using KetT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Absolute entrywise tolerance for exact-algebra invariants.
template <typename Scalar>
inline constexpr Scalar kDefaultTol =
    std::max(Scalar(1e-10), Scalar(100) * std::numeric_limits<Scalar>::epsilon());

/// Max-norm ‖m‖_max = max_ij |m_ij|.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

template <typename Scalar>
bool is_hermitian(const OperatorT<Scalar>& op,
                  Scalar tol = kDefaultTol<Scalar>) {
  return op.rows() == op.cols() && max_abs(op - op.adjoint()) <= tol;
}

/// Re Tr(a·b) without forming the product.
template <typename Scalar>
Scalar trace_product(const OperatorT<Scalar>& a, const OperatorT<Scalar>& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

namespace detail {

template <typename Scalar>
void require_square(const OperatorT<Scalar>& op, const char* what) {
  if (op.rows() != op.cols() || op.rows() < 1) {
    throw DimensionError(std::string(what) + ": operator must be square with dim >= 1");
  }
}

template <typename Scalar>
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

/// Quantum state ρ: Hermitian, unit trace, positive semidefinite.
template <typename Scalar>
class DensityOperatorT {
 public:
  using Op = OperatorT<Scalar>;

  static DensityOperatorT from_matrix(const Op& op,
                                      Scalar tol = kDefaultTol<Scalar>) {
    detail::require_square(op, "DensityOperator");
    if (!is_hermitian(op, tol)) throw InvariantError("DensityOperator: not Hermitian");
    if (std::abs(op.trace() - std::complex<Scalar>(1)) > tol) {
      throw InvariantError("DensityOperator: trace differs from 1");
    }
    Op herm = (op + op.adjoint()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Op> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
      throw InvariantError("DensityOperator: negative eigenvalue");
    }
    return DensityOperatorT(std::move(herm));
  }

  /// |ψ⟩⟨ψ| for a nonzero ψ (normalized here).
  static DensityOperatorT pure(const KetT<Scalar>& psi) {
    const Scalar norm = psi.norm();
    if (psi.size() < 1 || !(norm > 0)) throw InvariantError("DensityOperator: zero vector");
    KetT<Scalar> u = psi / norm;
    return DensityOperatorT(u * u.adjoint());
  }

  static DensityOperatorT maximally_mixed(Eigen::Index dim) {
    if (dim < 1) throw InvariantError("DensityOperator: dim must be >= 1");
    return DensityOperatorT(Op::Identity(dim, dim) / Scalar(dim));
  }

  const Op& matrix() const noexcept { return op_; }
  Eigen::Index dim() const noexcept { return op_.rows(); }

 private:
  explicit DensityOperatorT(Op op) : op_(std::move(op)) {}
  Op op_;
};

/// Orthogonal projection P = P† = P².
template <typename Scalar>
class ProjectorT {
 public:
  using Op = OperatorT<Scalar>;

  static ProjectorT from_matrix(const Op& op, Scalar tol = kDefaultTol<Scalar>) {
    detail::require_square(op, "Projector");
    if (!is_hermitian(op, tol)) throw InvariantError("Projector: not Hermitian");
    if (max_abs(Op(op * op - op)) > tol) throw InvariantError("Projector: not idempotent");
    const Scalar tr = op.trace().real();
    const Scalar rank = std::round(tr);
    if (std::abs(tr - rank) > tol) throw InvariantError("Projector: non-integer trace");
    return ProjectorT(op, static_cast<int>(rank));
  }

  /// Rank-1 projector onto span{ψ}.
  static ProjectorT onto(const KetT<Scalar>& psi) {
    const Scalar norm = psi.norm();
    if (psi.size() < 1 || !(norm > 0)) throw InvariantError("Projector: zero vector");
    KetT<Scalar> u = psi / norm;
    return ProjectorT(u * u.adjoint(), 1);
  }

  /// Projector onto the span of orthonormal columns.
  static ProjectorT onto_columns(const Op& columns, Scalar tol = kDefaultTol<Scalar>) {
    return from_matrix(Op(columns * columns.adjoint()), tol);
  }

  static ProjectorT zero(Eigen::Index dim) { return ProjectorT(Op::Zero(dim, dim), 0); }
  static ProjectorT identity(Eigen::Index dim) {
    return ProjectorT(Op::Identity(dim, dim), static_cast<int>(dim));
  }

  const Op& matrix() const noexcept { return op_; }
  Eigen::Index dim() const noexcept { return op_.rows(); }
  int rank() const noexcept { return rank_; }

  /// I − P.
  ProjectorT complement() const {
    return ProjectorT(Op(Op::Identity(dim(), dim()) - op_), static_cast<int>(dim()) - rank_);
  }

 private:
  ProjectorT(Op op, int rank) : op_(std::move(op)), rank_(rank) {}
  Op op_;
  int rank_;
};

/// Complete family of mutually orthogonal projectors. Maximality (all rank
/// one) is recorded, not required.
template <typename Scalar>
class ContextT {
 public:
  using Proj = ProjectorT<Scalar>;
  using Op = OperatorT<Scalar>;

  static ContextT from_projectors(std::vector<Proj> projectors,
                                  Scalar tol = kDefaultTol<Scalar>) {
    if (projectors.empty()) throw InvariantError("Context: no projectors");
    const Eigen::Index dim = projectors.front().dim();
    Op sum = Op::Zero(dim, dim);
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      detail::require_same_dim<Scalar>(projectors[i].dim(), dim, "Context");
      for (std::size_t j = i + 1; j < projectors.size(); ++j) {
        if (max_abs(Op(projectors[i].matrix() * projectors[j].matrix())) > tol) {
          throw InvariantError("Context: projectors " + std::to_string(i) + " and " +
                               std::to_string(j) + " are not orthogonal");
        }
      }
      sum += projectors[i].matrix();
    }
    if (max_abs(Op(sum - Op::Identity(dim, dim))) > tol) {
      throw InvariantError("Context: projectors do not sum to the identity");
    }
    return ContextT(std::move(projectors));
  }

  static ContextT computational_basis(Eigen::Index dim) {
    std::vector<Proj> ps;
    for (Eigen::Index k = 0; k < dim; ++k) ps.push_back(Proj::onto(KetT<Scalar>::Unit(dim, k)));
    return ContextT(std::move(ps));
  }

  const std::vector<Proj>& projectors() const noexcept { return projectors_; }
  std::size_t size() const noexcept { return projectors_.size(); }
  Eigen::Index dim() const noexcept { return projectors_.front().dim(); }
  const Proj& operator[](std::size_t i) const { return projectors_.at(i); }

  bool is_maximal() const noexcept {
    for (const auto& p : projectors_)
      if (p.rank() != 1) return false;
    return true;
  }

  /// True if some member equals p in max-norm.
  bool contains(const Proj& p, Scalar tol = kDefaultTol<Scalar>) const {
    if (p.dim() != dim()) return false;
    for (const auto& q : projectors_)
      if (max_abs(Op(q.matrix() - p.matrix())) <= tol) return true;
    return false;
  }

 private:
  explicit ContextT(std::vector<Proj> ps) : projectors_(std::move(ps)) {}
  std::vector<Proj> projectors_;
};

/// ±1-valued observable given by its two spectral projectors.
template <typename Scalar>
class DichotomicObservableT {
 public:
  using Proj = ProjectorT<Scalar>;
  using Op = OperatorT<Scalar>;

  static DichotomicObservableT from_plus(const Proj& plus) {
    return DichotomicObservableT(plus, plus.complement());
  }

  static DichotomicObservableT from_pair(const Proj& plus, const Proj& minus,
                                         Scalar tol = kDefaultTol<Scalar>) {
    detail::require_same_dim<Scalar>(plus.dim(), minus.dim(), "DichotomicObservable");
    const Eigen::Index d = plus.dim();
    if (max_abs(Op(plus.matrix() + minus.matrix() - Op::Identity(d, d))) > tol ||
        max_abs(Op(plus.matrix() * minus.matrix())) > tol) {
      throw InvariantError("DichotomicObservable: plus and minus are not complementary");
    }
    return DichotomicObservableT(plus, minus);
  }

  const Proj& plus() const noexcept { return plus_; }
  const Proj& minus() const noexcept { return minus_; }
  /// Spectral projector for outcome +1 or −1.
  const Proj& outcome(int sign) const { return sign > 0 ? plus_ : minus_; }
  Eigen::Index dim() const noexcept { return plus_.dim(); }

  /// Same observable with the ±1 labels exchanged.
  DichotomicObservableT relabeled() const { return DichotomicObservableT(minus_, plus_); }

 private:
  DichotomicObservableT(Proj plus, Proj minus)
      : plus_(std::move(plus)), minus_(std::move(minus)) {}
  Proj plus_;
  Proj minus_;
};

/// P(ab|xy) in the fixed order (++, +−, −+, −−).
template <typename Scalar>
using JointTableT = std::array<Scalar, 4>;

/// Index of outcome pair (a, b) ∈ {±1}² in a JointTable.
constexpr std::size_t outcome_index(int a, int b) noexcept {
  return (a > 0 ? 0u : 2u) + (b > 0 ? 0u : 1u);
}
constexpr int outcome_a(std::size_t index) noexcept { return index < 2 ? 1 : -1; }
constexpr int outcome_b(std::size_t index) noexcept { return index % 2 == 0 ? 1 : -1; }

// ---------------------------------------------------------------------------
// Operations

template <typename Scalar>
OperatorT<Scalar> tensor(const OperatorT<Scalar>& a, const OperatorT<Scalar>& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

template <typename Scalar>
ProjectorT<Scalar> tensor(const ProjectorT<Scalar>& a, const ProjectorT<Scalar>& b) {
  return ProjectorT<Scalar>::from_matrix(tensor(a.matrix(), b.matrix()));
}

/// Tr(ρP), clamped to [0, 1] when within tol of the band.
template <typename Scalar>
Scalar born_probability(const DensityOperatorT<Scalar>& rho, const ProjectorT<Scalar>& p,
                        Scalar tol = kDefaultTol<Scalar>) {
  detail::require_same_dim<Scalar>(rho.dim(), p.dim(), "born_probability");
  const Scalar v = trace_product(rho.matrix(), p.matrix());
  if (v < -tol || v > Scalar(1) + tol) {
    throw InvariantError("born_probability: Tr(rho P) = " + std::to_string(v) +
                         " outside [0, 1]");
  }
  return std::clamp(v, Scalar(0), Scalar(1));
}

/// Born distribution over the members of a context, renormalized exactly.
template <typename Scalar>
std::vector<Scalar> context_distribution(const DensityOperatorT<Scalar>& rho,
                                         const ContextT<Scalar>& c,
                                         Scalar tol = kDefaultTol<Scalar>) {
  detail::require_same_dim<Scalar>(rho.dim(), c.dim(), "context_distribution");
  std::vector<Scalar> probs;
  probs.reserve(c.size());
  Scalar total = 0;
  for (const auto& p : c.projectors()) {
    probs.push_back(born_probability(rho, p, tol));
    total += probs.back();
  }
  if (std::abs(total - Scalar(1)) > tol) {
    throw InvariantError("context_distribution: probabilities sum to " + std::to_string(total));
  }
  for (auto& v : probs) v /= total;
  return probs;
}

/// Linear polarizer at angle θ: plus = |θ⟩⟨θ| with |θ⟩ = (cos θ, sin θ).
template <typename Scalar>
DichotomicObservableT<Scalar> polarization_observable(Scalar theta) {
  KetT<Scalar> v(2);
  v << std::cos(theta), std::sin(theta);
  return DichotomicObservableT<Scalar>::from_plus(ProjectorT<Scalar>::onto(v));
}

/// (|HH⟩ + |VV⟩)/√2.
template <typename Scalar>
DensityOperatorT<Scalar> photon_pair_state() {
  KetT<Scalar> phi = KetT<Scalar>::Zero(4);
  phi(0) = phi(3) = Scalar(1) / std::sqrt(Scalar(2));
  return DensityOperatorT<Scalar>::pure(phi);
}

/// The four joint projectors Pa⊗Pb, in JointTable order.
template <typename Scalar>
ContextT<Scalar> joint_context(const DichotomicObservableT<Scalar>& a,
                               const DichotomicObservableT<Scalar>& b) {
  std::vector<ProjectorT<Scalar>> ps;
  for (std::size_t k = 0; k < 4; ++k) {
    ps.push_back(tensor(a.outcome(outcome_a(k)), b.outcome(outcome_b(k))));
  }
  return ContextT<Scalar>::from_projectors(std::move(ps));
}

template <typename Scalar>
JointTableT<Scalar> joint_outcome_distribution(const DensityOperatorT<Scalar>& rho,
                                               const DichotomicObservableT<Scalar>& a,
                                               const DichotomicObservableT<Scalar>& b) {
  detail::require_same_dim<Scalar>(rho.dim(), a.dim() * b.dim(),
                                   "joint_outcome_distribution");
  const auto probs = context_distribution(rho, joint_context(a, b));
  return {probs[0], probs[1], probs[2], probs[3]};
}

/// E = Σ ab·P(ab) for a joint table.
template <typename Scalar>
Scalar table_correlation(const JointTableT<Scalar>& t) {
  return t[0] + t[3] - t[1] - t[2];
}

template <typename Scalar>
Scalar correlation(const DensityOperatorT<Scalar>& rho, const DichotomicObservableT<Scalar>& a,
                   const DichotomicObservableT<Scalar>& b) {
  return table_correlation(joint_outcome_distribution(rho, a, b));
}

using Operator = OperatorT<double>;
using Ket = KetT<double>;
using DensityOperator = DensityOperatorT<double>;
using Projector = ProjectorT<double>;
using Context = ContextT<double>;
using DichotomicObservable = DichotomicObservableT<double>;
using JointTable = JointTableT<double>;
inline constexpr double kTolerance = kDefaultTol<double>;

}  // namespace bellkc

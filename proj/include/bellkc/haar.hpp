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

#include <complex>

#include "bellkc/quantum.hpp"
#include "bellkc/rng.hpp"

namespace bellkc {

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the phases
/// of R's diagonal folded back into Q so the distribution is exactly Haar.
template <typename Scalar = double>
OperatorT<Scalar> haar_unitary(Eigen::Index dim, Stream& rng) {
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  OperatorT<Scalar> z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i)
      z(i, j) = std::complex<Scalar>(Scalar(rng.normal()), Scalar(rng.normal())) * inv_sqrt2;
  Eigen::HouseholderQR<OperatorT<Scalar>> qr(z);
  OperatorT<Scalar> q = qr.householderQ();
  const OperatorT<Scalar>& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const std::complex<Scalar> d = r(k, k);
    const Scalar mag = std::abs(d);
    if (mag > 0) q.col(k) *= d / mag;
  }
  return q;
}

/// Random mixed state ρ = GG†/Tr(GG†) with G complex Ginibre.
template <typename Scalar = double>
DensityOperatorT<Scalar> random_density_operator(Eigen::Index dim, Stream& rng) {
  OperatorT<Scalar> g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i)
      g(i, j) = std::complex<Scalar>(Scalar(rng.normal()), Scalar(rng.normal()));
  OperatorT<Scalar> rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperatorT<Scalar>::from_matrix(rho);
}

/// Random pure state |ψ⟩⟨ψ| with ψ Haar distributed.
template <typename Scalar = double>
DensityOperatorT<Scalar> random_pure_state(Eigen::Index dim, Stream& rng) {
  return DensityOperatorT<Scalar>::pure(haar_unitary<Scalar>(dim, rng).col(0));
}

}  // namespace bellkc

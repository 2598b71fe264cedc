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

#include "bellkc/gleason.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "bellkc/haar.hpp"
#include "bellkc/quantum_json.hpp"
#include "bellkc/rng.hpp"

namespace bellkc {

namespace {

void require_dim(const Projector& p, Eigen::Index dim, const char* what) {
  if (p.dim() != dim) {
    throw DimensionError(std::string(what) + ": projector dim " + std::to_string(p.dim()) +
                         " vs frame function dim " + std::to_string(dim));
  }
}

// Hash of a matrix's entries mapped to [-1, 1].
double entry_hash(const Operator& op) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (Eigen::Index k = 0; k < op.size(); ++k) {
    for (double part : {op.data()[k].real(), op.data()[k].imag()}) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &part, sizeof bits);
      h = mix64(h ^ bits);
    }
  }
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

// Random composition of dim into positive parts.
std::vector<int> random_rank_profile(Eigen::Index dim, Stream& rng) {
  std::vector<int> profile;
  auto remaining = static_cast<int>(dim);
  while (remaining > 0) {
    const int part = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(remaining));
    profile.push_back(part);
    remaining -= part;
  }
  return profile;
}

}  // namespace

FrameFunction FrameFunction::trace_form(const DensityOperator& rho) {
  const DensityOperator state = rho;
  return FrameFunction(
      rho.dim(), [state](const Projector& p) { return born_probability(state, p); }, "trace_form",
      state);
}

FrameFunction FrameFunction::from_rule(Eigen::Index dim, Rule rule, std::string name) {
  if (dim < 1) throw InvariantError("FrameFunction: dim must be >= 1");
  FrameFunction m(dim, std::move(rule), std::move(name), std::nullopt);
  if (std::abs(m(Projector::zero(dim))) > kTolerance) throw InvariantError("FrameFunction: m(0) != 0");
  if (std::abs(m(Projector::identity(dim)) - 1.0) > kTolerance) {
    throw InvariantError("FrameFunction: m(I) != 1");
  }
  return m;
}

double FrameFunction::operator()(const Projector& p) const {
  require_dim(p, dim_, "FrameFunction");
  return rule_(p);
}

FrameFunction rank_frame_function(Eigen::Index dim) {
  const auto d = static_cast<double>(dim);
  return FrameFunction::from_rule(
      dim, [d](const Projector& p) { return p.rank() / d; }, "rank_over_dim");
}

FrameFunction squared_born_frame_function(const DensityOperator& rho) {
  return FrameFunction::from_rule(
      rho.dim(),
      [rho](const Projector& p) {
        const double v = born_probability(rho, p);
        return v * v;
      },
      "squared_born");
}

FrameFunction perturbed_frame_function(const DensityOperator& rho, double epsilon) {
  return FrameFunction::from_rule(
      rho.dim(),
      [rho, epsilon](const Projector& p) {
        const double v = born_probability(rho, p);
        if (p.rank() == 0 || p.rank() == p.dim()) return v;
        return std::clamp(v + epsilon * entry_hash(p.matrix()), 0.0, 1.0);
      },
      "perturbed_trace_form");
}

FrameFunction dim2_counterexample() {
  return FrameFunction::from_rule(
      2,
      [](const Projector& p) {
        if (p.rank() == 0) return 0.0;
        if (p.rank() == 2) return 1.0;
        // Bloch z-component of a rank-1 qubit projector.
        const double nz = (p.matrix()(0, 0) - p.matrix()(1, 1)).real();
        return 0.5 * (1.0 + nz * nz * nz);
      },
      "dim2_cubic_bloch");
}

Context random_context(Eigen::Index dim, std::span<const int> rank_profile, std::uint64_t seed) {
  if (dim < 1) throw InvariantError("random_context: dim must be >= 1");
  int total = 0;
  for (int r : rank_profile) {
    if (r < 1) throw InvariantError("random_context: ranks must be positive");
    total += r;
  }
  if (total != dim) throw InvariantError("random_context: rank profile must sum to dim");
  Stream rng(seed);
  const Operator u = haar_unitary(dim, rng);
  std::vector<Projector> ps;
  Eigen::Index offset = 0;
  for (int r : rank_profile) {
    ps.push_back(Projector::onto_columns(u.middleCols(offset, r)));
    offset += r;
  }
  return Context::from_projectors(std::move(ps));
}

std::vector<Operator> traceless_hermitian_basis(Eigen::Index dim) {
  using C = std::complex<double>;
  std::vector<Operator> basis;
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      Operator sym = Operator::Zero(dim, dim);
      sym(j, k) = sym(k, j) = 1.0;
      basis.push_back(sym);
      Operator anti = Operator::Zero(dim, dim);
      anti(j, k) = C(0, -1);
      anti(k, j) = C(0, 1);
      basis.push_back(anti);
    }
  }
  for (Eigen::Index l = 1; l < dim; ++l) {
    Operator diag = Operator::Zero(dim, dim);
    const double scale = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) diag(j, j) = scale;
    diag(l, l) = -scale * static_cast<double>(l);
    basis.push_back(diag);
  }
  return basis;
}

nlohmann::json AdditivityReport::to_json() const {
  return {{"dim", dim},
          {"n_contexts_tested", n_contexts_tested},
          {"n_subset_checks", n_subset_checks},
          {"worst_violation", worst_violation},
          {"passed", passed}};
}

AdditivityReport check_orthogonal_additivity(const FrameFunction& m, std::size_t n_contexts,
                                             Eigen::Index dim, std::uint64_t seed, double tol) {
  if (dim != m.dim()) throw DimensionError("check_orthogonal_additivity: dim does not match m");
  AdditivityReport report;
  report.dim = dim;
  double worst = std::abs(m(Projector::identity(dim)) - 1.0);
  for (std::size_t k = 0; k < n_contexts; ++k) {
    Stream rng(derive_seed(seed, k));
    const auto profile = random_rank_profile(dim, rng);
    const Context c = random_context(dim, profile, rng());
    std::vector<double> values;
    for (const auto& p : c.projectors()) values.push_back(m(p));
    const auto n = static_cast<std::uint32_t>(c.size());
    for (std::uint32_t subset = 1; subset < (1u << n); ++subset) {
      Operator sum = Operator::Zero(dim, dim);
      double expected = 0.0;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (subset & (1u << i)) {
          sum += c[i].matrix();
          expected += values[i];
        }
      }
      const double got = std::popcount(subset) == 1 ? values[std::countr_zero(subset)]
                                                    : m(Projector::from_matrix(sum));
      worst = std::max(worst, std::abs(got - expected));
      ++report.n_subset_checks;
    }
    ++report.n_contexts_tested;
  }
  report.worst_violation = worst;
  report.passed = worst <= tol;
  return report;
}

std::vector<FrameSample> sample_frame_function(const FrameFunction& m, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<FrameSample> samples;
  samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Stream rng(derive_seed(seed, k));
    const Operator u = haar_unitary(m.dim(), rng);
    auto p = Projector::onto(u.col(0));
    const double v = m(p);
    samples.push_back({std::move(p), v});
  }
  return samples;
}

nlohmann::json TraceFormFit::to_json() const {
  return {{"rho_estimate", operator_to_json(rho_estimate.matrix())},
          {"residual", residual},
          {"n_samples", n_samples},
          {"psd_projected", psd_projected}};
}

TraceFormFit fit_trace_form(std::span<const FrameSample> samples, Eigen::Index dim) {
  if (dim < 1) throw InvariantError("fit_trace_form: dim must be >= 1");
  const auto n_params = dim * dim;
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < n_params) {
    throw DomainError("fit_trace_form: need at least dim^2 = " + std::to_string(n_params) +
                      " samples, got " + std::to_string(n));
  }
  const auto basis = traceless_hermitian_basis(dim);
  // Columns: Tr(P) for the identity direction, then Tr(G_k P).
  Eigen::MatrixXd design(n, n_params);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (s.projector.dim() != dim) throw DimensionError("fit_trace_form: sample dimension mismatch");
    design(i, 0) = s.projector.rank();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      design(i, static_cast<Eigen::Index>(k) + 1) = trace_product(basis[k], s.projector.matrix());
    }
    rhs(i) = s.value - s.projector.rank() / static_cast<double>(dim);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> full(design);
  full.setThreshold(1e-10);
  if (full.rank() < n_params) {
    throw DomainError("fit_trace_form: projectors do not span the Hermitian operators (rank " +
                      std::to_string(full.rank()) + " < " + std::to_string(n_params) +
                      "); sample more projectors");
  }
  // Unit trace fixes the identity coefficient at 1/dim.
  const Eigen::MatrixXd traceless = design.rightCols(n_params - 1);
  const Eigen::VectorXd coeffs = traceless.colPivHouseholderQr().solve(rhs);

  Operator rho = Operator::Identity(dim, dim) / static_cast<double>(dim);
  for (std::size_t k = 0; k < basis.size(); ++k) rho += coeffs(static_cast<Eigen::Index>(k)) * basis[k];
  rho = (rho + rho.adjoint()).eval() / 2.0;

  bool projected = false;
  Eigen::SelfAdjointEigenSolver<Operator> es(rho);
  if (es.eigenvalues().minCoeff() < -kTolerance) {
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    rho = es.eigenvectors() * clipped.cast<std::complex<double>>().asDiagonal() *
          es.eigenvectors().adjoint();
    projected = true;
  }
  auto estimate = DensityOperator::from_matrix(rho);
  double residual = 0.0;
  for (const auto& s : samples) {
    residual = std::max(residual, std::abs(trace_product(estimate.matrix(), s.projector.matrix()) - s.value));
  }
  return {std::move(estimate), residual, samples.size(), projected};
}

std::vector<Context> intertwined_contexts(const Projector& p, std::size_t n, std::uint64_t seed) {
  const Eigen::Index dim = p.dim();
  const Eigen::Index free_dim = dim - p.rank();
  if (free_dim < 2) {
    throw DomainError("intertwined_contexts: complement of a rank-" + std::to_string(p.rank()) +
                      " projector in dim " + std::to_string(dim) + " has a unique completion");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(p.complement().matrix());
  // Eigenvalues ascend, so the complement's range is the last free_dim vectors.
  const Operator range = es.eigenvectors().rightCols(free_dim);
  std::vector<Context> contexts;
  contexts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Stream rng(derive_seed(seed, k));
    const Operator frame = range * haar_unitary(free_dim, rng);
    std::vector<Projector> ps{p};
    for (Eigen::Index j = 0; j < free_dim; ++j) ps.push_back(Projector::onto(frame.col(j)));
    contexts.push_back(Context::from_projectors(std::move(ps)));
  }
  return contexts;
}

nlohmann::json ExtravalenceResult::to_json() const {
  return {{"passed", passed}, {"spread", spread}, {"consistency", consistency}, {"n_contexts", n_contexts}};
}

ExtravalenceResult extravalence_check(const FrameFunction& m, const Projector& p,
                                      std::size_t n_contexts, std::uint64_t seed, double tol) {
  if (m.dim() < 3) throw DomainError("extravalence_check: requires dim >= 3");
  const auto contexts = intertwined_contexts(p, n_contexts, seed);
  const double direct = m(p);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  ExtravalenceResult result;
  for (const auto& c : contexts) {
    double rest = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) rest += m(c[i]);
    const double implied = 1.0 - rest;
    lo = std::min(lo, implied);
    hi = std::max(hi, implied);
    result.consistency = std::max(result.consistency, std::abs(implied - direct));
  }
  result.n_contexts = contexts.size();
  result.spread = contexts.empty() ? 0.0 : hi - lo;
  result.passed = result.spread <= tol && result.consistency <= tol;
  return result;
}

}  // namespace bellkc

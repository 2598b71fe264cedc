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

// Frame functions on the projection lattice: orthogonal additivity over
// random contexts, trace-form fitting, intertwined contexts and extravalence,
// and the two-dimensional counterexample to the trace form.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellkc/quantum.hpp"

namespace bellkc {

/// A map m from projectors of a fixed dimension to [0, 1] with m(0) = 0 and
/// m(I) = 1. Either the trace form of a stored state or an arbitrary rule.
class FrameFunction {
 public:
  using Rule = std::function<double(const Projector&)>;

  static FrameFunction trace_form(const DensityOperator& rho);
  /// Throws InvariantError if the rule violates m(0) = 0 or m(I) = 1.
  static FrameFunction from_rule(Eigen::Index dim, Rule rule, std::string name);

  double operator()(const Projector& p) const;
  Eigen::Index dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  /// The state when m is a trace form, otherwise empty.
  const std::optional<DensityOperator>& state() const noexcept { return state_; }

 private:
  FrameFunction(Eigen::Index dim, Rule rule, std::string name, std::optional<DensityOperator> state)
      : dim_(dim), rule_(std::move(rule)), name_(std::move(name)), state_(std::move(state)) {}
  Eigen::Index dim_;
  Rule rule_;
  std::string name_;
  std::optional<DensityOperator> state_;
};

/// m(P) = rank(P)/dim, the trace form of I/dim written as a rule.
FrameFunction rank_frame_function(Eigen::Index dim);
/// m(P) = Tr(ρP)², normalized but not additive.
FrameFunction squared_born_frame_function(const DensityOperator& rho);
/// Trace form of ρ plus ε·h(P) on proper projectors, h a hash of P's entries
/// in [−1, 1]. The value of a projector then depends on which decomposition
/// it came from; used as a negative control.
FrameFunction perturbed_frame_function(const DensityOperator& rho, double epsilon);

/// Qubit frame function m(P_n) = (1 + n_z³)/2 for the rank-1 projector with
/// Bloch vector n. m(P) + m(I − P) = 1 holds, yet m is not a trace form.
FrameFunction dim2_counterexample();

/// Haar-random orthonormal frame grouped into projectors with the given
/// ranks (which must sum to dim).
Context random_context(Eigen::Index dim, std::span<const int> rank_profile, std::uint64_t seed);

/// Generalized Gell-Mann matrices: dim² − 1 traceless Hermitian generators
/// with Tr(G_i G_j) = 2δ_ij.
std::vector<Operator> traceless_hermitian_basis(Eigen::Index dim);

struct AdditivityReport {
  Eigen::Index dim = 0;
  std::size_t n_contexts_tested = 0;
  std::uint64_t n_subset_checks = 0;
  double worst_violation = 0.0;
  bool passed = false;
  nlohmann::json to_json() const;
};

/// Over n_contexts random contexts with random rank profiles, checks
/// m(Σ_{i∈S} P_i) = Σ_{i∈S} m(P_i) for every nonempty subset S, and m(I) = 1.
AdditivityReport check_orthogonal_additivity(const FrameFunction& m, std::size_t n_contexts,
                                             Eigen::Index dim, std::uint64_t seed,
                                             double tol = kTolerance);

struct FrameSample {
  Projector projector;
  double value;
};

/// Values of m on n Haar-random rank-1 projectors.
std::vector<FrameSample> sample_frame_function(const FrameFunction& m, std::size_t n,
                                               std::uint64_t seed);

struct TraceFormFit {
  DensityOperator rho_estimate;
  double residual = 0.0;  // max |Tr(ρ̂P) − value| over the samples
  std::size_t n_samples = 0;
  bool psd_projected = false;
  nlohmann::json to_json() const;
};

/// Least-squares unit-trace Hermitian ρ with Tr(ρP) ≈ value. Throws
/// DomainError when the projectors do not span the Hermitian operators.
TraceFormFit fit_trace_form(std::span<const FrameSample> samples, Eigen::Index dim);

/// n contexts containing p, each completing p by a Haar-random orthonormal
/// basis of its complement. Requires dim − rank(p) ≥ 2.
std::vector<Context> intertwined_contexts(const Projector& p, std::size_t n, std::uint64_t seed);

struct ExtravalenceResult {
  bool passed = false;
  /// max − min over embeddings of 1 − Σ_{q≠p} m(q).
  double spread = 0.0;
  /// max over embeddings of |1 − Σ_{q≠p} m(q) − m(p)|.
  double consistency = 0.0;
  std::size_t n_contexts = 0;
  nlohmann::json to_json() const;
};

ExtravalenceResult extravalence_check(const FrameFunction& m, const Projector& p,
                                      std::size_t n_contexts, std::uint64_t seed,
                                      double tol = kTolerance);

}  // namespace bellkc

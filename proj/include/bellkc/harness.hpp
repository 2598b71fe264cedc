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

// Event-level simulation of a Bell test with random setting choices, plus the
// estimators computed from the resulting counts.
//
// Trials are grouped into chunks of `chunk_size`. Chunk k draws from the
// stream seeded with derive_seed(master_seed, k), so the output depends only
// on (model, settings, n_trials, master_seed, chunk_size) and never on how
// many workers ran the chunks.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellkc/chsh.hpp"
#include "bellkc/models.hpp"

namespace bellkc {

struct TrialRecord {
  std::uint64_t trial_id = 0;
  std::uint32_t x_index = 0;
  std::uint32_t y_index = 0;
  int a = 1;
  int b = 1;
  std::uint64_t chunk_id = 0;
  /// Seed of the chunk's stream.
  std::uint64_t rng_label = 0;
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Counts n(x, y, a, b). Merging is cellwise addition.
class CountsTable {
 public:
  explicit CountsTable(std::size_t n_alice = 2, std::size_t n_bob = 2);

  void add(std::size_t x, std::size_t y, int a, int b, std::uint64_t count = 1);
  std::uint64_t at(std::size_t x, std::size_t y, int a, int b) const;
  std::uint64_t context_total(std::size_t x, std::size_t y) const;
  std::uint64_t n_total() const noexcept { return n_total_; }
  std::size_t n_alice() const noexcept { return n_alice_; }
  std::size_t n_bob() const noexcept { return n_bob_; }

  CountsTable& operator+=(const CountsTable& other);
  friend bool operator==(const CountsTable&, const CountsTable&) = default;

  /// CSV with header "x_index,y_index,a,b,count", one row per cell.
  std::string to_csv() const;
  nlohmann::json to_json() const;

 private:
  std::size_t slot(std::size_t x, std::size_t y, int a, int b) const;
  std::size_t n_alice_;
  std::size_t n_bob_;
  std::vector<std::uint64_t> cells_;
  std::uint64_t n_total_ = 0;
};

CountsTable counts_from_records(std::span<const TrialRecord> records, std::size_t n_alice,
                                std::size_t n_bob);

struct RunSpec {
  std::vector<double> alice_probs{0.5, 0.5};
  std::vector<double> bob_probs{0.5, 0.5};
  std::uint64_t n_trials = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t chunk_size = 65536;
  unsigned workers = 1;
};

/// Receives the records of one chunk at a time, in chunk order.
using TrialSink = std::function<void(std::span<const TrialRecord>)>;

CountsTable run_experiment(const OutcomeModel& model, const RunSpec& spec, const TrialSink& sink = {});

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
};

/// E(x, y) per context; empty where the context has no counts.
using CorrelationTable = std::vector<std::vector<std::optional<Estimate>>>;

/// E = (n++ + n−− − n+− − n−+)/n_ctx with SE = sqrt((1 − E²)/n_ctx).
CorrelationTable estimate_correlations(const CountsTable& counts);

/// Signed sum of the four E; SE adds the context variances. Throws
/// DomainError if a context is missing.
Estimate chsh_estimate(const CorrelationTable& e,
                       const ChshCombination& combination = ChshCombination::standard());

/// Same signed sum with every E normalized by the total count instead of its
/// context count. SE = sqrt((1 − S²)/n_total).
Estimate global_normalized_chsh(const CountsTable& counts,
                                const ChshCombination& combination = ChshCombination::standard());

struct SignallingDelta {
  char side = 'A';  // 'A': Alice's marginal across Bob's settings; 'B' symmetric
  std::size_t local_setting = 0;
  std::size_t remote_first = 0;
  std::size_t remote_second = 1;
  double delta = 0.0;  // P̂(+|local, first) − P̂(+|local, second)
  double z = 0.0;      // pooled two-proportion z-score
  bool flagged = false;
};

std::vector<SignallingDelta> no_signalling_audit(const CountsTable& counts, double z_threshold);

struct EstimateReport {
  CorrelationTable correlations;
  ChshCombination combination;
  std::optional<Estimate> s;
  std::optional<Estimate> s_global;
  /// Largest S over the eight patterns, reported separately from the declared one.
  std::optional<std::pair<ChshCombination, Estimate>> s_max_over_patterns;
  std::vector<SignallingDelta> nosig;
  std::vector<std::string> notes;
  nlohmann::json to_json() const;
};

EstimateReport make_estimate_report(const CountsTable& counts,
                                    const ChshCombination& combination = ChshCombination::standard(),
                                    double z_threshold = 5.0);

/// Versioned header line of an event log.
nlohmann::json event_log_header(std::uint64_t master_seed, std::uint64_t chunk_size,
                                std::uint64_t model_hash);

/// Line-delimited JSON sink. Writes the header on construction.
class JsonlEventWriter {
 public:
  JsonlEventWriter(std::ostream& out, const nlohmann::json& header);
  void operator()(std::span<const TrialRecord> records);

 private:
  std::ostream* out_;
};

/// CSV sink with columns trial_id,x_index,y_index,a,b,chunk_id.
class CsvEventWriter {
 public:
  explicit CsvEventWriter(std::ostream& out);
  void operator()(std::span<const TrialRecord> records);

 private:
  std::ostream* out_;
};

}  // namespace bellkc

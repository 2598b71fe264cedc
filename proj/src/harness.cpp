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

#include "bellkc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "bellkc/rng.hpp"

namespace bellkc {

namespace {

void validate_probs(const std::vector<double>& probs, const char* side) {
  if (probs.empty()) throw InvariantError(std::string(side) + " setting distribution is empty");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvariantError(std::string(side) + " setting probability < 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kSpaceTol) {
    throw InvariantError(std::string(side) + " setting probabilities do not sum to 1");
  }
}

struct ChunkResult {
  CountsTable counts;
  std::vector<TrialRecord> records;
};

ChunkResult run_chunk(const OutcomeModel& model, const RunSpec& spec, std::uint64_t chunk,
                      bool keep_records) {
  ChunkResult out{CountsTable(model.n_alice(), model.n_bob()), {}};
  const std::uint64_t begin = chunk * spec.chunk_size;
  const std::uint64_t end = std::min(spec.n_trials, begin + spec.chunk_size);
  const std::uint64_t seed = derive_seed(spec.master_seed, chunk);
  Stream rng(seed);
  if (keep_records) out.records.reserve(end - begin);
  for (std::uint64_t t = begin; t < end; ++t) {
    const auto x = rng.categorical(spec.alice_probs);
    const auto y = rng.categorical(spec.bob_probs);
    const Outcome o = sample_trial(model, x, y, rng);
    out.counts.add(x, y, o.a, o.b);
    if (keep_records) {
      out.records.push_back({t, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), o.a,
                             o.b, chunk, seed});
    }
  }
  return out;
}

}  // namespace

CountsTable::CountsTable(std::size_t n_alice, std::size_t n_bob)
    : n_alice_(n_alice), n_bob_(n_bob), cells_(n_alice * n_bob * 4, 0) {
  if (n_alice == 0 || n_bob == 0) throw InvariantError("counts: setting counts must be positive");
}

std::size_t CountsTable::slot(std::size_t x, std::size_t y, int a, int b) const {
  if (x >= n_alice_ || y >= n_bob_) throw DomainError("counts: setting index out of range");
  if ((a != 1 && a != -1) || (b != 1 && b != -1)) throw InvariantError("counts: outcomes must be +1 or -1");
  return (x * n_bob_ + y) * 4 + outcome_index(a, b);
}

void CountsTable::add(std::size_t x, std::size_t y, int a, int b, std::uint64_t count) {
  cells_[slot(x, y, a, b)] += count;
  n_total_ += count;
}

std::uint64_t CountsTable::at(std::size_t x, std::size_t y, int a, int b) const {
  return cells_[slot(x, y, a, b)];
}

std::uint64_t CountsTable::context_total(std::size_t x, std::size_t y) const {
  const std::size_t base = slot(x, y, 1, 1);
  return cells_[base] + cells_[base + 1] + cells_[base + 2] + cells_[base + 3];
}

CountsTable& CountsTable::operator+=(const CountsTable& other) {
  if (other.n_alice_ != n_alice_ || other.n_bob_ != n_bob_) {
    throw DimensionError("counts: cannot merge tables of different shape");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  n_total_ += other.n_total_;
  return *this;
}

std::string CountsTable::to_csv() const {
  std::string out = "x_index,y_index,a,b,count\n";
  char line[96];
  for (std::size_t x = 0; x < n_alice_; ++x)
    for (std::size_t y = 0; y < n_bob_; ++y)
      for (std::size_t k = 0; k < 4; ++k) {
        std::snprintf(line, sizeof line, "%zu,%zu,%d,%d,%llu\n", x, y, outcome_a(k), outcome_b(k),
                      static_cast<unsigned long long>(cells_[(x * n_bob_ + y) * 4 + k]));
        out += line;
      }
  return out;
}

nlohmann::json CountsTable::to_json() const {
  nlohmann::json contexts = nlohmann::json::array();
  for (std::size_t x = 0; x < n_alice_; ++x)
    for (std::size_t y = 0; y < n_bob_; ++y) {
      contexts.push_back({{"x_index", x},
                          {"y_index", y},
                          {"n", context_total(x, y)},
                          {"n_pp", at(x, y, 1, 1)},
                          {"n_pm", at(x, y, 1, -1)},
                          {"n_mp", at(x, y, -1, 1)},
                          {"n_mm", at(x, y, -1, -1)}});
    }
  return {{"n_total", n_total_}, {"contexts", contexts}};
}

CountsTable counts_from_records(std::span<const TrialRecord> records, std::size_t n_alice,
                                std::size_t n_bob) {
  CountsTable counts(n_alice, n_bob);
  for (const auto& r : records) counts.add(r.x_index, r.y_index, r.a, r.b);
  return counts;
}

CountsTable run_experiment(const OutcomeModel& model, const RunSpec& spec, const TrialSink& sink) {
  if (spec.n_trials < 1) throw InvariantError("run_experiment: n_trials must be >= 1");
  if (spec.chunk_size < 1) throw InvariantError("run_experiment: chunk_size must be >= 1");
  validate_probs(spec.alice_probs, "alice");
  validate_probs(spec.bob_probs, "bob");
  if (spec.alice_probs.size() != model.n_alice() || spec.bob_probs.size() != model.n_bob()) {
    throw InvariantError("run_experiment: setting distributions do not match the model");
  }
  const std::uint64_t n_chunks = (spec.n_trials + spec.chunk_size - 1) / spec.chunk_size;
  const std::uint64_t workers = std::max(1u, spec.workers);
  const bool keep = static_cast<bool>(sink);

  CountsTable total(model.n_alice(), model.n_bob());
  std::vector<ChunkResult> wave;
  for (std::uint64_t first = 0; first < n_chunks; first += workers) {
    const std::uint64_t count = std::min(workers, n_chunks - first);
    wave.assign(count, ChunkResult{CountsTable(model.n_alice(), model.n_bob()), {}});
    if (count == 1) {
      wave[0] = run_chunk(model, spec, first, keep);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(count);
      for (std::uint64_t k = 0; k < count; ++k) {
        threads.emplace_back([&, k] { wave[k] = run_chunk(model, spec, first + k, keep); });
      }
    }
    for (auto& chunk : wave) {
      total += chunk.counts;
      if (keep) sink(chunk.records);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------

CorrelationTable estimate_correlations(const CountsTable& counts) {
  CorrelationTable e(counts.n_alice(), std::vector<std::optional<Estimate>>(counts.n_bob()));
  for (std::size_t x = 0; x < counts.n_alice(); ++x) {
    for (std::size_t y = 0; y < counts.n_bob(); ++y) {
      const auto n = counts.context_total(x, y);
      if (n == 0) continue;
      const double same = static_cast<double>(counts.at(x, y, 1, 1) + counts.at(x, y, -1, -1));
      const double diff = static_cast<double>(counts.at(x, y, 1, -1) + counts.at(x, y, -1, 1));
      const double value = (same - diff) / static_cast<double>(n);
      e[x][y] = Estimate{value, std::sqrt(std::max(0.0, 1.0 - value * value) / static_cast<double>(n)), n};
    }
  }
  return e;
}

Estimate chsh_estimate(const CorrelationTable& e, const ChshCombination& combination) {
  if (e.size() != 2 || e[0].size() != 2 || e[1].size() != 2) {
    throw DomainError("chsh_estimate: two settings per side required");
  }
  Estimate s;
  double variance = 0.0;
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      if (!e[x][y]) {
        throw DomainError("chsh_estimate: context (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") has no counts");
      }
      s.value += combination.sign[x][y] * e[x][y]->value;
      variance += e[x][y]->se * e[x][y]->se;
      s.n += e[x][y]->n;
    }
  }
  s.se = std::sqrt(variance);
  return s;
}

Estimate global_normalized_chsh(const CountsTable& counts, const ChshCombination& combination) {
  if (counts.n_alice() != 2 || counts.n_bob() != 2) {
    throw DomainError("global_normalized_chsh: two settings per side required");
  }
  if (counts.n_total() == 0) throw DomainError("global_normalized_chsh: no counts");
  const auto n = static_cast<double>(counts.n_total());
  double s = 0.0;
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      const double signed_sum = static_cast<double>(counts.at(x, y, 1, 1) + counts.at(x, y, -1, -1)) -
                                static_cast<double>(counts.at(x, y, 1, -1) + counts.at(x, y, -1, 1));
      s += combination.sign[x][y] * signed_sum / n;
    }
  }
  return {s, std::sqrt(std::max(0.0, 1.0 - s * s) / n), counts.n_total()};
}

std::vector<SignallingDelta> no_signalling_audit(const CountsTable& counts, double z_threshold) {
  std::vector<SignallingDelta> out;
  auto compare = [&](char side, std::size_t local, std::size_t r1, std::size_t r2, std::uint64_t k1,
                     std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
    if (n1 == 0 || n2 == 0) return;
    const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    const double delta = p1 - p2;
    double z = 0.0;
    if (se > 0.0) {
      z = delta / se;
    } else if (delta != 0.0) {
      z = std::copysign(std::numeric_limits<double>::infinity(), delta);
    }
    out.push_back({side, local, r1, r2, delta, z, std::abs(z) > z_threshold});
  };
  for (std::size_t x = 0; x < counts.n_alice(); ++x) {
    for (std::size_t y1 = 0; y1 < counts.n_bob(); ++y1) {
      for (std::size_t y2 = y1 + 1; y2 < counts.n_bob(); ++y2) {
        compare('A', x, y1, y2, counts.at(x, y1, 1, 1) + counts.at(x, y1, 1, -1), counts.context_total(x, y1),
                counts.at(x, y2, 1, 1) + counts.at(x, y2, 1, -1), counts.context_total(x, y2));
      }
    }
  }
  for (std::size_t y = 0; y < counts.n_bob(); ++y) {
    for (std::size_t x1 = 0; x1 < counts.n_alice(); ++x1) {
      for (std::size_t x2 = x1 + 1; x2 < counts.n_alice(); ++x2) {
        compare('B', y, x1, x2, counts.at(x1, y, 1, 1) + counts.at(x1, y, -1, 1), counts.context_total(x1, y),
                counts.at(x2, y, 1, 1) + counts.at(x2, y, -1, 1), counts.context_total(x2, y));
      }
    }
  }
  return out;
}

EstimateReport make_estimate_report(const CountsTable& counts, const ChshCombination& combination,
                                    double z_threshold) {
  EstimateReport r;
  r.combination = combination;
  r.correlations = estimate_correlations(counts);
  r.nosig = no_signalling_audit(counts, z_threshold);
  for (std::size_t x = 0; x < counts.n_alice(); ++x)
    for (std::size_t y = 0; y < counts.n_bob(); ++y)
      if (!r.correlations[x][y]) {
        r.notes.push_back("context (" + std::to_string(x) + ", " + std::to_string(y) + ") has no counts");
      }
  if (counts.n_alice() != 2 || counts.n_bob() != 2) {
    r.notes.push_back("CHSH needs two settings per side; S not computed");
    return r;
  }
  r.s_global = global_normalized_chsh(counts, combination);
  try {
    r.s = chsh_estimate(r.correlations, combination);
    for (const auto& c : ChshCombination::all()) {
      const auto s = chsh_estimate(r.correlations, c);
      if (!r.s_max_over_patterns || s.value > r.s_max_over_patterns->second.value) {
        r.s_max_over_patterns = std::make_pair(c, s);
      }
    }
  } catch (const DomainError& e) {
    r.notes.push_back(e.what());
  }
  return r;
}

nlohmann::json EstimateReport::to_json() const {
  auto estimate = [](const Estimate& e) { return nlohmann::json{{"value", e.value}, {"se", e.se}, {"n", e.n}}; };
  nlohmann::json corr = nlohmann::json::array();
  for (std::size_t x = 0; x < correlations.size(); ++x) {
    for (std::size_t y = 0; y < correlations[x].size(); ++y) {
      nlohmann::json c = {{"x_index", x}, {"y_index", y}};
      if (correlations[x][y]) {
        c["E"] = estimate(*correlations[x][y]);
      } else {
        c["E"] = nullptr;
        c["absent"] = true;
      }
      corr.push_back(std::move(c));
    }
  }
  nlohmann::json nos = nlohmann::json::array();
  for (const auto& d : nosig) {
    nos.push_back({{"side", std::string(1, d.side)},
                   {"local_setting", d.local_setting},
                   {"remote_settings", {d.remote_first, d.remote_second}},
                   {"delta", d.delta},
                   {"z", std::isfinite(d.z) ? nlohmann::json(d.z) : nlohmann::json(d.z > 0 ? "inf" : "-inf")},
                   {"flagged", d.flagged}});
  }
  nlohmann::json j = {{"combination", combination.label()}, {"correlations", corr}, {"no_signalling", nos}};
  j["S"] = s ? estimate(*s) : nlohmann::json(nullptr);
  j["S_global"] = s_global ? estimate(*s_global) : nlohmann::json(nullptr);
  if (s_global) j["S_global_times_4"] = 4.0 * s_global->value;
  if (s_max_over_patterns) {
    j["S_max_over_patterns"] = {{"combination", s_max_over_patterns->first.label()},
                                {"estimate", estimate(s_max_over_patterns->second)},
                                {"label", "maximum over all eight sign patterns"}};
  }
  j["notes"] = notes;
  return j;
}

}  // namespace bellkc

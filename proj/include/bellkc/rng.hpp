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

// Reproducible random streams.
//
// Seed derivation is counter based: the seed of stream k under master seed s
// is
//
//     derive_seed(s, k) = mix64(s ^ mix64(k + 0x9E3779B97F4A7C15))
//
// where mix64 is the SplitMix64 finalizer. Each derived seed drives an
// independent std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniform and normal variates are produced here rather than through
// <random> distributions, whose algorithms are implementation defined.

#include <cstdint>
#include <random>
#include <span>

namespace bellkc {

std::uint64_t mix64(std::uint64_t z) noexcept;
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (one variate per call).
  double normal();
  /// Index drawn from a finite distribution; zero-probability entries are
  /// never returned.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bellkc

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

#include <stdexcept>
#include <string>

namespace bellkc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on Hilbert spaces of different dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value failed the structural checks of its type (not Hermitian, not a
/// distribution, malformed atom structure, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A request is well-formed but cannot be satisfied (rank-deficient fit,
/// unique completion, missing context).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellkc

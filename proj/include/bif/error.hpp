// Copyright 2026 The bifscan Authors
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

namespace bif {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or tensor-factor dimensions do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Matrix that must be Hermitian is not (within tolerance).
class NotHermitianError : public Error {
 public:
  using Error::Error;
};

/// A state, measurement set, policy or model violates its invariants.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A measurement outcome with (numerically) zero probability was requested.
class ZeroProbabilityBranch : public Error {
 public:
  using Error::Error;
};

/// A propagated state left the set of density matrices beyond round-off.
class InvalidGeneratorError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bif

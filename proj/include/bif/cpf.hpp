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

// Generalized conditional past-future (CPF) correlation between the first
// and last outcomes, conditioned on the renewed intermediate state.

#pragma once

#include "bif/protocol.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace bif {

/// Slices with P(y~) at or below this carry no CPF value.
inline constexpr double kCpfConditioningProb = 1e-12;

struct CpfResult {
  std::map<std::size_t, double> value_per_y;  // keyed by y~ index
  UpdatePolicy::Kind scheme = UpdatePolicy::Kind::Deterministic;
  std::vector<std::size_t> undefined_y;
};

/// sum_{z,x} O_z O_x [P(z,x|y~) - P(z|y~) P(x|y~)] for every defined y~.
/// Throws InvalidArgumentError when the observable lists do not match the
/// table's z / x axes.
CpfResult cpf_correlation(const JointTable3& t3, const std::vector<double>& o_z,
                          const std::vector<double>& o_x);

}  // namespace bif

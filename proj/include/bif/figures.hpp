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

// Equal-interval (t = tau) CPF curves for the deterministic and random
// schemes.
//
//  a: eternal model, x - n - x, q = (1/2, 1/2, 0), theta = pi/2, rho0 = |+z>;
//     random scheme renews to |n+->, p(y~|x) = 1/2.
//  b: dissipative decay, zzz and xzx, gamma tau_c = 5, y~ = -1.
//  c: ohmic dephasing, n - y - x, lambda = 1, theta in {0, pi/4, pi/2}.

#pragma once

#include <cstddef>
#include <string>

namespace bif {

struct Fig1Options {
  std::size_t points = 200;
  double t_max = 5.0;  // in units of 1/gamma (a, b) or 1/omega_c (c)
};

/// CSV text with the scan columns. Throws InvalidArgumentError for an
/// unknown panel.
std::string fig1_csv(char panel, const Fig1Options& opt = {});

}  // namespace bif

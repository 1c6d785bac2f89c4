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

#include "bif/cpf.hpp"

#include "bif/error.hpp"

namespace bif {

CpfResult cpf_correlation(const JointTable3& t3, const std::vector<double>& o_z,
                          const std::vector<double>& o_x) {
  if (o_z.size() != t3.nz() || o_x.size() != t3.nx()) {
    throw InvalidArgumentError("cpf_correlation: observable values do not match the table axes");
  }
  const ConditionalSet c = conditionals(t3);
  CpfResult out;
  out.scheme = t3.policy;
  for (std::size_t yt = 0; yt < c.nyt; ++yt) {
    if (!(c.p_y[yt] > kCpfConditioningProb)) {
      out.undefined_y.push_back(yt);
      continue;
    }
    double value = 0.0;
    for (std::size_t z = 0; z < c.nz; ++z) {
      for (std::size_t x = 0; x < c.nx; ++x) {
        value += o_z[z] * o_x[x] * (c.zx(z, x, yt) - c.z_given(z, yt) * c.x_given(x, yt));
      }
    }
    out.value_per_y[yt] = value;
  }
  return out;
}

}  // namespace bif

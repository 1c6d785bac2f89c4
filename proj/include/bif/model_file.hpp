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

// Model files: one model declaration plus a scheme block and an optional
// Monte Carlo block, validated against a fixed schema (unknown keys are
// rejected). The schema is documented in README.md.

#pragma once

#include "bif/analytic.hpp"
#include "bif/channels.hpp"
#include "bif/measurements.hpp"
#include "bif/protocol.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bif {

/// A measurement direction as written in a model file.
struct DirectionSpec {
  enum class Kind { X, Y, Z, N, Explicit, Basis };
  Kind kind = Kind::Z;
  BlochDirection explicit_dir;  // Kind::Explicit

  /// "x", "y", "z", "n" (theta from the grid), "basis", or "t<theta>p<phi>".
  std::string label() const;
  /// Measurement for a system of dimension d; theta feeds Kind::N.
  MeasurementSet resolve(std::size_t d, double theta) const;
};

using DirectionTriple = std::array<DirectionSpec, 3>;  // x, y, z measurements

/// Renewed state for the random policy.
struct StateSpec {
  enum class Kind { Label, Matrix };
  Kind kind = Kind::Label;
  std::string label;  // "+x", "-n", ...
  CMatrix matrix;

  CMatrix resolve(std::size_t d, double theta) const;
};

struct SchemeSpec {
  std::vector<double> t;
  std::vector<double> tau;
  bool equal_times = false;
  std::vector<double> theta{1.5707963267948966};
  std::optional<StateSpec> rho0;
  bool default_sweep = true;
  std::vector<DirectionTriple> directions;
  std::vector<StateSpec> renewed_states;         // empty: eigenstates of the y measurement
  std::vector<std::vector<double>> update_prob;  // [y~][x]; empty: uniform

  /// (t, tau) grid in row-major order (t outer).
  std::vector<std::pair<double, double>> time_points() const;
  /// Explicit directions, or the default sweep for system dimension d.
  std::vector<DirectionTriple> direction_list(std::size_t d) const;
  /// Scheme for one grid point and policy; throws on invalid combinations.
  SchemeConfig make(std::size_t d, const DirectionTriple& dirs, double t, double tau, double theta,
                    UpdatePolicy::Kind kind) const;
};

struct McSpec {
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t replicas = 20;
};

struct ModelFile {
  enum class Kind { NoiseEnsemble, Bipartite, Eternal, Dissipative, Dephasing };
  Kind kind = Kind::NoiseEnsemble;

  std::optional<NoiseEnsemble> ensemble;
  std::optional<BipartiteModel> bipartite;
  EternalParams eternal;
  double eternal_mean_x = 0.0;
  DissipativeParams dissipative;
  std::vector<DissipativeDirections> dissipative_dirs;
  DephasingParams dephasing;

  SchemeSpec scheme;
  std::optional<McSpec> mc;

  bool has_exact_engine() const { return kind == Kind::NoiseEnsemble || kind == Kind::Bipartite; }
  std::size_t system_dim() const;
};

/// Throws Error with a diagnostic naming the offending key.
ModelFile load_model(const nlohmann::json& doc);
ModelFile load_model_file(const std::string& path);

/// Matrix notation: a name ("i", "x", "y", "z", "raising", "lowering") or an
/// array of rows whose entries are numbers or [re, im] pairs.
CMatrix parse_matrix(const nlohmann::json& v, const std::string& where);

}  // namespace bif

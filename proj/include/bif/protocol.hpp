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

// The three-measurement scheme x -> (y -> y~) -> z at times 0 -> t -> t+tau:
// exact joint outcome tables for noise ensembles and bipartite models,
// conditionals, and the Markov-factorization residual.

#pragma once

#include "bif/channels.hpp"
#include "bif/linalg.hpp"
#include "bif/measurements.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace bif {

inline constexpr double kTableSumTol = 1e-10;
/// Conditioning on y~ with P(y~) at or below this is undefined.
inline constexpr double kConditioningProb = 1e-14;

struct SchemeConfig {
  DensityMatrix rho0;
  double t = 0.0;
  double tau = 0.0;
  MeasurementSet mx;
  MeasurementSet my;  // rank-1 projective
  MeasurementSet mz;
  UpdatePolicy policy;

  /// Throws InvalidArgumentError / DimensionError on violated invariants.
  void validate() const;
};

/// Outcome labels per axis; y~ labels equal the y labels under the
/// deterministic policy and are the renewed-state indices otherwise.
struct AxisLabels {
  std::vector<std::string> z, ytilde, y, x;
};

/// P(z, y~, y, x), row-major in that index order.
class JointTable4 {
 public:
  JointTable4(std::size_t nz, std::size_t nyt, std::size_t ny, std::size_t nx);

  std::size_t nz() const { return nz_; }
  std::size_t nyt() const { return nyt_; }
  std::size_t ny() const { return ny_; }
  std::size_t nx() const { return nx_; }

  double& at(std::size_t z, std::size_t yt, std::size_t y, std::size_t x) {
    return p_[((z * nyt_ + yt) * ny_ + y) * nx_ + x];
  }
  double at(std::size_t z, std::size_t yt, std::size_t y, std::size_t x) const {
    return p_[((z * nyt_ + yt) * ny_ + y) * nx_ + x];
  }
  const std::vector<double>& data() const { return p_; }
  double sum() const;

  UpdatePolicy::Kind policy = UpdatePolicy::Kind::Deterministic;
  AxisLabels labels;
  /// Largest magnitude of a negative round-off entry that was set to 0.
  double max_clamp = 0.0;

  /// Sets entries in [-1e-14, 0) to 0 (recording the magnitude) and checks
  /// nonnegativity and normalization. Throws Error on violation.
  void finalize();

 private:
  std::size_t nz_, nyt_, ny_, nx_;
  std::vector<double> p_;
};

/// P(z, y~, x).
class JointTable3 {
 public:
  JointTable3(std::size_t nz, std::size_t nyt, std::size_t nx);

  std::size_t nz() const { return nz_; }
  std::size_t nyt() const { return nyt_; }
  std::size_t nx() const { return nx_; }

  double& at(std::size_t z, std::size_t yt, std::size_t x) { return p_[(z * nyt_ + yt) * nx_ + x]; }
  double at(std::size_t z, std::size_t yt, std::size_t x) const {
    return p_[(z * nyt_ + yt) * nx_ + x];
  }
  const std::vector<double>& data() const { return p_; }
  double sum() const;

  UpdatePolicy::Kind policy = UpdatePolicy::Kind::Deterministic;
  std::vector<std::string> z_labels, ytilde_labels, x_labels;

 private:
  std::size_t nz_, nyt_, nx_;
  std::vector<double> p_;
};

struct ConditionalSet {
  std::size_t nz = 0, nyt = 0, nx = 0;
  std::vector<double> p_y;            // P(y~)
  std::vector<bool> defined;          // P(y~) > kConditioningProb
  std::vector<double> p_zx_given_y;   // [(yt * nz + z) * nx + x]
  std::vector<double> p_z_given_y;    // [yt * nz + z]
  std::vector<double> p_x_given_y;    // [yt * nx + x]

  double zx(std::size_t z, std::size_t x, std::size_t yt) const {
    return p_zx_given_y[(yt * nz + z) * nx + x];
  }
  double z_given(std::size_t z, std::size_t yt) const { return p_z_given_y[yt * nz + z]; }
  double x_given(std::size_t x, std::size_t yt) const { return p_x_given_y[yt * nx + x]; }
};

/// P(z,y~,y,x) = p(y~|y,x) sum_a q_a Tr(E_z E^a_{t+tau,t}[rho_y~]) Tr(E_y E^a_{t,0}[Omega_x rho0 Omega_x^dag]).
JointTable4 joint_noise(const NoiseEnsemble& ensemble, const SchemeConfig& cfg);

/// P(z,y~,y,x) = p(y~|y,x) Tr_se(E_z E_tau[rho_y~ (x) Tr_s(E_y E_t[rho~_x (x) sigma0])]).
/// Branches with P(y,x) < 1e-14 contribute exact zeros.
JointTable4 joint_bipartite(const BipartiteModel& model, const SchemeConfig& cfg);

JointTable3 marginalize_y(const JointTable4& t4);

ConditionalSet conditionals(const JointTable3& t3);

/// max over defined y~ and all (z, x) of |P(z,x|y~) - P(z|y~) P(x|y~)|.
double markov_residual(const JointTable3& t3);

}  // namespace bif

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

// Measurement operator sets, Bloch-direction projectors and the
// intermediate state-update policies of the three-measurement scheme.

#pragma once

#include "bif/linalg.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace bif {

inline constexpr double kCompletenessTol = 1e-10;
/// Outcomes less likely than this have no post-measurement state.
inline constexpr double kZeroBranchProb = 1e-14;

/// Direction on the Bloch sphere, polar angle theta in [0, pi].
struct BlochDirection {
  double theta = 0.0;
  double phi = 0.0;

  static BlochDirection x() { return {1.5707963267948966, 0.0}; }
  static BlochDirection y() { return {1.5707963267948966, 1.5707963267948966}; }
  static BlochDirection z() { return {0.0, 0.0}; }

  std::array<double, 3> unit_vector() const;
  /// Throws InvalidArgumentError when theta is outside [0, pi] or not finite.
  void validate() const;
};

/// Family of measurement operators Omega_i with sum_i Omega_i^dag Omega_i = I
/// and one real outcome value per operator.
class MeasurementSet {
 public:
  /// Validates completeness and finiteness; throws InvalidArgumentError.
  MeasurementSet(std::vector<CMatrix> operators, std::vector<double> outcome_values);

  std::size_t size() const { return operators_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(operators_.front().rows()); }

  const std::vector<CMatrix>& operators() const { return operators_; }
  const CMatrix& op(std::size_t i) const { return operators_.at(i); }
  /// E_i = Omega_i^dag Omega_i.
  const CMatrix& effect(std::size_t i) const { return effects_.at(i); }
  const std::vector<double>& outcome_values() const { return values_; }

  /// True when every operator is a rank-1 orthogonal projector.
  bool is_projective_rank1(double tol = 1e-10) const;

 private:
  std::vector<CMatrix> operators_;
  std::vector<CMatrix> effects_;
  std::vector<double> values_;
};

/// Projectors |n+><n+|, |n-><n-| with outcome values +1, -1 where
/// |n+> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> and
/// |n-> = sin(theta/2)|0> - e^{i phi} cos(theta/2)|1>.
MeasurementSet bloch_projectors(const BlochDirection& n);

/// Rank-1 projectors onto the computational basis of C^dim, values 0..dim-1.
MeasurementSet basis_projectors(std::size_t dim);

struct MeasurementOutcome {
  double prob;
  DensityMatrix post_state;
};

/// Born rule and state update for one outcome. Throws ZeroProbabilityBranch
/// when prob < kZeroBranchProb and DimensionError on mismatched dimensions.
MeasurementOutcome apply_measurement(const DensityMatrix& rho, const MeasurementSet& mset,
                                     std::size_t outcome);

/// True iff ||sum_i Omega_i sigma Omega_i^dag - sigma||_max <= tol, i.e. the
/// non-selective measurement leaves sigma untouched.
bool check_env_measurement_invariance(const DensityMatrix& sigma, const MeasurementSet& mset,
                                      double tol);

/// Intermediate update rule p(y~ | y, x) together with the renewed states.
///
/// Deterministic: y~ = y and the renewed state is the projector |y><y| of the
/// intermediate measurement. Random: y~ is drawn from p(y~ | x) independently
/// of y. Conditional: the general p(y~ | y, x).
class UpdatePolicy {
 public:
  enum class Kind { Deterministic, Random, Conditional };

  static UpdatePolicy deterministic();
  /// prob_given_x[ytilde][x]; each column over ytilde must sum to 1.
  static UpdatePolicy random(std::vector<DensityMatrix> renewed_states,
                             std::vector<std::vector<double>> prob_given_x);
  /// Random policy with p(y~ | x) = 1 / (number of renewed states).
  static UpdatePolicy random_uniform(std::vector<DensityMatrix> renewed_states,
                                     std::size_t num_x);
  /// prob[ytilde][y][x]; each (y, x) column over ytilde must sum to 1.
  static UpdatePolicy conditional(std::vector<DensityMatrix> renewed_states,
                                  std::vector<std::vector<std::vector<double>>> prob);

  Kind kind() const { return kind_; }
  const std::vector<DensityMatrix>& renewed_states() const { return states_; }

  /// Fully resolved update table for a given intermediate measurement.
  struct Table {
    std::vector<CMatrix> states;  // rho_{y~}
    std::size_t num_ytilde = 0;
    std::size_t num_y = 0;
    std::size_t num_x = 0;
    std::vector<double> prob;     // [(yt * num_y + y) * num_x + x]

    double operator()(std::size_t yt, std::size_t y, std::size_t x) const {
      return prob[(yt * num_y + y) * num_x + x];
    }
  };

  /// Throws InvalidArgumentError when the policy does not fit the given
  /// measurement dimensions.
  Table resolve(const MeasurementSet& my, std::size_t num_x) const;

 private:
  Kind kind_ = Kind::Deterministic;
  std::vector<DensityMatrix> states_;
  std::vector<std::vector<std::vector<double>>> prob_;  // [yt][y][x]; Random uses y = 0 only
};

}  // namespace bif

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

#include "bif/measurements.hpp"

#include "bif/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bif {

namespace {

constexpr double kPolicyTol = 1e-12;

void check_column_sums(const std::vector<std::vector<std::vector<double>>>& prob) {
  if (prob.empty()) throw InvalidArgumentError("UpdatePolicy: empty probability table");
  const std::size_t ny = prob.front().size();
  const std::size_t nx = ny == 0 ? 0 : prob.front().front().size();
  if (ny == 0 || nx == 0) throw InvalidArgumentError("UpdatePolicy: empty probability table");
  for (const auto& slab : prob) {
    if (slab.size() != ny) throw InvalidArgumentError("UpdatePolicy: ragged probability table");
    for (const auto& row : slab) {
      if (row.size() != nx) throw InvalidArgumentError("UpdatePolicy: ragged probability table");
      for (double p : row) {
        if (!std::isfinite(p) || p < 0.0) {
          throw InvalidArgumentError("UpdatePolicy: probabilities must be finite and >= 0");
        }
      }
    }
  }
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      double s = 0.0;
      for (const auto& slab : prob) s += slab[y][x];
      if (std::abs(s - 1.0) > kPolicyTol) {
        std::ostringstream os;
        os << "UpdatePolicy: column (y=" << y << ", x=" << x << ") sums to " << s;
        throw InvalidArgumentError(os.str());
      }
    }
  }
}

}  // namespace

std::array<double, 3> BlochDirection::unit_vector() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

void BlochDirection::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(phi) || theta < 0.0 ||
      theta > std::numbers::pi + 1e-12) {
    throw InvalidArgumentError("BlochDirection: theta must lie in [0, pi]");
  }
}

MeasurementSet::MeasurementSet(std::vector<CMatrix> operators, std::vector<double> outcome_values)
    : operators_(std::move(operators)), values_(std::move(outcome_values)) {
  if (operators_.empty()) throw InvalidArgumentError("MeasurementSet: no operators");
  if (values_.size() != operators_.size()) {
    throw InvalidArgumentError("MeasurementSet: one outcome value per operator required");
  }
  const auto d = operators_.front().rows();
  CMatrix completeness = CMatrix::Zero(d, d);
  effects_.reserve(operators_.size());
  for (const CMatrix& op : operators_) {
    if (op.rows() != d || op.cols() != d) {
      throw DimensionError("MeasurementSet: operators must share one square shape");
    }
    if (!all_finite(op)) throw InvalidArgumentError("MeasurementSet: non-finite operator");
    effects_.push_back(op.adjoint() * op);
    completeness += effects_.back();
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgumentError("MeasurementSet: non-finite outcome value");
  }
  if (max_abs(completeness - CMatrix::Identity(d, d)) > kCompletenessTol) {
    throw InvalidArgumentError("MeasurementSet: sum of Omega^dag Omega differs from identity");
  }
}

bool MeasurementSet::is_projective_rank1(double tol) const {
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const CMatrix& p = operators_[i];
    if (max_abs(p - p.adjoint()) > tol) return false;
    if (max_abs(p * p - p) > tol) return false;
    if (std::abs(p.trace() - Complex(1.0, 0.0)) > tol) return false;
  }
  return true;
}

MeasurementSet bloch_projectors(const BlochDirection& n) {
  n.validate();
  const double c = std::cos(n.theta / 2.0);
  const double s = std::sin(n.theta / 2.0);
  const Complex phase = std::exp(Complex(0.0, n.phi));
  CVector plus(2), minus(2);
  plus << c, phase * s;
  minus << s, -phase * c;
  std::vector<CMatrix> ops{plus * plus.adjoint(), minus * minus.adjoint()};
  return MeasurementSet(std::move(ops), {1.0, -1.0});
}

MeasurementSet basis_projectors(std::size_t dim) {
  std::vector<CMatrix> ops;
  std::vector<double> values;
  const auto d = static_cast<Eigen::Index>(dim);
  for (Eigen::Index k = 0; k < d; ++k) {
    CMatrix p = CMatrix::Zero(d, d);
    p(k, k) = 1.0;
    ops.push_back(std::move(p));
    values.push_back(static_cast<double>(k));
  }
  return MeasurementSet(std::move(ops), std::move(values));
}

MeasurementOutcome apply_measurement(const DensityMatrix& rho, const MeasurementSet& mset,
                                     std::size_t outcome) {
  if (rho.dim() != mset.dim()) {
    throw DimensionError("apply_measurement: state and measurement dimensions differ");
  }
  if (outcome >= mset.size()) throw InvalidArgumentError("apply_measurement: no such outcome");
  const double prob = (mset.effect(outcome) * rho.matrix()).trace().real();
  if (prob < kZeroBranchProb) {
    throw ZeroProbabilityBranch("apply_measurement: outcome has zero probability");
  }
  const CMatrix& op = mset.op(outcome);
  CMatrix post = op * rho.matrix() * op.adjoint() / prob;
  post = 0.5 * (post + post.adjoint());
  return {prob, DensityMatrix(std::move(post), rho.dims())};
}

bool check_env_measurement_invariance(const DensityMatrix& sigma, const MeasurementSet& mset,
                                      double tol) {
  if (sigma.dim() != mset.dim()) {
    throw DimensionError("check_env_measurement_invariance: dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(sigma.matrix().rows(), sigma.matrix().cols());
  for (const CMatrix& op : mset.operators()) out += op * sigma.matrix() * op.adjoint();
  return max_abs(out - sigma.matrix()) <= tol;
}

UpdatePolicy UpdatePolicy::deterministic() { return UpdatePolicy{}; }

UpdatePolicy UpdatePolicy::random(std::vector<DensityMatrix> renewed_states,
                                  std::vector<std::vector<double>> prob_given_x) {
  if (renewed_states.size() != prob_given_x.size()) {
    throw InvalidArgumentError("UpdatePolicy::random: one probability row per renewed state");
  }
  UpdatePolicy p;
  p.kind_ = Kind::Random;
  for (auto& row : prob_given_x) p.prob_.push_back({std::move(row)});
  check_column_sums(p.prob_);
  p.states_ = std::move(renewed_states);
  return p;
}

UpdatePolicy UpdatePolicy::random_uniform(std::vector<DensityMatrix> renewed_states,
                                          std::size_t num_x) {
  const std::size_t n = renewed_states.size();
  if (n == 0) throw InvalidArgumentError("UpdatePolicy::random_uniform: no renewed states");
  std::vector<std::vector<double>> prob(n, std::vector<double>(num_x, 1.0 / static_cast<double>(n)));
  return random(std::move(renewed_states), std::move(prob));
}

UpdatePolicy UpdatePolicy::conditional(std::vector<DensityMatrix> renewed_states,
                                       std::vector<std::vector<std::vector<double>>> prob) {
  if (renewed_states.size() != prob.size()) {
    throw InvalidArgumentError("UpdatePolicy::conditional: one probability slab per renewed state");
  }
  UpdatePolicy p;
  p.kind_ = Kind::Conditional;
  p.prob_ = std::move(prob);
  check_column_sums(p.prob_);
  p.states_ = std::move(renewed_states);
  return p;
}

UpdatePolicy::Table UpdatePolicy::resolve(const MeasurementSet& my, std::size_t num_x) const {
  Table t;
  t.num_y = my.size();
  t.num_x = num_x;
  if (kind_ == Kind::Deterministic) {
    t.num_ytilde = my.size();
    for (std::size_t y = 0; y < my.size(); ++y) t.states.push_back(my.op(y));
    t.prob.assign(t.num_ytilde * t.num_y * t.num_x, 0.0);
    for (std::size_t y = 0; y < t.num_y; ++y) {
      for (std::size_t x = 0; x < num_x; ++x) t.prob[(y * t.num_y + y) * num_x + x] = 1.0;
    }
    return t;
  }
  t.num_ytilde = states_.size();
  for (const DensityMatrix& s : states_) {
    if (s.dim() != my.dim()) {
      throw DimensionError("UpdatePolicy: renewed state dimension differs from the system");
    }
    t.states.push_back(s.matrix());
  }
  const std::size_t table_y = prob_.front().size();
  const std::size_t table_x = prob_.front().front().size();
  if (table_x != num_x) {
    throw InvalidArgumentError("UpdatePolicy: probability table has the wrong number of x outcomes");
  }
  if (kind_ == Kind::Conditional && table_y != t.num_y) {
    throw InvalidArgumentError("UpdatePolicy: probability table has the wrong number of y outcomes");
  }
  t.prob.assign(t.num_ytilde * t.num_y * t.num_x, 0.0);
  for (std::size_t yt = 0; yt < t.num_ytilde; ++yt) {
    for (std::size_t y = 0; y < t.num_y; ++y) {
      const std::size_t src_y = kind_ == Kind::Random ? 0 : y;
      for (std::size_t x = 0; x < num_x; ++x) {
        t.prob[(yt * t.num_y + y) * num_x + x] = prob_[yt][src_y][x];
      }
    }
  }
  return t;
}

}  // namespace bif

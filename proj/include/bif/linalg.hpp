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

// Dense complex linear algebra for small Hilbert spaces.
//
// Bipartite operators always place the system factor first: an operator on
// system (dimension ds) times environment (dimension de) is the Kronecker
// product A_s (x) B_e with row index i_s * de + i_e.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bif {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;
/// Tolerance used when an input operator is required to be Hermitian.
inline constexpr double kHermitianInputTol = 1e-10;

namespace pauli {
CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();
/// |0><1| in the {|+z>, |-z>} basis; raises the sigma_z eigenvalue.
CMatrix raising();
/// |1><0|.
CMatrix lowering();
}  // namespace pauli

/// Largest entry modulus.
double max_abs(const CMatrix& m);

bool all_finite(const CMatrix& m);

/// ||m - m^dagger||_max <= tol.
bool is_hermitian(const CMatrix& m, double tol = kHermitianInputTol);

/// Kronecker product a (x) b.
CMatrix tensor(const CMatrix& a, const CMatrix& b);

/// Reduced operator on factor `keep` of a square operator over
/// prod(dims). Throws DimensionError when the shapes disagree.
CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> dims,
                      std::size_t keep);

/// Convenience form for two factors: keep = 0 traces out the environment,
/// keep = 1 traces out the system.
CMatrix partial_trace(const CMatrix& m, std::size_t ds, std::size_t de,
                      std::size_t keep);

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns are orthonormal eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws NotHermitianError.
HermitianEigen herm_eig(const CMatrix& h);

/// exp(-i t h) for Hermitian h, via the eigendecomposition.
CMatrix unitary_evolution(const CMatrix& h, double t);

/// exp(m) for a general square matrix (scaling and squaring, Pade).
CMatrix matrix_exp(const CMatrix& m);

/// Column-stacking vectorization: vec(A X B) = (B^T (x) A) vec(X).
CVector vectorize(const CMatrix& m);
CMatrix unvectorize(const CVector& v, std::size_t dim);

/// Positive, unit-trace Hermitian matrix over an ordered list of tensor
/// factors. Construction validates every invariant.
class DensityMatrix {
 public:
  /// Throws InvalidArgumentError (or DimensionError) on violated invariants.
  DensityMatrix(CMatrix mat, std::vector<std::size_t> dims);
  /// Single-factor state.
  explicit DensityMatrix(CMatrix mat);

  /// |psi><psi| / <psi|psi>.
  static DensityMatrix pure(const CVector& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  /// Product state rho (x) sigma with the factor lists concatenated.
  static DensityMatrix product(const DensityMatrix& rho, const DensityMatrix& sigma);

  const CMatrix& matrix() const { return mat_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }

  /// Reduced state on one factor.
  DensityMatrix reduce(std::size_t keep) const;

  /// Smallest eigenvalue of the state.
  double min_eigenvalue() const;

 private:
  CMatrix mat_;
  std::vector<std::size_t> dims_;
};

/// Checks the density-matrix invariants without constructing one. Returns an
/// empty string when valid, otherwise a description of the first violation.
std::string density_matrix_violation(const CMatrix& m,
                                     double herm_tol = kHermitianTol,
                                     double trace_tol = kTraceTol,
                                     double pos_tol = kPositivityTol);

}  // namespace bif

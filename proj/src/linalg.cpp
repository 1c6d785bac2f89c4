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

#include "bif/linalg.hpp"

#include "bif/error.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace bif {

namespace pauli {

CMatrix identity() { return CMatrix::Identity(2, 2); }

CMatrix x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMatrix raising() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

CMatrix lowering() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

}  // namespace pauli

double max_abs(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) { return m.allFinite(); }

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> dims,
                      std::size_t keep) {
  if (keep >= dims.size()) {
    throw DimensionError("partial_trace: factor index out of range");
  }
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
    std::ostringstream os;
    os << "partial_trace: operator is " << m.rows() << "x" << m.cols()
       << " but factor dimensions multiply to " << total;
    throw DimensionError(os.str());
  }
  // Row index = outer * (dk * inner) + ik * inner + rest_inner.
  std::size_t inner = 1;
  for (std::size_t f = keep + 1; f < dims.size(); ++f) inner *= dims[f];
  const std::size_t dk = dims[keep];
  const std::size_t outer = total / (dk * inner);

  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i) {
    for (std::size_t j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t r = 0; r < inner; ++r) {
          const auto row = static_cast<Eigen::Index>(o * dk * inner + i * inner + r);
          const auto col = static_cast<Eigen::Index>(o * dk * inner + j * inner + r);
          acc += m(row, col);
        }
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& m, std::size_t ds, std::size_t de,
                      std::size_t keep) {
  const std::size_t dims[2] = {ds, de};
  return partial_trace(m, std::span<const std::size_t>(dims, 2), keep);
}

HermitianEigen herm_eig(const CMatrix& h) {
  if (!is_hermitian(h, kHermitianInputTol)) {
    throw NotHermitianError("herm_eig: input is not Hermitian");
  }
  // Symmetrize so round-off asymmetry does not leak into the solver.
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("herm_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix unitary_evolution(const CMatrix& h, double t) {
  const HermitianEigen eig = herm_eig(h);
  CVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -t * eig.values(k)));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

CMatrix matrix_exp(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix_exp: matrix is not square");
  return m.exp();
}

CVector vectorize(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvectorize(const CVector& v, std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != dim * dim) {
    throw DimensionError("unvectorize: vector length is not dim^2");
  }
  return Eigen::Map<const CMatrix>(v.data(), static_cast<Eigen::Index>(dim),
                                   static_cast<Eigen::Index>(dim));
}

std::string density_matrix_violation(const CMatrix& m, double herm_tol,
                                     double trace_tol, double pos_tol) {
  if (m.rows() == 0 || m.rows() != m.cols()) return "matrix is not square";
  if (!all_finite(m)) return "matrix has non-finite entries";
  if (max_abs(m - m.adjoint()) > herm_tol) return "matrix is not Hermitian";
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > trace_tol) {
    std::ostringstream os;
    os << "trace is " << tr.real() << " (expected 1)";
    return os.str();
  }
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -pos_tol) {
    std::ostringstream os;
    os << "negative eigenvalue " << solver.eigenvalues().minCoeff();
    return os.str();
  }
  return {};
}

DensityMatrix::DensityMatrix(CMatrix mat, std::vector<std::size_t> dims)
    : mat_(std::move(mat)), dims_(std::move(dims)) {
  const std::size_t total =
      std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  if (dims_.empty() || static_cast<std::size_t>(mat_.rows()) != total) {
    throw DimensionError("DensityMatrix: factor dimensions do not match the matrix");
  }
  if (const std::string why = density_matrix_violation(mat_); !why.empty()) {
    throw InvalidArgumentError("DensityMatrix: " + why);
  }
}

DensityMatrix::DensityMatrix(CMatrix mat)
    : DensityMatrix(mat, {static_cast<std::size_t>(mat.rows())}) {}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) throw InvalidArgumentError("DensityMatrix::pure: zero vector");
  CMatrix m = psi * psi.adjoint() / norm2;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::product(const DensityMatrix& rho, const DensityMatrix& sigma) {
  std::vector<std::size_t> dims = rho.dims();
  dims.insert(dims.end(), sigma.dims().begin(), sigma.dims().end());
  return DensityMatrix(tensor(rho.matrix(), sigma.matrix()), std::move(dims));
}

DensityMatrix DensityMatrix::reduce(std::size_t keep) const {
  return DensityMatrix(partial_trace(mat_, dims_, keep), {dims_.at(keep)});
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(mat_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace bif

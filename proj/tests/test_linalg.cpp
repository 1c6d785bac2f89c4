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

#include "bif/error.hpp"
#include "bif/linalg.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <array>
#include <numbers>

using namespace bif;
using bif::testing::random_hermitian;
using bif::testing::random_state;

TEST(Tensor, IdentityTimesIdentity) {
  EXPECT_EQ(tensor(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)), CMatrix::Identity(4, 4));
}

TEST(Tensor, SigmaXActsOnFirstFactor) {
  CVector zero_zero = CVector::Zero(4);
  zero_zero(0) = 1.0;
  const CVector out = tensor(pauli::x(), CMatrix::Identity(2, 2)) * zero_zero;
  CVector one_zero = CVector::Zero(4);
  one_zero(2) = 1.0;  // |1>|0>
  EXPECT_EQ(out, one_zero);
}

TEST(Tensor, DiagonalProduct) {
  const double p = 0.3;
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  CMatrix b = CMatrix::Zero(2, 2);
  b(0, 0) = p;
  b(1, 1) = 1.0 - p;
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = p;
  expected(1, 1) = 1.0 - p;
  EXPECT_EQ(tensor(a, b), expected);
}

TEST(Tensor, Associative) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const CMatrix a = random_hermitian(rng, 2), b = random_hermitian(rng, 3), c = random_hermitian(rng, 2);
    const CMatrix left = tensor(tensor(a, b), c), right = tensor(a, tensor(b, c));
    EXPECT_LE(max_abs(left - right), 1e-15);
  }
}

TEST(PartialTrace, ProductStateKeepsFactor) {
  std::mt19937_64 rng(1);
  const CMatrix rho = random_state(rng, 2), sigma = random_state(rng, 3);
  EXPECT_LE(max_abs(partial_trace(tensor(rho, sigma), 2, 3, 0) - rho), 1e-14);
  EXPECT_LE(max_abs(partial_trace(tensor(rho, sigma), 2, 3, 1) - sigma), 1e-14);
}

TEST(PartialTrace, BellStateIsMaximallyMixed) {
  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const CMatrix m = bell * bell.adjoint();
  for (std::size_t keep : {0u, 1u}) {
    EXPECT_LE(max_abs(partial_trace(m, 2, 2, keep) - CMatrix::Identity(2, 2) / 2.0), 1e-15);
  }
}

TEST(PartialTrace, PreservesTrace) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const CMatrix m = random_hermitian(rng, 12);
    const std::array<std::size_t, 3> dims{2, 3, 2};
    for (std::size_t keep = 0; keep < 3; ++keep) {
      EXPECT_NEAR(std::abs(partial_trace(m, dims, keep).trace() - m.trace()), 0.0, 1e-12);
    }
  }
}

TEST(PartialTrace, TensorOfArbitraryMatrices) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const CMatrix a = bif::testing::random_complex(rng, 3), b = bif::testing::random_complex(rng, 2);
    EXPECT_LE(max_abs(partial_trace(tensor(a, b), 3, 2, 0) - a * b.trace()), 1e-12);
  }
}

TEST(PartialTrace, RejectsBadShape) {
  EXPECT_THROW(partial_trace(CMatrix::Identity(5, 5), 2, 2, 0), DimensionError);
}

TEST(HermEig, PauliZ) {
  const HermitianEigen e = herm_eig(pauli::z());
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
}

TEST(HermEig, PauliXEigenvectors) {
  const HermitianEigen e = herm_eig(pauli::x());
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
  // Up to phase: |<v|(|0> - |1>)/sqrt2>| = 1 for the -1 eigenvector.
  const Complex overlap = (e.vectors(0, 0) - e.vectors(1, 0)) / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(overlap), 1.0, 1e-14);
}

TEST(HermEig, ReconstructsRandomMatrix) {
  std::mt19937_64 rng(4);
  const CMatrix h = random_hermitian(rng, 8);
  const HermitianEigen e = herm_eig(h);
  const CMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LE(max_abs(back - h), 1e-10);
}

TEST(HermEig, TwoByTwoMatchesQuadraticRoots) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const CMatrix h = random_hermitian(rng, 2);
    const double a = h(0, 0).real(), d = h(1, 1).real(), b = std::abs(h(0, 1));
    const double mean = 0.5 * (a + d), half = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    const HermitianEigen e = herm_eig(h);
    EXPECT_NEAR(e.values(0), mean - half, 1e-12);
    EXPECT_NEAR(e.values(1), mean + half, 1e-12);
  }
}

TEST(HermEig, RejectsNonHermitian) {
  EXPECT_THROW(herm_eig(pauli::raising()), NotHermitianError);
}

TEST(UnitaryEvolution, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(6);
  EXPECT_LE(max_abs(unitary_evolution(random_hermitian(rng, 4), 0.0) - CMatrix::Identity(4, 4)), 1e-14);
}

TEST(UnitaryEvolution, PauliZQuarterTurn) {
  const CMatrix u = unitary_evolution(pauli::z(), std::numbers::pi / 2);
  EXPECT_NEAR(std::abs(u(0, 0) - Complex(0.0, -1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - Complex(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(0, 1)), 0.0, 1e-15);
}

TEST(UnitaryEvolution, GroupLaw) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const CMatrix h = random_hermitian(rng, 5);
    const CMatrix lhs = unitary_evolution(h, 0.7) * unitary_evolution(h, 1.9);
    EXPECT_LE(max_abs(lhs - unitary_evolution(h, 2.6)), 1e-10);
  }
}

TEST(UnitaryEvolution, UnitaryForManyRandomInputs) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> dim(1, 16);
  std::uniform_real_distribution<double> time(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index d = dim(rng);
    const CMatrix u = unitary_evolution(random_hermitian(rng, d), time(rng));
    ASSERT_LE(max_abs(u.adjoint() * u - CMatrix::Identity(d, d)), 1e-10);
  }
}

TEST(MatrixExp, AgreesWithEigenRouteForHermitianGenerators) {
  std::mt19937_64 rng(9);
  const CMatrix h = random_hermitian(rng, 6);
  EXPECT_LE(max_abs(matrix_exp(Complex(0.0, -1.3) * h) - unitary_evolution(h, 1.3)), 1e-11);
}

TEST(Vectorize, ColumnStackingIdentity) {
  std::mt19937_64 rng(10);
  const CMatrix a = bif::testing::random_complex(rng, 3), b = bif::testing::random_complex(rng, 3),
                x = bif::testing::random_complex(rng, 3);
  const CVector lhs = vectorize(a * x * b);
  const CVector rhs = tensor(b.transpose(), a) * vectorize(x);
  EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(unvectorize(vectorize(x), 3), x);
}

TEST(DensityMatrix, AcceptsValidStates) {
  std::mt19937_64 rng(12);
  EXPECT_NO_THROW(DensityMatrix(random_state(rng, 3)));
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(4));
}

TEST(DensityMatrix, RejectsInvalidStates) {
  EXPECT_THROW(DensityMatrix(pauli::z()), InvalidArgumentError);           // trace 0
  EXPECT_THROW(DensityMatrix(pauli::raising()), Error);                    // not Hermitian
  CMatrix negative = CMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{negative}, InvalidArgumentError);
  EXPECT_FALSE(density_matrix_violation(negative).empty());
}

TEST(DensityMatrix, ProductAndReduce) {
  std::mt19937_64 rng(13);
  const DensityMatrix rho(random_state(rng, 2)), sigma(random_state(rng, 3));
  const DensityMatrix prod = DensityMatrix::product(rho, sigma);
  ASSERT_EQ(prod.dims(), (std::vector<std::size_t>{2, 3}));
  EXPECT_LE(max_abs(prod.reduce(0).matrix() - rho.matrix()), 1e-14);
  EXPECT_LE(max_abs(prod.reduce(1).matrix() - sigma.matrix()), 1e-14);
}

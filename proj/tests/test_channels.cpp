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

#include "bif/channels.hpp"
#include "bif/error.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace bif;
using bif::testing::random_hermitian;
using bif::testing::random_state;

namespace {

// exp(-i t H) straight from Eigen's solver, independent of the library path.
CMatrix reference_unitary(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector phases = (Complex(0.0, -t) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix reference_env_trace(const CMatrix& m, Eigen::Index ds, Eigen::Index de) {
  CMatrix out = CMatrix::Zero(ds, ds);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      for (Eigen::Index e = 0; e < de; ++e) out(i, j) += m(i * de + e, j * de + e);
    }
  }
  return out;
}

CMatrix ket_bra(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

/// Random model with H_I = sum_e B_e (x) |e><e| in a random environment basis.
BipartiteModel random_commuting_model(std::mt19937_64& rng, Eigen::Index ds, Eigen::Index de) {
  const CMatrix basis = reference_unitary(random_hermitian(rng, de), 1.0);
  std::uniform_real_distribution<double> level(-2.0, 2.0);
  CMatrix h_e = CMatrix::Zero(de, de);
  CMatrix h_i = CMatrix::Zero(ds * de, ds * de);
  for (Eigen::Index e = 0; e < de; ++e) {
    const CMatrix proj = basis.col(e) * basis.col(e).adjoint();
    h_e += (level(rng) + 3.0 * static_cast<double>(e)) * proj;  // well separated levels
    h_i += tensor(random_hermitian(rng, ds), proj);
  }
  return BipartiteModel::unitary(random_hermitian(rng, ds), 0.5 * (h_e + h_e.adjoint()),
                                 0.5 * (h_i + h_i.adjoint()), DensityMatrix(random_state(rng, de)));
}

}  // namespace

TEST(PauliPropagate, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(30);
  const CMatrix rho = random_state(rng, 2);
  for (PauliAxis a : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
    EXPECT_LE(max_abs(pauli_propagate({a, 1.3}, 0.0, rho) - rho), 1e-15);
  }
}

TEST(PauliPropagate, DiagonalStateUnderZNoise) {
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.3;
  for (double dt : {0.1, 1.0, 10.0}) EXPECT_LE(max_abs(pauli_propagate({PauliAxis::Z, 2.0}, dt, rho) - rho), 1e-15);
}

TEST(PauliPropagate, LongTimeLimitDephases) {
  const CMatrix plus_x = 0.5 * (CMatrix::Identity(2, 2) + pauli::x());
  const CMatrix out = pauli_propagate({PauliAxis::Z, 1.0}, 50.0, plus_x);
  EXPECT_LE(max_abs(out - 0.5 * CMatrix::Identity(2, 2)), 1e-15);
}

TEST(PauliPropagate, MatchesBlochVectorDecay) {
  // Noise along axis a leaves r_a and damps the other components by exp(-2 rate dt).
  std::mt19937_64 rng(31);
  const CMatrix rho = random_state(rng, 2);
  const double decay = std::exp(-2.0 * 0.4 * 1.7);
  const double rx = (rho * pauli::x()).trace().real(), ry = (rho * pauli::y()).trace().real(),
               rz = (rho * pauli::z()).trace().real();
  const CMatrix out = pauli_propagate({PauliAxis::Y, 0.4}, 1.7, rho);
  EXPECT_NEAR((out * pauli::x()).trace().real(), rx * decay, 1e-14);
  EXPECT_NEAR((out * pauli::y()).trace().real(), ry, 1e-14);
  EXPECT_NEAR((out * pauli::z()).trace().real(), rz * decay, 1e-14);
}

TEST(PauliPropagate, RejectsNegativeTime) {
  EXPECT_THROW(pauli_propagate({PauliAxis::Z, 1.0}, -0.1, CMatrix(CMatrix::Identity(2, 2) / 2.0)),
               InvalidArgumentError);
}

TEST(PauliPropagate, PreservesTraceAndPositivity) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 500; ++k) {
    const DensityMatrix rho(random_state(rng, 2));
    const PauliChannel ch{static_cast<PauliAxis>(k % 3), u(rng)};
    const DensityMatrix out = pauli_propagate(ch, u(rng), rho);
    ASSERT_NEAR(out.matrix().trace().real(), 1.0, 1e-14);
    ASSERT_GE(out.min_eigenvalue(), -1e-14);
  }
}

TEST(Composition, AllChannelKindsOnRandomStates) {
  std::mt19937_64 rng(33);
  const CMatrix lowering = pauli::lowering();
  const std::vector<std::shared_ptr<const TwoTimePropagator>> channels{
      std::make_shared<PauliPropagator>(PauliChannel{PauliAxis::X, 0.8}),
      std::make_shared<UnitaryPropagator>(random_hermitian(rng, 2)),
      std::make_shared<LindbladPropagator>(lindblad_generator(random_hermitian(rng, 2), {0.5 * lowering})),
  };
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (const auto& ch : channels) {
    for (int k = 0; k < 30; ++k) {
      const CMatrix rho = random_state(rng, 2);
      double t1 = u(rng), t2 = t1 + u(rng), t3 = t2 + u(rng);
      const CMatrix two_step = ch->apply(t2, t3, ch->apply(t1, t2, rho));
      ASSERT_LE(max_abs(two_step - ch->apply(t1, t3, rho)), 1e-10);
    }
  }
}

TEST(Lindblad, AmplitudeDampingPopulation) {
  const double rate = 0.6;
  const LindbladPropagator prop(lindblad_generator(CMatrix::Zero(2, 2), {std::sqrt(rate) * pauli::lowering()}));
  // |0> is the +1 eigenstate of z; lowering maps it to |1>, so its population decays as exp(-rate t).
  const CMatrix out = prop.propagate(1.5, ket_bra(2, 0, 0));
  EXPECT_NEAR(out(0, 0).real(), std::exp(-rate * 1.5), 1e-12);
  EXPECT_NEAR(out(1, 1).real(), 1.0 - std::exp(-rate * 1.5), 1e-12);
}

TEST(Lindblad, RejectsNonTracePreservingGenerator) {
  CMatrix bad = CMatrix::Zero(4, 4);
  bad(0, 0) = -1.0;
  EXPECT_FALSE(is_trace_preserving_generator(bad));
  EXPECT_THROW(LindbladPropagator{bad}, InvalidArgumentError);
}

TEST(NoiseEnsemble, RejectsBadWeights) {
  auto ch = std::make_shared<PauliPropagator>(PauliChannel{PauliAxis::Z, 1.0});
  EXPECT_THROW(NoiseEnsemble({0.5, 0.6}, {ch, ch}), InvalidArgumentError);
  EXPECT_THROW(NoiseEnsemble({1.2, -0.2}, {ch, ch}), InvalidArgumentError);
}

TEST(NoiseEnsemble, PauliMixtureAverage) {
  const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  const CMatrix plus_z = ket_bra(2, 0, 0);
  // x and y noise both damp the z component.
  const CMatrix out = ens.average(0.0, 1.0, plus_z);
  EXPECT_NEAR((out * pauli::z()).trace().real(), std::exp(-2.0), 1e-14);
}

TEST(BipartitePropagate, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(34);
  const BipartiteModel m = BipartiteModel::unitary(random_hermitian(rng, 2), random_hermitian(rng, 3),
                                                   random_hermitian(rng, 6), DensityMatrix(random_state(rng, 3)));
  const DensityMatrix rho(random_state(rng, 6), {2, 3});
  EXPECT_LE(max_abs(bipartite_propagate(m, 0.0, rho).matrix() - rho.matrix()), 1e-14);
}

TEST(BipartitePropagate, UncoupledProductEvolvesFactorwise) {
  std::mt19937_64 rng(35);
  const CMatrix hs = random_hermitian(rng, 2), he = random_hermitian(rng, 3);
  const BipartiteModel m =
      BipartiteModel::unitary(hs, he, CMatrix::Zero(6, 6), DensityMatrix(random_state(rng, 3)));
  const CMatrix rho = random_state(rng, 2), sigma = random_state(rng, 3);
  const CMatrix us = reference_unitary(hs, 1.4), ue = reference_unitary(he, 1.4);
  const CMatrix expected = tensor(us * rho * us.adjoint(), ue * sigma * ue.adjoint());
  const DensityMatrix out = bipartite_propagate(m, 1.4, DensityMatrix(tensor(rho, sigma), {2, 3}));
  EXPECT_LE(max_abs(out.matrix() - expected), 1e-12);
}

TEST(BipartitePropagate, SemigroupForBothKinds) {
  std::mt19937_64 rng(36);
  const BipartiteModel u = BipartiteModel::unitary(random_hermitian(rng, 2), random_hermitian(rng, 2),
                                                   random_hermitian(rng, 4), DensityMatrix(random_state(rng, 2)));
  const CMatrix gen = lindblad_generator(random_hermitian(rng, 4), {tensor(pauli::lowering(), pauli::z())});
  const BipartiteModel l = BipartiteModel::lindblad(gen, 2, DensityMatrix(random_state(rng, 2)));
  for (const BipartiteModel* m : {&u, &l}) {
    const DensityMatrix rho(random_state(rng, 4), {2, 2});
    const DensityMatrix two = bipartite_propagate(*m, 0.8, bipartite_propagate(*m, 1.1, rho));
    EXPECT_LE(max_abs(two.matrix() - bipartite_propagate(*m, 1.9, rho).matrix()), 1e-10);
  }
}

TEST(BipartitePropagate, RejectsDimensionMismatch) {
  std::mt19937_64 rng(37);
  const BipartiteModel m = BipartiteModel::unitary(pauli::z(), pauli::z(), CMatrix::Zero(4, 4),
                                                   DensityMatrix::maximally_mixed(2));
  EXPECT_THROW(bipartite_propagate(m, 1.0, DensityMatrix(random_state(rng, 3))), DimensionError);
}

TEST(CheckCommuting, BlockFormWithDiagonalEnvironment) {
  std::mt19937_64 rng(38);
  CMatrix h_e = CMatrix::Zero(3, 3);
  h_e.diagonal() << 0.1, 0.7, -1.2;
  CMatrix h_i = CMatrix::Zero(6, 6);
  for (Eigen::Index e = 0; e < 3; ++e) h_i += tensor(random_hermitian(rng, 2), ket_bra(3, e, e));
  EXPECT_TRUE(check_commuting(h_e, h_i, 2, 3));
}

TEST(CheckCommuting, ExchangeCouplingAgainstExplicitCommutator) {
  const double g = 0.8, omega = 1.3;
  const CMatrix h_i = g * (tensor(pauli::raising(), pauli::lowering()) + tensor(pauli::lowering(), pauli::raising()));
  const CMatrix h_e = 0.5 * omega * pauli::z();
  const CMatrix big = tensor(CMatrix::Identity(2, 2), h_e);
  const double norm = (big * h_i - h_i * big).cwiseAbs().maxCoeff();
  EXPECT_GT(norm, 1.0);  // g * omega
  EXPECT_EQ(check_commuting(h_e, h_i, 2, 2), norm <= 1e-10);
}

TEST(CheckCommuting, AnticommutingPaulis) {
  EXPECT_FALSE(check_commuting(pauli::z(), tensor(pauli::x(), pauli::x()), 2, 2));
}

TEST(CommutingDecomposition, UncoupledModel) {
  std::mt19937_64 rng(39);
  CMatrix h_e = CMatrix::Zero(3, 3);
  h_e.diagonal() << 0.0, 1.0, 2.5;
  const CMatrix sigma = random_state(rng, 3);
  const CMatrix hs = random_hermitian(rng, 2);
  const CommutingMixtureModel mix =
      commuting_decomposition(BipartiteModel::unitary(hs, h_e, CMatrix::Zero(6, 6), DensityMatrix(sigma)));
  ASSERT_EQ(mix.weights.size(), 3u);
  for (Eigen::Index e = 0; e < 3; ++e) {
    EXPECT_NEAR(mix.weights[e], sigma(e, e).real(), 1e-12);
    EXPECT_LE(max_abs(mix.effective_hamiltonians[e] - hs), 1e-12);
  }
}

TEST(CommutingDecomposition, PureEnvironmentGivesSingleWeight) {
  CMatrix h_e = CMatrix::Zero(2, 2);
  h_e.diagonal() << -0.5, 0.5;
  const CMatrix h_i = 0.7 * tensor(pauli::x(), pauli::z());
  const CommutingMixtureModel mix =
      commuting_decomposition(BipartiteModel::unitary(pauli::z(), h_e, h_i, DensityMatrix(ket_bra(2, 1, 1))));
  double total = 0.0;
  for (double w : mix.weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
  // Weight 1 sits on the element whose effective Hamiltonian is z - 0.7 x.
  for (std::size_t e = 0; e < mix.weights.size(); ++e) {
    if (mix.weights[e] > 0.5) {
      EXPECT_NEAR(mix.weights[e], 1.0, 1e-12);
      EXPECT_LE(max_abs(mix.effective_hamiltonians[e] - (pauli::z() - 0.7 * pauli::x())), 1e-12);
    } else {
      EXPECT_NEAR(mix.weights[e], 0.0, 1e-12);
    }
  }
}

TEST(CommutingDecomposition, MixtureMatchesBipartiteForRandomModels) {
  std::mt19937_64 rng(40);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index ds = 2 + k % 2, de = 2 + (k / 2) % 2;
    const BipartiteModel m = random_commuting_model(rng, ds, de);
    const CommutingMixtureModel mix = commuting_decomposition(m);
    const CMatrix rho = random_state(rng, ds);
    const CMatrix h_t = m.total_hamiltonian();
    for (double t : {0.3, 1.0, 2.5, 5.0}) {
      const CMatrix u = reference_unitary(h_t, t);
      const CMatrix reference = reference_env_trace(u * tensor(rho, m.sigma0().matrix()) * u.adjoint(), ds, de);
      ASSERT_LE(max_abs(mix.propagate(t, rho) - reference), 1e-10) << "model " << k << " t " << t;
    }
  }
}

TEST(CommutingDecomposition, DegenerateEnvironmentWithCommutingComponents) {
  // H_e = 0 is fully degenerate; H_I's environment parts are all functions of x, so a joint basis exists.
  const CMatrix h_i = tensor(pauli::z(), pauli::x()) + 0.3 * tensor(pauli::x(), CMatrix::Identity(2, 2));
  const BipartiteModel m =
      BipartiteModel::unitary(pauli::y(), CMatrix::Zero(2, 2), h_i, DensityMatrix(ket_bra(2, 0, 0)));
  const CommutingMixtureModel mix = commuting_decomposition(m);
  const CMatrix rho = 0.5 * (CMatrix::Identity(2, 2) + pauli::x());
  const CMatrix u = reference_unitary(m.total_hamiltonian(), 1.7);
  const CMatrix reference = reference_env_trace(u * tensor(rho, ket_bra(2, 0, 0)) * u.adjoint(), 2, 2);
  EXPECT_LE(max_abs(mix.propagate(1.7, rho) - reference), 1e-10);
}

TEST(CommutingDecomposition, RefusesIncompatibleDegenerateBlock) {
  const CMatrix h_i = tensor(pauli::z(), pauli::x()) + tensor(pauli::x(), pauli::z());
  const BipartiteModel m =
      BipartiteModel::unitary(pauli::y(), CMatrix::Zero(2, 2), h_i, DensityMatrix::maximally_mixed(2));
  EXPECT_THROW(commuting_decomposition(m), InvalidArgumentError);
}

TEST(CommutingDecomposition, RefusesNonCommutingModel) {
  const BipartiteModel m = BipartiteModel::unitary(pauli::z(), pauli::z(), tensor(pauli::x(), pauli::x()),
                                                   DensityMatrix::maximally_mixed(2));
  EXPECT_THROW(commuting_decomposition(m), InvalidArgumentError);
}

TEST(EnvInvariance, UncoupledModelsAreInvariant) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const BipartiteModel m = BipartiteModel::unitary(random_hermitian(rng, 2), random_hermitian(rng, 3),
                                                     CMatrix::Zero(6, 6), DensityMatrix(random_state(rng, 3)));
    EXPECT_TRUE(check_env_invariance(m, default_probe_states(2), default_probe_times(), 1e-10));
  }
}

TEST(EnvInvariance, ClassicalRateModelsAreInvariant) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) rates(i, j) = i == j ? 0.0 : u(rng);
    }
    CMatrix sigma = CMatrix::Zero(3, 3);
    sigma.diagonal() << 0.2, 0.5, 0.3;
    const BipartiteModel m = classical_rate_model(
        {random_hermitian(rng, 2), random_hermitian(rng, 2), random_hermitian(rng, 2)}, rates, DensityMatrix(sigma));
    EXPECT_TRUE(check_env_invariance(m, default_probe_states(2), default_probe_times(), 1e-10));
  }
}

TEST(EnvInvariance, ExchangeCouplingIsNotInvariant) {
  const CMatrix h_i = tensor(pauli::raising(), pauli::lowering()) + tensor(pauli::lowering(), pauli::raising());
  const BipartiteModel m =
      BipartiteModel::unitary(0.5 * pauli::z(), 0.5 * pauli::z(), h_i, DensityMatrix(ket_bra(2, 0, 0)));
  EXPECT_FALSE(check_env_invariance(m, default_probe_states(2), {1.0}, 1e-6));
}

TEST(EnvInvariance, ProbeSetsSpanOperatorSpace) {
  for (std::size_t d : {2u, 3u, 4u}) {
    const auto probes = default_probe_states(d);
    Eigen::MatrixXcd span(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(probes.size()));
    for (std::size_t k = 0; k < probes.size(); ++k) span.col(static_cast<Eigen::Index>(k)) = vectorize(probes[k].matrix());
    EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXcd>(span).rank(), static_cast<Eigen::Index>(d * d));
  }
  EXPECT_EQ(default_probe_times().size(), 8u);
}

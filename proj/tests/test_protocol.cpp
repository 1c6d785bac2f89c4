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
#include "bif/protocol.hpp"

#include "bloch_oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace bif;
using bif::testing::random_direction;
using bif::testing::random_hermitian;
using bif::testing::random_state;

namespace {

constexpr double kPi = std::numbers::pi;

bif::testing::Vec3 vec(const BlochDirection& d) { return bif::testing::bloch(d.theta, d.phi); }

DensityMatrix bloch_state(const bif::testing::Vec3& r) {
  return DensityMatrix(CMatrix(0.5 * (CMatrix::Identity(2, 2) + r[0] * pauli::x() + r[1] * pauli::y() +
                                      r[2] * pauli::z())));
}

DensityMatrix up_state(const BlochDirection& d) { return DensityMatrix(CMatrix(bloch_projectors(d).op(0))); }

SchemeConfig qubit_config(const DensityMatrix& rho0, double t, double tau, const BlochDirection& dx,
                          const BlochDirection& dy, const BlochDirection& dz, UpdatePolicy policy) {
  return {.rho0 = rho0,
          .t = t,
          .tau = tau,
          .mx = bloch_projectors(dx),
          .my = bloch_projectors(dy),
          .mz = bloch_projectors(dz),
          .policy = std::move(policy)};
}

void expect_table_matches(const JointTable4& t4, const std::vector<double>& ref, double tol) {
  ASSERT_EQ(t4.data().size(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(t4.data()[i], ref[i], tol) << "cell " << i;
}

CMatrix ket_bra(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

BipartiteModel exchange_model(double g) {
  const CMatrix h_i = g * (tensor(pauli::raising(), pauli::lowering()) + tensor(pauli::lowering(), pauli::raising()));
  return BipartiteModel::unitary(0.5 * pauli::z(), 0.5 * pauli::z(), h_i, DensityMatrix(ket_bra(2, 0, 0)));
}

UpdatePolicy random_renewal(std::mt19937_64& rng, std::size_t nyt, std::size_t d, std::size_t nx) {
  std::vector<DensityMatrix> states;
  for (std::size_t k = 0; k < nyt; ++k) states.emplace_back(random_state(rng, static_cast<Eigen::Index>(d)));
  return UpdatePolicy::random(std::move(states), bif::testing::random_stochastic(rng, nyt, nx));
}

NoiseEnsemble random_ensemble(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<std::shared_ptr<const TwoTimePropagator>> ch{
      std::make_shared<PauliPropagator>(PauliChannel{PauliAxis::X, u(rng)}),
      std::make_shared<UnitaryPropagator>(random_hermitian(rng, 2)),
      std::make_shared<LindbladPropagator>(
          lindblad_generator(random_hermitian(rng, 2), {u(rng) * pauli::lowering(), u(rng) * pauli::z()})),
  };
  const auto w = bif::testing::random_stochastic(rng, 3, 1);
  return NoiseEnsemble({w[0][0], w[1][0], w[2][0]}, std::move(ch));
}

}  // namespace

TEST(JointNoise, StaticChannelFactorizesIntoBornProducts) {
  const NoiseEnsemble still({1.0}, {std::make_shared<UnitaryPropagator>(CMatrix(CMatrix::Zero(2, 2)))});
  std::mt19937_64 rng(50);
  const BlochDirection dx = random_direction(rng), dy = random_direction(rng), dz = random_direction(rng);
  const CMatrix rho0 = random_state(rng, 2);
  const JointTable4 t4 = joint_noise(still, qubit_config(DensityMatrix(rho0), 0.0, 0.0, dx, dy, dz, UpdatePolicy::deterministic()));
  const bif::testing::Vec3 r0{(rho0 * pauli::x()).trace().real(), (rho0 * pauli::y()).trace().real(),
                              (rho0 * pauli::z()).trace().real()};
  using bif::testing::born;
  using bif::testing::scaled;
  using bif::testing::sign_of;
  for (std::size_t z = 0; z < 2; ++z) {
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t x = 0; x < 2; ++x) {
        const double expected = born(r0, vec(dx), x) * born(scaled(vec(dx), sign_of(x)), vec(dy), y) *
                                born(scaled(vec(dy), sign_of(y)), vec(dz), z);
        EXPECT_NEAR(t4.at(z, y, y, x), expected, 1e-14);
        EXPECT_EQ(t4.at(z, 1 - y, y, x), 0.0);
      }
    }
  }
}

TEST(JointNoise, EternalModelMatchesEnumeration) {
  const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  const BlochDirection n{kPi / 2, 0.0};
  const JointTable4 t4 = joint_noise(ens, qubit_config(up_state(BlochDirection::z()), 1.0, 1.0, BlochDirection::x(), n,
                                                        BlochDirection::x(), UpdatePolicy::deterministic()));
  bif::testing::OracleScheme s{.nx = vec(BlochDirection::x()), .ny = vec(n), .nz = vec(BlochDirection::x())};
  expect_table_matches(t4, bif::testing::oracle_p4(s), 1e-12);
}

TEST(JointNoise, PauliMixturesMatchEnumerationForRandomConfigurations) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const auto w = bif::testing::random_stochastic(rng, 3, 1);
    const double rate = u(rng);
    const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(rate, {w[0][0], w[1][0], w[2][0]});
    const BlochDirection dx = random_direction(rng), dy = random_direction(rng), dz = random_direction(rng);
    const bif::testing::Vec3 r0 = bif::testing::scaled(vec(random_direction(rng)), 0.9);
    bif::testing::OracleScheme s{.rate = rate, .q = {w[0][0], w[1][0], w[2][0]}, .r0 = r0,
                                 .nx = vec(dx), .ny = vec(dy), .nz = vec(dz), .t = u(rng), .tau = u(rng)};
    UpdatePolicy policy = UpdatePolicy::deterministic();
    if (k % 2 == 1) {
      s.random = true;
      s.renewed = {vec(random_direction(rng)), bif::testing::scaled(vec(random_direction(rng)), 0.5)};
      s.update = bif::testing::random_stochastic(rng, 2, 2);
      policy = UpdatePolicy::random({bloch_state(s.renewed[0]), bloch_state(s.renewed[1])}, s.update);
    }
    const JointTable4 t4 = joint_noise(ens, qubit_config(bloch_state(r0), s.t, s.tau, dx, dy, dz, policy));
    const std::vector<double> ref = bif::testing::oracle_p4(s);
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(t4.data()[i], ref[i], 1e-12) << "config " << k;
  }
}

TEST(JointNoise, TablesAreNormalizedAndNonnegative) {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 100; ++k) {
    const NoiseEnsemble ens = random_ensemble(rng);
    UpdatePolicy policy = k % 2 ? random_renewal(rng, 3, 2, 2) : UpdatePolicy::deterministic();
    const JointTable4 t4 = joint_noise(ens, qubit_config(DensityMatrix(random_state(rng, 2)), 0.7, 1.3, random_direction(rng),
                                                         random_direction(rng), random_direction(rng), policy));
    EXPECT_NEAR(t4.sum(), 1.0, 1e-10);
    for (double v : t4.data()) EXPECT_GE(v, 0.0);
  }
}

TEST(JointNoise, ZeroProbabilityBranchGivesExactZeros) {
  const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  const JointTable4 t4 = joint_noise(ens, qubit_config(up_state(BlochDirection::z()), 1.0, 1.0, BlochDirection::z(),
                                                       BlochDirection::x(), BlochDirection::x(), UpdatePolicy::deterministic()));
  for (std::size_t z = 0; z < 2; ++z) {
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t yt = 0; yt < 2; ++yt) EXPECT_EQ(t4.at(z, yt, y, 1), 0.0);
    }
  }
}

TEST(JointNoise, RejectsDimensionMismatch) {
  const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  SchemeConfig cfg = qubit_config(up_state(BlochDirection::z()), 1.0, 1.0, BlochDirection::x(), BlochDirection::x(),
                                  BlochDirection::x(), UpdatePolicy::deterministic());
  cfg.mz = basis_projectors(3);
  EXPECT_THROW(joint_noise(ens, cfg), Error);
}

TEST(MarkovResidual, RandomPolicyTheoremForNoiseEnsembles) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const NoiseEnsemble ens = random_ensemble(rng);
    const SchemeConfig cfg = qubit_config(DensityMatrix(random_state(rng, 2)), u(rng), u(rng), random_direction(rng),
                                          random_direction(rng), random_direction(rng),
                                          random_renewal(rng, 2 + k % 3, 2, 2));
    ASSERT_LE(markov_residual(marginalize_y(joint_noise(ens, cfg))), 1e-12) << "config " << k;
  }
}

TEST(MarkovResidual, EternalDeterministicIsLarge) {
  const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  const JointTable3 t3 = marginalize_y(joint_noise(
      ens, qubit_config(up_state(BlochDirection::z()), 1.0, 1.0, BlochDirection::x(), BlochDirection::x(),
                        BlochDirection::x(), UpdatePolicy::deterministic())));
  EXPECT_GT(markov_residual(t3), 0.01);
}

TEST(MarkovResidual, RandomEternalTableConditionallyFactorizes) {
  bif::testing::OracleScheme s{.nx = vec(BlochDirection::x()), .ny = vec(BlochDirection::x()),
                               .nz = vec(BlochDirection::x()), .random = true};
  s.renewed = {vec(BlochDirection::x()), bif::testing::scaled(vec(BlochDirection::x()), -1.0)};
  s.update = {{0.5, 0.5}, {0.5, 0.5}};
  const std::vector<double> p4 = bif::testing::oracle_p4(s);
  JointTable3 t3(2, 2, 2);
  for (std::size_t z = 0; z < 2; ++z) {
    for (std::size_t yt = 0; yt < 2; ++yt) {
      for (std::size_t x = 0; x < 2; ++x) t3.at(z, yt, x) = p4[((z * 2 + yt) * 2 + 0) * 2 + x] + p4[((z * 2 + yt) * 2 + 1) * 2 + x];
    }
  }
  const ConditionalSet c = conditionals(t3);
  for (std::size_t yt = 0; yt < 2; ++yt) {
    for (std::size_t z = 0; z < 2; ++z) {
      for (std::size_t x = 0; x < 2; ++x) EXPECT_NEAR(c.zx(z, x, yt), c.z_given(z, yt) * c.x_given(x, yt), 1e-15);
    }
  }
}

TEST(MarginalizeY, DeterministicSupportFollowsY) {
  const NoiseEnsemble ens = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  const JointTable4 t4 = joint_noise(ens, qubit_config(up_state(BlochDirection::z()), 1.0, 1.0, BlochDirection::x(),
                                                       BlochDirection::x(), BlochDirection::x(), UpdatePolicy::deterministic()));
  for (std::size_t z = 0; z < 2; ++z) {
    for (std::size_t x = 0; x < 2; ++x) {
      for (std::size_t yt = 0; yt < 2; ++yt) EXPECT_EQ(t4.at(z, yt, 1 - yt, x), 0.0);
    }
  }
  const JointTable3 t3 = marginalize_y(t4);
  EXPECT_NEAR(t3.sum(), t4.sum(), 1e-15);
  EXPECT_EQ(t3.ytilde_labels, t4.labels.y);
}

TEST(MarginalizeY, UniformTable) {
  JointTable4 t4(2, 2, 2, 2);
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t yt = 0; yt < 2; ++yt)
      for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t x = 0; x < 2; ++x) t4.at(z, yt, y, x) = 1.0 / 16.0;
  const JointTable3 t3 = marginalize_y(t4);
  for (double v : t3.data()) EXPECT_EQ(v, 1.0 / 8.0);
  EXPECT_EQ(t3.sum(), 1.0);
}

TEST(Conditionals, ProductTable) {
  const std::array<double, 2> pz{0.3, 0.7}, py{0.6, 0.4}, px{0.1, 0.9};
  JointTable3 t3(2, 2, 2);
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t x = 0; x < 2; ++x) t3.at(z, y, x) = pz[z] * py[y] * px[x];
  const ConditionalSet c = conditionals(t3);
  for (std::size_t y = 0; y < 2; ++y) {
    EXPECT_NEAR(c.p_y[y], py[y], 1e-15);
    for (std::size_t z = 0; z < 2; ++z)
      for (std::size_t x = 0; x < 2; ++x) EXPECT_NEAR(c.zx(z, x, y), pz[z] * px[x], 1e-15);
  }
  EXPECT_LE(markov_residual(t3), 1e-15);
}

TEST(Conditionals, NormalizedSlicesAndUndefinedSlices) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  JointTable3 t3(3, 3, 2);
  double s = 0.0;
  for (std::size_t z = 0; z < 3; ++z)
    for (std::size_t x = 0; x < 2; ++x) s += (t3.at(z, 0, x) = u(rng)) + (t3.at(z, 2, x) = u(rng));
  for (std::size_t z = 0; z < 3; ++z)
    for (std::size_t x = 0; x < 2; ++x) t3.at(z, 0, x) /= s, t3.at(z, 2, x) /= s;
  const ConditionalSet c = conditionals(t3);
  EXPECT_TRUE(c.defined[0]);
  EXPECT_FALSE(c.defined[1]);
  for (std::size_t yt : {0u, 2u}) {
    double total = 0.0;
    for (std::size_t z = 0; z < 3; ++z)
      for (std::size_t x = 0; x < 2; ++x) total += c.zx(z, x, yt);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Policies, DeterministicEqualsConditionalDeltaWithProjectorStates) {
  std::mt19937_64 rng(55);
  for (int k = 0; k < 50; ++k) {
    const NoiseEnsemble ens = random_ensemble(rng);
    const BlochDirection dy = random_direction(rng);
    const MeasurementSet my = bloch_projectors(dy);
    const UpdatePolicy delta = UpdatePolicy::conditional(
        {DensityMatrix(CMatrix(my.op(0))), DensityMatrix(CMatrix(my.op(1)))},
        {{{1.0, 1.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 1.0}}});
    SchemeConfig cfg = qubit_config(DensityMatrix(random_state(rng, 2)), 0.9, 0.4, random_direction(rng), dy,
                                    random_direction(rng), UpdatePolicy::deterministic());
    const JointTable4 det = joint_noise(ens, cfg);
    cfg.policy = delta;
    const JointTable4 cond = joint_noise(ens, cfg);
    for (std::size_t i = 0; i < det.data().size(); ++i) ASSERT_NEAR(det.data()[i], cond.data()[i], 1e-14);
  }
}

TEST(JointBipartite, UncoupledModelIsSequentialSystemComputation) {
  std::mt19937_64 rng(56);
  const CMatrix hs = random_hermitian(rng, 2);
  const BipartiteModel m = BipartiteModel::unitary(hs, random_hermitian(rng, 3), CMatrix::Zero(6, 6),
                                                   DensityMatrix(random_state(rng, 3)));
  const NoiseEnsemble closed({1.0}, {std::make_shared<UnitaryPropagator>(hs)});
  for (int k = 0; k < 20; ++k) {
    const UpdatePolicy policy = k % 2 ? random_renewal(rng, 2, 2, 2) : UpdatePolicy::deterministic();
    const SchemeConfig cfg = qubit_config(DensityMatrix(random_state(rng, 2)), 0.8, 1.7, random_direction(rng),
                                          random_direction(rng), random_direction(rng), policy);
    const JointTable4 a = joint_bipartite(m, cfg), b = joint_noise(closed, cfg);
    for (std::size_t i = 0; i < a.data().size(); ++i) ASSERT_NEAR(a.data()[i], b.data()[i], 1e-12);
  }
}

TEST(JointBipartite, CommutingModelEqualsMixtureOfUnitaries) {
  std::mt19937_64 rng(57);
  for (int k = 0; k < 30; ++k) {
    CMatrix h_e = CMatrix::Zero(2, 2);
    h_e.diagonal() << -0.6, 0.9;
    const CMatrix h_i = tensor(random_hermitian(rng, 2), pauli::z()) + tensor(random_hermitian(rng, 2), CMatrix::Identity(2, 2));
    const BipartiteModel m = BipartiteModel::unitary(random_hermitian(rng, 2), h_e, h_i, DensityMatrix(random_state(rng, 2)));
    const NoiseEnsemble mix = commuting_decomposition(m).to_noise_ensemble();
    const UpdatePolicy policy = k % 2 ? random_renewal(rng, 2, 2, 2) : UpdatePolicy::deterministic();
    const SchemeConfig cfg = qubit_config(DensityMatrix(random_state(rng, 2)), 1.1, 0.6, random_direction(rng),
                                          random_direction(rng), random_direction(rng), policy);
    const JointTable4 a = joint_bipartite(m, cfg), b = joint_noise(mix, cfg);
    for (std::size_t i = 0; i < a.data().size(); ++i) ASSERT_NEAR(a.data()[i], b.data()[i], 1e-10);
    if (k % 2) EXPECT_LE(markov_residual(marginalize_y(a)), 1e-10);
  }
}

TEST(JointBipartite, ExchangeCouplingShowsRandomPolicyResidual) {
  const BipartiteModel m = exchange_model(1.0);
  const MeasurementSet mx = bloch_projectors(BlochDirection::x());
  const UpdatePolicy policy =
      UpdatePolicy::random_uniform({DensityMatrix(CMatrix(mx.op(0))), DensityMatrix(CMatrix(mx.op(1)))}, 2);
  const SchemeConfig cfg = qubit_config(up_state(BlochDirection::x()), 1.0, 1.0, BlochDirection::z(),
                                        BlochDirection::x(), BlochDirection::z(), policy);
  EXPECT_GT(markov_residual(marginalize_y(joint_bipartite(m, cfg))), 1e-3);
}

TEST(JointBipartite, InvariantEnvironmentTheorem) {
  std::mt19937_64 rng(58);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    Eigen::MatrixXd rates(2, 2);
    rates << 0.0, u(rng), u(rng), 0.0;
    CMatrix sigma = CMatrix::Zero(2, 2);
    sigma.diagonal() << 0.35, 0.65;
    const BipartiteModel m =
        classical_rate_model({random_hermitian(rng, 2), random_hermitian(rng, 2)}, rates, DensityMatrix(sigma));
    ASSERT_TRUE(check_env_invariance(m, default_probe_states(2), default_probe_times(), 1e-10));
    const SchemeConfig cfg = qubit_config(DensityMatrix(random_state(rng, 2)), 0.5 + u(rng), 0.5 + u(rng),
                                          random_direction(rng), random_direction(rng), random_direction(rng),
                                          random_renewal(rng, 2, 2, 2));
    ASSERT_LE(markov_residual(marginalize_y(joint_bipartite(m, cfg))), 1e-8) << "model " << k;
  }
}

TEST(JointBipartite, ZeroProbabilityBranchGivesExactZeros) {
  const BipartiteModel m = exchange_model(1.0);
  const SchemeConfig cfg = qubit_config(up_state(BlochDirection::z()), 0.5, 0.5, BlochDirection::z(),
                                        BlochDirection::x(), BlochDirection::x(), UpdatePolicy::deterministic());
  const JointTable4 t4 = joint_bipartite(m, cfg);
  EXPECT_NEAR(t4.sum(), 1.0, 1e-12);
  for (std::size_t z = 0; z < 2; ++z)
    for (std::size_t yt = 0; yt < 2; ++yt)
      for (std::size_t y = 0; y < 2; ++y) EXPECT_EQ(t4.at(z, yt, y, 1), 0.0);
}

TEST(JointBipartite, LabelsFollowPolicy) {
  const BipartiteModel m = exchange_model(1.0);
  SchemeConfig cfg = qubit_config(up_state(BlochDirection::x()), 0.5, 0.5, BlochDirection::z(), BlochDirection::x(),
                                  BlochDirection::x(), UpdatePolicy::deterministic());
  EXPECT_EQ(joint_bipartite(m, cfg).labels.ytilde, (std::vector<std::string>{"+1", "-1"}));
  std::mt19937_64 rng(59);
  cfg.policy = random_renewal(rng, 3, 2, 2);
  const JointTable4 t4 = joint_bipartite(m, cfg);
  EXPECT_EQ(t4.labels.ytilde, (std::vector<std::string>{"r0", "r1", "r2"}));
  EXPECT_EQ(t4.policy, UpdatePolicy::Kind::Random);
}

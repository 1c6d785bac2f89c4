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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace bif {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kOutputPositivityTol = 1e-8;
constexpr double kDegeneracyTol = 1e-9;

void require_nonnegative_dt(double dt, const char* who) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw InvalidArgumentError(std::string(who) + ": time step must be finite and >= 0");
  }
}

void require_hermitian(const CMatrix& h, const char* what) {
  if (!is_hermitian(h, kHermitianInputTol)) {
    throw NotHermitianError(std::string(what) + " is not Hermitian");
  }
}

CMatrix embed_env(const CMatrix& h_e, std::size_t d_s) {
  const auto ds = static_cast<Eigen::Index>(d_s);
  return tensor(CMatrix::Identity(ds, ds), h_e);
}

// <e_k| A |e_l> as a system operator, for |e_k>, |e_l> given as environment
// column vectors.
CMatrix env_matrix_element(const CMatrix& a, const CVector& ek, const CVector& el,
                           std::size_t d_s, std::size_t d_e) {
  const auto ds = static_cast<Eigen::Index>(d_s);
  const auto de = static_cast<Eigen::Index>(d_e);
  CMatrix out = CMatrix::Zero(ds, ds);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      out(i, j) = (ek.adjoint() * a.block(i * de, j * de, de, de) * el).value();
    }
  }
  return out;
}

}  // namespace

CMatrix pauli_matrix(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return pauli::x();
    case PauliAxis::Y: return pauli::y();
    case PauliAxis::Z: return pauli::z();
  }
  return pauli::z();
}

CMatrix pauli_propagate(const PauliChannel& ch, double dt, const CMatrix& rho) {
  require_nonnegative_dt(dt, "pauli_propagate");
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw DimensionError("pauli_propagate: qubit operator required");
  }
  const double decay = std::exp(-2.0 * ch.rate * dt);
  const double h_plus = 0.5 * (1.0 + decay);
  const double h_minus = 0.5 * (1.0 - decay);
  const CMatrix s = pauli_matrix(ch.axis);
  return h_plus * rho + h_minus * (s * rho * s);
}

DensityMatrix pauli_propagate(const PauliChannel& ch, double dt, const DensityMatrix& rho) {
  return DensityMatrix(pauli_propagate(ch, dt, rho.matrix()), rho.dims());
}

PauliPropagator::PauliPropagator(PauliChannel ch) : ch_(ch) {
  if (!(ch_.rate >= 0.0) || !std::isfinite(ch_.rate)) {
    throw InvalidArgumentError("PauliChannel: rate must be finite and >= 0");
  }
}

CMatrix PauliPropagator::propagate(double dt, const CMatrix& rho) const {
  return pauli_propagate(ch_, dt, rho);
}

UnitaryPropagator::UnitaryPropagator(CMatrix hamiltonian) : h_(std::move(hamiltonian)) {
  require_hermitian(h_, "UnitaryPropagator: Hamiltonian");
}

CMatrix UnitaryPropagator::unitary(double dt) const {
  require_nonnegative_dt(dt, "UnitaryPropagator");
  return cache_->get(dt, [&] { return unitary_evolution(h_, dt); });
}

CMatrix UnitaryPropagator::propagate(double dt, const CMatrix& rho) const {
  if (rho.rows() != h_.rows()) throw DimensionError("UnitaryPropagator: dimension mismatch");
  const CMatrix u = unitary(dt);
  return u * rho * u.adjoint();
}

CMatrix lindblad_generator(const CMatrix& hamiltonian, const std::vector<CMatrix>& jumps) {
  require_hermitian(hamiltonian, "lindblad_generator: Hamiltonian");
  const auto d = hamiltonian.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const Complex i(0.0, 1.0);
  CMatrix gen = -i * (tensor(id, hamiltonian) - tensor(hamiltonian.transpose(), id));
  for (const CMatrix& l : jumps) {
    if (l.rows() != d || l.cols() != d) {
      throw DimensionError("lindblad_generator: jump operator dimension mismatch");
    }
    const CMatrix ldl = l.adjoint() * l;
    gen += tensor(l.conjugate(), l) - 0.5 * tensor(id, ldl) - 0.5 * tensor(ldl.transpose(), id);
  }
  return gen;
}

bool is_trace_preserving_generator(const CMatrix& generator, double tol) {
  const auto n = generator.rows();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n || generator.cols() != n) return false;
  const CVector vec_id = vectorize(CMatrix::Identity(d, d));
  const CVector left = generator.adjoint() * vec_id;
  return left.cwiseAbs().maxCoeff() <= tol;
}

LindbladPropagator::LindbladPropagator(CMatrix generator) : generator_(std::move(generator)) {
  const auto n = generator_.rows();
  const auto d = std::llround(std::sqrt(static_cast<double>(n)));
  if (generator_.cols() != n || d * d != n || n == 0) {
    throw InvalidArgumentError("LindbladPropagator: generator must be square of size d^2");
  }
  if (!all_finite(generator_)) throw InvalidArgumentError("LindbladPropagator: non-finite generator");
  if (!is_trace_preserving_generator(generator_)) {
    throw InvalidArgumentError("LindbladPropagator: generator is not trace preserving");
  }
  dim_ = static_cast<std::size_t>(d);
}

CMatrix LindbladPropagator::superoperator(double dt) const {
  require_nonnegative_dt(dt, "LindbladPropagator");
  return cache_->get(dt, [&] { return matrix_exp(dt * generator_); });
}

CMatrix LindbladPropagator::propagate(double dt, const CMatrix& rho) const {
  if (static_cast<std::size_t>(rho.rows()) != dim_) {
    throw DimensionError("LindbladPropagator: dimension mismatch");
  }
  if (dt == 0.0) return rho;
  return unvectorize(superoperator(dt) * vectorize(rho), dim_);
}

NoiseEnsemble::NoiseEnsemble(std::vector<double> weights,
                             std::vector<std::shared_ptr<const TwoTimePropagator>> channels)
    : weights_(std::move(weights)), channels_(std::move(channels)) {
  if (weights_.empty() || weights_.size() != channels_.size()) {
    throw InvalidArgumentError("NoiseEnsemble: one weight per channel required");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgumentError("NoiseEnsemble: weights must be finite and >= 0");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    throw InvalidArgumentError("NoiseEnsemble: weights must sum to 1");
  }
  for (const auto& ch : channels_) {
    if (!ch) throw InvalidArgumentError("NoiseEnsemble: null channel");
    if (ch->dim() != channels_.front()->dim()) {
      throw DimensionError("NoiseEnsemble: channels act on different dimensions");
    }
  }
}

NoiseEnsemble NoiseEnsemble::pauli_mixture(double rate, const std::array<double, 3>& weights) {
  std::vector<std::shared_ptr<const TwoTimePropagator>> channels{
      std::make_shared<PauliPropagator>(PauliChannel{PauliAxis::X, rate}),
      std::make_shared<PauliPropagator>(PauliChannel{PauliAxis::Y, rate}),
      std::make_shared<PauliPropagator>(PauliChannel{PauliAxis::Z, rate})};
  return NoiseEnsemble({weights[0], weights[1], weights[2]}, std::move(channels));
}

CMatrix NoiseEnsemble::average(double t_from, double t_to, const CMatrix& rho) const {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < size(); ++a) {
    out += weights_[a] * channels_[a]->apply(t_from, t_to, rho);
  }
  return out;
}

BipartiteModel BipartiteModel::unitary(CMatrix h_s, CMatrix h_e, CMatrix h_i,
                                       DensityMatrix sigma0) {
  require_hermitian(h_s, "BipartiteModel: H_s");
  require_hermitian(h_e, "BipartiteModel: H_e");
  require_hermitian(h_i, "BipartiteModel: H_I");
  BipartiteModel m;
  m.kind_ = Kind::Unitary;
  m.d_s_ = static_cast<std::size_t>(h_s.rows());
  m.d_e_ = static_cast<std::size_t>(h_e.rows());
  if (static_cast<std::size_t>(h_i.rows()) != m.total_dim()) {
    throw DimensionError("BipartiteModel: H_I must act on the full system (x) environment space");
  }
  if (m.total_dim() > kMaxUnitaryDim) {
    throw InvalidArgumentError("BipartiteModel: d_s * d_e exceeds the unitary cap of 64");
  }
  if (sigma0.dim() != m.d_e_) throw DimensionError("BipartiteModel: sigma0 dimension differs from H_e");
  m.h_s_ = std::move(h_s);
  m.h_e_ = std::move(h_e);
  m.h_i_ = std::move(h_i);
  m.sigma0_ = std::move(sigma0);
  m.propagator_ = std::make_shared<UnitaryPropagator>(m.total_hamiltonian());
  return m;
}

BipartiteModel BipartiteModel::lindblad(CMatrix generator, std::size_t d_s,
                                        DensityMatrix sigma0) {
  BipartiteModel m;
  m.kind_ = Kind::Lindblad;
  auto prop = std::make_shared<LindbladPropagator>(std::move(generator));
  const std::size_t d = prop->dim();
  if (d_s == 0 || d % d_s != 0) {
    throw DimensionError("BipartiteModel: system dimension does not divide the total dimension");
  }
  if (d > kMaxLindbladDim) {
    throw InvalidArgumentError("BipartiteModel: d_s * d_e exceeds the Lindblad cap of 16");
  }
  m.d_s_ = d_s;
  m.d_e_ = d / d_s;
  if (sigma0.dim() != m.d_e_) throw DimensionError("BipartiteModel: sigma0 dimension mismatch");
  m.sigma0_ = std::move(sigma0);
  m.generator_ = prop->generator();
  m.propagator_ = std::move(prop);
  return m;
}

CMatrix BipartiteModel::total_hamiltonian() const {
  if (kind_ != Kind::Unitary) throw InvalidArgumentError("BipartiteModel: not a unitary model");
  const auto ds = static_cast<Eigen::Index>(d_s_);
  const auto de = static_cast<Eigen::Index>(d_e_);
  return tensor(h_s_, CMatrix::Identity(de, de)) + tensor(CMatrix::Identity(ds, ds), h_e_) + h_i_;
}

CMatrix BipartiteModel::propagate(double dt, const CMatrix& rho_se) const {
  if (static_cast<std::size_t>(rho_se.rows()) != total_dim()) {
    throw DimensionError("BipartiteModel: operator dimension differs from d_s * d_e");
  }
  return propagator_->propagate(dt, rho_se);
}

BipartiteModel classical_rate_model(const std::vector<CMatrix>& conditioned_hamiltonians,
                                    const Eigen::MatrixXd& rates, DensityMatrix sigma0) {
  const std::size_t d_e = conditioned_hamiltonians.size();
  if (d_e == 0) throw InvalidArgumentError("classical_rate_model: no environment states");
  if (static_cast<std::size_t>(rates.rows()) != d_e || static_cast<std::size_t>(rates.cols()) != d_e) {
    throw DimensionError("classical_rate_model: rate matrix must be d_e x d_e");
  }
  const auto ds = conditioned_hamiltonians.front().rows();
  const auto de = static_cast<Eigen::Index>(d_e);
  CMatrix h = CMatrix::Zero(ds * de, ds * de);
  for (Eigen::Index e = 0; e < de; ++e) {
    const CMatrix& hs = conditioned_hamiltonians[static_cast<std::size_t>(e)];
    if (hs.rows() != ds) throw DimensionError("classical_rate_model: system dimensions differ");
    CMatrix proj = CMatrix::Zero(de, de);
    proj(e, e) = 1.0;
    h += tensor(hs, proj);
  }
  std::vector<CMatrix> jumps;
  for (Eigen::Index to = 0; to < de; ++to) {
    for (Eigen::Index from = 0; from < de; ++from) {
      if (to == from) continue;
      const double r = rates(to, from);
      if (!(r >= 0.0)) throw InvalidArgumentError("classical_rate_model: rates must be >= 0");
      if (r == 0.0) continue;
      CMatrix flip = CMatrix::Zero(de, de);
      flip(to, from) = std::sqrt(r);
      jumps.push_back(tensor(CMatrix::Identity(ds, ds), flip));
    }
  }
  return BipartiteModel::lindblad(lindblad_generator(h, jumps), static_cast<std::size_t>(ds),
                                  std::move(sigma0));
}

DensityMatrix bipartite_propagate(const BipartiteModel& model, double dt,
                                  const DensityMatrix& rho_se) {
  require_nonnegative_dt(dt, "bipartite_propagate");
  if (rho_se.dim() != model.total_dim()) {
    throw DimensionError("bipartite_propagate: state dimension differs from d_s * d_e");
  }
  CMatrix out = model.propagate(dt, rho_se.matrix());
  out = 0.5 * (out + out.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(out, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kOutputPositivityTol) {
    throw InvalidGeneratorError("bipartite_propagate: propagated state is not positive");
  }
  return DensityMatrix(std::move(out), {model.system_dim(), model.env_dim()});
}

bool check_commuting(const CMatrix& h_e, const CMatrix& h_i, std::size_t d_s, std::size_t d_e,
                     double tol) {
  if (static_cast<std::size_t>(h_e.rows()) != d_e ||
      static_cast<std::size_t>(h_i.rows()) != d_s * d_e) {
    throw DimensionError("check_commuting: dimension mismatch");
  }
  const CMatrix he = embed_env(h_e, d_s);
  return max_abs(he * h_i - h_i * he) <= tol;
}

NoiseEnsemble CommutingMixtureModel::to_noise_ensemble() const {
  std::vector<std::shared_ptr<const TwoTimePropagator>> channels;
  for (const CMatrix& h : effective_hamiltonians) {
    channels.push_back(std::make_shared<UnitaryPropagator>(h));
  }
  return NoiseEnsemble(weights, std::move(channels));
}

CMatrix CommutingMixtureModel::propagate(double t, const CMatrix& rho) const {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t e = 0; e < weights.size(); ++e) {
    const CMatrix u = unitary_evolution(effective_hamiltonians[e], t);
    out += weights[e] * (u * rho * u.adjoint());
  }
  return out;
}

CommutingMixtureModel commuting_decomposition(const BipartiteModel& model) {
  if (model.kind() != BipartiteModel::Kind::Unitary) {
    throw InvalidArgumentError("commuting_decomposition: requires a unitary model");
  }
  const std::size_t d_s = model.system_dim();
  const std::size_t d_e = model.env_dim();
  if (!check_commuting(model.h_e(), model.h_i(), d_s, d_e, 1e-10)) {
    throw InvalidArgumentError("commuting_decomposition: [H_e, H_I] != 0");
  }
  const HermitianEigen env = herm_eig(model.h_e());
  const auto de = static_cast<Eigen::Index>(d_e);
  const CMatrix& sigma = model.sigma0().matrix();

  CMatrix basis(de, de);
  // Fixed-seed generator: the decomposition is a pure function of the model.
  std::mt19937_64 rng(0x5eed'c0de'd15c'0ULL);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  Eigen::Index start = 0;
  while (start < de) {
    Eigen::Index stop = start + 1;
    while (stop < de && env.values(stop) - env.values(start) <= kDegeneracyTol) ++stop;
    const Eigen::Index nb = stop - start;
    const CMatrix block = env.vectors.middleCols(start, nb);
    if (nb == 1) {
      basis.col(start) = block.col(0);
      start = stop;
      continue;
    }
    // Environment components of H_I inside the block, as Hermitian parts.
    std::vector<CMatrix> family;
    const auto ds = static_cast<Eigen::Index>(d_s);
    for (Eigen::Index i = 0; i < ds; ++i) {
      for (Eigen::Index j = 0; j < ds; ++j) {
        const CMatrix comp =
            block.adjoint() * model.h_i().block(i * de, j * de, de, de) * block;
        family.push_back(comp + comp.adjoint());
        family.push_back(Complex(0.0, 1.0) * (comp - comp.adjoint()));
      }
    }
    CMatrix combo = CMatrix::Zero(nb, nb);
    for (const CMatrix& k : family) combo += coeff(rng) * k;
    const HermitianEigen joint = herm_eig(combo);
    const double scale = std::max(1.0, max_abs(model.h_i()));
    for (const CMatrix& k : family) {
      CMatrix rotated = joint.vectors.adjoint() * k * joint.vectors;
      rotated.diagonal().setZero();
      if (max_abs(rotated) > 1e-8 * scale) {
        throw InvalidArgumentError(
            "commuting_decomposition: H_I cannot be diagonalized inside a degenerate H_e block");
      }
    }
    // Remaining freedom inside jointly degenerate sub-blocks diagonalizes sigma0.
    CMatrix local = joint.vectors;
    Eigen::Index s0 = 0;
    while (s0 < nb) {
      Eigen::Index s1 = s0 + 1;
      while (s1 < nb && joint.values(s1) - joint.values(s0) <= 1e-8 * scale) ++s1;
      if (s1 - s0 > 1) {
        const CMatrix sub = block * local.middleCols(s0, s1 - s0);
        const HermitianEigen se = herm_eig(sub.adjoint() * sigma * sub);
        local.middleCols(s0, s1 - s0) = local.middleCols(s0, s1 - s0) * se.vectors;
      }
      s0 = s1;
    }
    basis.middleCols(start, nb) = block * local;
    start = stop;
  }

  CommutingMixtureModel out;
  out.env_basis = basis;
  double total = 0.0;
  for (Eigen::Index e = 0; e < de; ++e) {
    const CVector ket = basis.col(e);
    const double w = std::max(0.0, (ket.adjoint() * sigma * ket)(0, 0).real());
    out.weights.push_back(w);
    total += w;
    CMatrix heff = model.h_s() + env_matrix_element(model.h_i(), ket, ket, d_s, d_e);
    out.effective_hamiltonians.push_back(0.5 * (heff + heff.adjoint()));
  }
  for (double& w : out.weights) w /= total;
  return out;
}

std::vector<DensityMatrix> default_probe_states(std::size_t d_s) {
  std::vector<DensityMatrix> probes;
  const auto d = static_cast<Eigen::Index>(d_s);
  const double r = 1.0 / std::sqrt(2.0);
  if (d_s == 2) {
    CVector v(2);
    v << 1.0, 0.0; probes.push_back(DensityMatrix::pure(v));
    v << 0.0, 1.0; probes.push_back(DensityMatrix::pure(v));
    v << r, r; probes.push_back(DensityMatrix::pure(v));
    v << r, -r; probes.push_back(DensityMatrix::pure(v));
    v << r, Complex(0.0, r); probes.push_back(DensityMatrix::pure(v));
    v << r, Complex(0.0, -r); probes.push_back(DensityMatrix::pure(v));
    return probes;
  }
  for (Eigen::Index k = 0; k < d; ++k) probes.push_back(DensityMatrix::pure(CVector::Unit(d, k)));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      CVector v = CVector::Zero(d);
      v(j) = r;
      v(k) = r;
      probes.push_back(DensityMatrix::pure(v));
      v(k) = Complex(0.0, r);
      probes.push_back(DensityMatrix::pure(v));
    }
  }
  return probes;
}

std::vector<double> default_probe_times() {
  std::vector<double> times;
  for (int k = 0; k < 8; ++k) times.push_back(std::pow(10.0, -2.0 + 3.0 * k / 7.0));
  return times;
}

bool check_env_invariance(const BipartiteModel& model, const std::vector<DensityMatrix>& probes,
                          const std::vector<double>& times, double tol) {
  if (probes.size() < 2) throw InvalidArgumentError("check_env_invariance: need >= 2 probe states");
  for (const DensityMatrix& p : probes) {
    if (p.dim() != model.system_dim()) {
      throw DimensionError("check_env_invariance: probe dimension differs from the system");
    }
  }
  const std::size_t d_s = model.system_dim();
  const std::size_t d_e = model.env_dim();
  for (double t : times) {
    require_nonnegative_dt(t, "check_env_invariance");
    CMatrix reference;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const CMatrix evolved =
          model.propagate(t, tensor(probes[k].matrix(), model.sigma0().matrix()));
      CMatrix env = partial_trace(evolved, d_s, d_e, 1);
      if (k == 0) {
        reference = std::move(env);
      } else if (max_abs(env - reference) > tol) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace bif

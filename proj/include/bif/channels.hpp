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

// Two-time propagator models: Pauli-mixture noise ensembles, finite
// bipartite unitary / Lindblad models, the commuting-Hamiltonian mixture and
// the environment-invariance probe.

#pragma once

#include "bif/linalg.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <vector>

namespace bif {

/// Completely positive two-time map E_{t_to, t_from} acting on (possibly
/// unnormalized) operators of a fixed dimension.
class TwoTimePropagator {
 public:
  virtual ~TwoTimePropagator() = default;
  virtual std::size_t dim() const = 0;
  virtual CMatrix apply(double t_from, double t_to, const CMatrix& rho) const = 0;
};

/// Time-homogeneous family, E_{t2,t1} = E_{t2 - t1}.
class HomogeneousPropagator : public TwoTimePropagator {
 public:
  CMatrix apply(double t_from, double t_to, const CMatrix& rho) const final {
    return propagate(t_to - t_from, rho);
  }
  /// Throws InvalidArgumentError on negative dt.
  virtual CMatrix propagate(double dt, const CMatrix& rho) const = 0;
};

/// Memoizes dt -> matrix. Concurrent readers share a lock; concurrent inserts
/// of the same key are idempotent.
class PropagatorCache {
 public:
  template <class Make>
  CMatrix get(double dt, Make&& make) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = entries_.find(dt); it != entries_.end()) return it->second;
    }
    CMatrix value = make();
    std::unique_lock lock(mutex_);
    if (entries_.size() >= kMaxEntries) entries_.clear();
    return entries_.try_emplace(dt, std::move(value)).first->second;
  }

 private:
  static constexpr std::size_t kMaxEntries = 4096;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, CMatrix> entries_;
};

enum class PauliAxis { X, Y, Z };

CMatrix pauli_matrix(PauliAxis axis);

/// Markovian Pauli channel exp[gamma dt L_alpha], L_alpha = sigma . sigma - .
struct PauliChannel {
  PauliAxis axis = PauliAxis::Z;
  double rate = 0.0;
};

/// h+ rho + h- sigma_a rho sigma_a with h(+-) = (1 +- exp(-2 rate dt)) / 2.
DensityMatrix pauli_propagate(const PauliChannel& ch, double dt, const DensityMatrix& rho);
CMatrix pauli_propagate(const PauliChannel& ch, double dt, const CMatrix& rho);

class PauliPropagator final : public HomogeneousPropagator {
 public:
  explicit PauliPropagator(PauliChannel ch);
  std::size_t dim() const override { return 2; }
  CMatrix propagate(double dt, const CMatrix& rho) const override;
  const PauliChannel& channel() const { return ch_; }

 private:
  PauliChannel ch_;
};

/// rho -> U rho U^dag with U = exp(-i dt H).
class UnitaryPropagator final : public HomogeneousPropagator {
 public:
  explicit UnitaryPropagator(CMatrix hamiltonian);
  std::size_t dim() const override { return static_cast<std::size_t>(h_.rows()); }
  CMatrix propagate(double dt, const CMatrix& rho) const override;
  CMatrix unitary(double dt) const;
  const CMatrix& hamiltonian() const { return h_; }

 private:
  CMatrix h_;
  std::shared_ptr<PropagatorCache> cache_ = std::make_shared<PropagatorCache>();
};

/// Column-stacking Lindblad superoperator for H and jump operators L_k:
///   -i[H, .] + sum_k (L_k . L_k^dag - {L_k^dag L_k, .} / 2).
CMatrix lindblad_generator(const CMatrix& hamiltonian, const std::vector<CMatrix>& jumps);

/// True when vec(I) is a left fixed point of the generator.
bool is_trace_preserving_generator(const CMatrix& generator, double tol = 1e-10);

/// Semigroup exp(dt L) on vectorized operators.
class LindbladPropagator final : public HomogeneousPropagator {
 public:
  /// Throws InvalidArgumentError when L is not square of size d^2 or is not
  /// trace preserving.
  explicit LindbladPropagator(CMatrix generator);
  std::size_t dim() const override { return dim_; }
  CMatrix propagate(double dt, const CMatrix& rho) const override;
  CMatrix superoperator(double dt) const;
  const CMatrix& generator() const { return generator_; }

 private:
  CMatrix generator_;
  std::size_t dim_;
  std::shared_ptr<PropagatorCache> cache_ = std::make_shared<PropagatorCache>();
};

/// Weighted finite family of two-time system propagators.
class NoiseEnsemble {
 public:
  /// Weights must be >= 0 and sum to 1 within 1e-12; all channels share one
  /// dimension. Throws InvalidArgumentError.
  NoiseEnsemble(std::vector<double> weights,
                std::vector<std::shared_ptr<const TwoTimePropagator>> channels);

  /// Mixture of Pauli channels with a common rate (weights in x, y, z order).
  static NoiseEnsemble pauli_mixture(double rate, const std::array<double, 3>& weights);

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return channels_.front()->dim(); }
  double weight(std::size_t a) const { return weights_[a]; }
  const TwoTimePropagator& channel(std::size_t a) const { return *channels_[a]; }
  const std::vector<double>& weights() const { return weights_; }

  /// Averaged system state sum_a q_a E^a_{t_to,t_from}[rho].
  CMatrix average(double t_from, double t_to, const CMatrix& rho) const;

 private:
  std::vector<double> weights_;
  std::vector<std::shared_ptr<const TwoTimePropagator>> channels_;
};

/// Bipartite system (x) environment model with a separable initial
/// environment state sigma0.
class BipartiteModel {
 public:
  enum class Kind { Unitary, Lindblad };

  static constexpr std::size_t kMaxUnitaryDim = 64;
  static constexpr std::size_t kMaxLindbladDim = 16;

  /// H_T = H_s (x) I + I (x) H_e + H_I.
  static BipartiteModel unitary(CMatrix h_s, CMatrix h_e, CMatrix h_i, DensityMatrix sigma0);
  /// Generator acting on column-stacked (d_s d_e)^2 vectors.
  static BipartiteModel lindblad(CMatrix generator, std::size_t d_s, DensityMatrix sigma0);

  Kind kind() const { return kind_; }
  std::size_t system_dim() const { return d_s_; }
  std::size_t env_dim() const { return d_e_; }
  std::size_t total_dim() const { return d_s_ * d_e_; }
  const DensityMatrix& sigma0() const { return sigma0_; }

  const CMatrix& h_s() const { return h_s_; }
  const CMatrix& h_e() const { return h_e_; }
  const CMatrix& h_i() const { return h_i_; }
  /// Total Hamiltonian (Unitary kind only).
  CMatrix total_hamiltonian() const;
  const CMatrix& generator() const { return generator_; }

  /// E_dt applied to an arbitrary bipartite operator, no validation.
  CMatrix propagate(double dt, const CMatrix& rho_se) const;

 private:
  Kind kind_ = Kind::Unitary;
  std::size_t d_s_ = 0;
  std::size_t d_e_ = 0;
  CMatrix h_s_, h_e_, h_i_;
  CMatrix generator_;
  DensityMatrix sigma0_{CMatrix::Identity(1, 1)};
  std::shared_ptr<const HomogeneousPropagator> propagator_;
};

/// Incoherent environment with a system Hamiltonian conditioned on the
/// environment basis state: H = sum_e H_s^(e) (x) |e><e| and jumps
/// sqrt(rates(e', e)) I (x) |e'><e| for e != e'. sigma0 must be diagonal
/// for the environment dynamics to be independent of the system.
BipartiteModel classical_rate_model(const std::vector<CMatrix>& conditioned_hamiltonians,
                                    const Eigen::MatrixXd& rates, DensityMatrix sigma0);

/// E_dt[rho_se] with validation of the result. Throws DimensionError,
/// InvalidArgumentError (dt < 0) or InvalidGeneratorError (an eigenvalue
/// below -1e-8).
DensityMatrix bipartite_propagate(const BipartiteModel& model, double dt,
                                  const DensityMatrix& rho_se);

/// ||[I (x) H_e, H_I]||_max <= tol.
bool check_commuting(const CMatrix& h_e, const CMatrix& h_i, std::size_t d_s, std::size_t d_e,
                     double tol = 1e-10);

/// Random-unitary representation of a commuting unitary model.
struct CommutingMixtureModel {
  std::vector<double> weights;                 // w_e = <e|sigma0|e>
  std::vector<CMatrix> effective_hamiltonians;  // H_s + <e|H_I|e>
  CMatrix env_basis;                           // columns |e>

  NoiseEnsemble to_noise_ensemble() const;
  /// sum_e w_e G^e_t[rho].
  CMatrix propagate(double t, const CMatrix& rho) const;
};

/// Throws InvalidArgumentError for Lindblad models, non-commuting input or a
/// degenerate H_e block in which the environment components of H_I cannot be
/// diagonalized together.
CommutingMixtureModel commuting_decomposition(const BipartiteModel& model);

/// Six Bloch axis states for a qubit; otherwise basis states plus
/// (|j> + |k>)/sqrt2 and (|j> + i|k>)/sqrt2 for j < k. Either set spans the
/// operator space.
std::vector<DensityMatrix> default_probe_states(std::size_t d_s);
/// Eight logarithmically spaced times from 1e-2 to 10.
std::vector<double> default_probe_times();

/// True iff Tr_s E_t[rho (x) sigma0] agrees across the probe states at every
/// time within tol. Requires at least two probe states.
bool check_env_invariance(const BipartiteModel& model, const std::vector<DensityMatrix>& probes,
                          const std::vector<double>& times, double tol);

}  // namespace bif

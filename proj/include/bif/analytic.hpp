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

// Closed-form and semi-analytic reference models:
//
//  * eternal non-Markovianity: a qubit driven by a classical mixture of Pauli
//    dephasing channels, measured along x - n - x;
//  * dissipative decay in a bosonic bath, through the decay amplitude G(t)
//    (a Volterra integro-differential equation) and the two-time amplitude
//    G(t, tau);
//  * pure dephasing in a bosonic bath with ohmic decoherence functions.

#pragma once

#include "bif/linalg.hpp"
#include "bif/protocol.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace bif {

enum class CpfScheme { Deterministic, Random };

// --------------------------------------------------------------------------
// Eternal non-Markovianity

struct EternalParams {
  double gamma = 1.0;
  std::array<double, 3> q{0.5, 0.5, 0.0};  // weights of the x, y, z channels
  double theta = 1.5707963267948966;       // intermediate direction in the x-z plane

  /// Throws InvalidArgumentError.
  void validate() const;
};

/// c(t) = q_x + (q_y + q_z) exp(-2 gamma t).
double eternal_c(double t, const EternalParams& p);

/// Deterministic-scheme CPF for outcome y~ = y_update (+1 or -1):
///   sin^2(theta) (1 - <x>^2) / (4 P(y~)^2) [c(t + tau) - c(t) c(tau)],
///   P(y~) = (1 + y~ <x> sin(theta) c(t)) / 2.
double eternal_cpf_det(double t, double tau, const EternalParams& p, double mean_x,
                       int y_update = 1);

/// The random-scheme CPF vanishes identically for a noise ensemble.
constexpr double eternal_cpf_rand() { return 0.0; }

/// Closed-form P(z, y~, x) for the deterministic scheme; index 0 is outcome +1.
JointTable3 eternal_table_det(double t, double tau, const EternalParams& p,
                              const std::array<double, 2>& p_x);

/// Closed-form P(z, y~, x) for the random scheme with renewed states |n+-><n+-|
/// and update probabilities update[y~][x].
JointTable3 eternal_table_rand(double t, double tau, const EternalParams& p,
                               const std::array<double, 2>& p_x,
                               const std::array<std::array<double, 2>, 2>& update);

// --------------------------------------------------------------------------
// Dissipative decay

using MemoryKernel = std::function<Complex(double)>;

/// f(t) = (gamma / (2 tau_c)) exp(-|t| / tau_c).
MemoryKernel lorentzian_kernel(double gamma, double tau_c);

struct DissipativeParams {
  double gamma = 1.0;
  double tau_c = 5.0;
  double grid_step = 1e-3;
  double t_max = 10.0;

  void validate() const;
};

/// Function sampled on the uniform grid k * step, k = 0..size-1.
struct SampledFunction {
  double step = 0.0;
  std::vector<Complex> values;

  double t_max() const { return step * static_cast<double>(values.size() - 1); }
  /// Linear interpolation; throws InvalidArgumentError outside [0, t_max].
  Complex at(double t) const;
};

/// Solves dG/dt = -int_0^t f(t - s) G(s) ds, G(0) = 1, with the implicit
/// trapezoidal rule for both the derivative and the memory integral
/// (second order in the step). Cost is quadratic in the number of steps.
SampledFunction solve_volterra(const MemoryKernel& kernel, double step, double t_max);

/// Decay amplitude G(t) for the Lorentzian kernel.
SampledFunction volterra_G(const DissipativeParams& p);

enum class DissipativeDirections { ZZZ, XZX };

/// Holds G(t) and the kernel table on one grid; evaluates
/// G(t, tau) = int_0^t dt' int_0^tau dtau' f(t' + tau') G(t - t') G(tau - tau')
/// by the product trapezoidal rule on the same grid.
class DissipativeModel {
 public:
  explicit DissipativeModel(DissipativeParams p);
  DissipativeModel(DissipativeParams p, MemoryKernel kernel);

  const DissipativeParams& params() const { return p_; }
  const SampledFunction& G() const { return g_; }

  /// Bilinear interpolation between grid nodes off the grid; throws
  /// InvalidArgumentError when t or tau is negative or exceeds t_max.
  Complex G_double(double t, double tau) const;

  /// CPF at y~ = -1: random |G(t,tau)|^2 (ZZZ) or -Re G(t,tau) (XZX);
  /// deterministic = [1 - |G(t)|^2 / 2]^-2 times the random value.
  double cpf(double t, double tau, DissipativeDirections dirs, CpfScheme scheme) const;
  /// Same, with G(t, tau) already evaluated.
  double cpf_from(Complex g_t_tau, double t, DissipativeDirections dirs, CpfScheme scheme) const;

 private:
  Complex G_double_nodes(std::size_t nt, std::size_t ntau) const;

  DissipativeParams p_;
  SampledFunction g_;
  std::vector<Complex> kernel_;  // f(k h), k = 0..2N
};

Complex G_double(const DissipativeParams& p, double t, double tau);
double dissipative_cpf(const DissipativeParams& p, double t, double tau,
                       DissipativeDirections dirs, CpfScheme scheme);

// --------------------------------------------------------------------------
// Dephasing

/// Decoherence magnitude gamma_t and phase phi_t.
class DecoherenceFunctions {
 public:
  virtual ~DecoherenceFunctions() = default;
  virtual double gamma(double t) const = 0;
  virtual double phi(double t) const = 0;
};

/// J(w) = lam w exp(-w / w_c): gamma_t = (lam/2) ln(1 + (w_c t)^2),
/// phi_t = lam arctan(w_c t).
class OhmicDecoherence final : public DecoherenceFunctions {
 public:
  OhmicDecoherence(double omega_c, double lam);
  double gamma(double t) const override;
  double phi(double t) const override;

 private:
  double omega_c_, lam_;
};

/// Discrete modes: gamma_t = 4 sum |g_k|^2 / w_k^2 (1 - cos w_k t),
/// phi_t = 4 sum |g_k|^2 / w_k^2 sin w_k t.
class ModeSumDecoherence final : public DecoherenceFunctions {
 public:
  struct Mode {
    Complex coupling;
    double omega;
  };
  explicit ModeSumDecoherence(std::vector<Mode> modes);
  double gamma(double t) const override;
  double phi(double t) const override;

 private:
  std::vector<Mode> modes_;
};

struct DephasingParams {
  double omega_c = 1.0;
  double lam = 1.0;
  double theta = 0.0;  // first-measurement direction

  void validate() const;
};

/// (gamma_t, phi_t) for the ohmic spectral density.
std::pair<double, double> dephasing_functions(const DephasingParams& p, double t);

/// Random: y~ cos(theta) exp(-gamma_tau) sin(Phi), Phi = phi_t + phi_tau - phi_{t+tau}.
/// Deterministic: sin(theta) exp(-(gamma_t + gamma_tau)) sinh(Gamma) + random,
/// Gamma = gamma_t + gamma_tau - gamma_{t+tau}.
double dephasing_cpf(const DecoherenceFunctions& fns, double theta, double t, double tau,
                     int y_update, CpfScheme scheme);
double dephasing_cpf(const DephasingParams& p, double t, double tau, int y_update,
                     CpfScheme scheme);

}  // namespace bif

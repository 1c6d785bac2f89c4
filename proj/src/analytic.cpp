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

#include "bif/analytic.hpp"

#include "bif/error.hpp"

#include <cmath>
#include <numbers>

namespace bif {

namespace {

void require_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidArgumentError(std::string(who) + ": times must be finite and >= 0");
  }
}

void require_sign(int y_update, const char* who) {
  if (y_update != 1 && y_update != -1) {
    throw InvalidArgumentError(std::string(who) + ": y_update must be +1 or -1");
  }
}

constexpr std::array<double, 2> kSigns{1.0, -1.0};

JointTable3 pm_table(UpdatePolicy::Kind kind) {
  JointTable3 t(2, 2, 2);
  t.policy = kind;
  t.z_labels = t.x_labels = {"+1", "-1"};
  t.ytilde_labels = kind == UpdatePolicy::Kind::Deterministic
                        ? std::vector<std::string>{"+1", "-1"}
                        : std::vector<std::string>{"r0", "r1"};
  return t;
}

// Grid index of t when t sits on a node (within round-off).
bool on_grid(double t, double h, std::size_t& index) {
  const double k = t / h;
  const double r = std::round(k);
  if (std::abs(k - r) <= 1e-9 * std::max(1.0, k)) {
    index = static_cast<std::size_t>(r);
    return true;
  }
  return false;
}

}  // namespace

void EternalParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgumentError("EternalParams: gamma must be finite and >= 0");
  }
  double s = 0.0;
  for (double w : q) {
    if (!(w >= 0.0)) throw InvalidArgumentError("EternalParams: weights must be >= 0");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidArgumentError("EternalParams: weights must sum to 1");
  if (!std::isfinite(theta)) throw InvalidArgumentError("EternalParams: theta must be finite");
}

double eternal_c(double t, const EternalParams& p) {
  require_time(t, "eternal_c");
  return p.q[0] + (p.q[1] + p.q[2]) * std::exp(-2.0 * p.gamma * t);
}

double eternal_cpf_det(double t, double tau, const EternalParams& p, double mean_x,
                       int y_update) {
  require_sign(y_update, "eternal_cpf_det");
  if (!(std::abs(mean_x) <= 1.0)) throw InvalidArgumentError("eternal_cpf_det: |<x>| must be <= 1");
  const double s = std::sin(p.theta);
  const double p_y = 0.5 * (1.0 + y_update * mean_x * s * eternal_c(t, p));
  return s * s * (1.0 - mean_x * mean_x) / (4.0 * p_y * p_y) *
         (eternal_c(t + tau, p) - eternal_c(t, p) * eternal_c(tau, p));
}

JointTable3 eternal_table_det(double t, double tau, const EternalParams& p,
                              const std::array<double, 2>& p_x) {
  p.validate();
  const double s = std::sin(p.theta);
  const double ct = eternal_c(t, p), ctau = eternal_c(tau, p), ctt = eternal_c(t + tau, p);
  JointTable3 out = pm_table(UpdatePolicy::Kind::Deterministic);
  for (std::size_t zi = 0; zi < 2; ++zi) {
    for (std::size_t yi = 0; yi < 2; ++yi) {
      for (std::size_t xi = 0; xi < 2; ++xi) {
        const double z = kSigns[zi], y = kSigns[yi], x = kSigns[xi];
        out.at(zi, yi, xi) =
            0.25 * (1.0 + y * x * s * ct + z * y * s * ctau + z * x * s * s * ctt) * p_x[xi];
      }
    }
  }
  return out;
}

JointTable3 eternal_table_rand(double t, double tau, const EternalParams& p,
                               const std::array<double, 2>& p_x,
                               const std::array<std::array<double, 2>, 2>& update) {
  p.validate();
  require_time(t, "eternal_table_rand");
  const double s = std::sin(p.theta);
  const double ctau = eternal_c(tau, p);
  JointTable3 out = pm_table(UpdatePolicy::Kind::Random);
  for (std::size_t zi = 0; zi < 2; ++zi) {
    for (std::size_t yi = 0; yi < 2; ++yi) {
      for (std::size_t xi = 0; xi < 2; ++xi) {
        const double z = kSigns[zi], y = kSigns[yi];
        out.at(zi, yi, xi) = 0.5 * (1.0 + z * y * s * ctau) * update[yi][xi] * p_x[xi];
      }
    }
  }
  return out;
}

MemoryKernel lorentzian_kernel(double gamma, double tau_c) {
  const double amp = gamma / (2.0 * tau_c);
  return [amp, tau_c](double t) { return Complex(amp * std::exp(-std::abs(t) / tau_c), 0.0); };
}

void DissipativeParams::validate() const {
  if (!(gamma > 0.0) || !(tau_c > 0.0) || !(grid_step > 0.0) || !(t_max > 0.0) ||
      !std::isfinite(gamma) || !std::isfinite(tau_c) || !std::isfinite(t_max)) {
    throw InvalidArgumentError("DissipativeParams: gamma, tau_c, grid_step and t_max must be > 0");
  }
  if (grid_step > t_max) throw InvalidArgumentError("DissipativeParams: grid_step exceeds t_max");
}

Complex SampledFunction::at(double t) const {
  if (!(t >= 0.0) || t > t_max() * (1.0 + 1e-12)) {
    throw InvalidArgumentError("SampledFunction: argument outside the sampled range");
  }
  const double k = t / step;
  std::size_t lo = static_cast<std::size_t>(std::floor(k));
  if (lo >= values.size() - 1) return values.back();
  const double frac = k - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return (1.0 - frac) * values[lo] + frac * values[lo + 1];
}

SampledFunction solve_volterra(const MemoryKernel& kernel, double step, double t_max) {
  if (!(step > 0.0) || !(t_max >= step)) {
    throw InvalidArgumentError("solve_volterra: need 0 < step <= t_max");
  }
  const auto n = static_cast<std::size_t>(std::llround(t_max / step));
  std::vector<Complex> f(n + 1);
  for (std::size_t k = 0; k <= n; ++k) f[k] = kernel(step * static_cast<double>(k));

  SampledFunction g;
  g.step = step;
  g.values.assign(n + 1, Complex(0.0, 0.0));
  g.values[0] = 1.0;
  // memory[k] = int_0^{t_k} f(t_k - s) G(s) ds.
  Complex memory_prev = 0.0;
  const Complex denom = 1.0 + 0.25 * step * step * f[0];
  for (std::size_t k = 1; k <= n; ++k) {
    Complex partial = 0.5 * f[k] * g.values[0];
    for (std::size_t j = 1; j < k; ++j) partial += f[k - j] * g.values[j];
    partial *= step;
    const Complex gk = (g.values[k - 1] - 0.5 * step * (memory_prev + partial)) / denom;
    g.values[k] = gk;
    memory_prev = partial + 0.5 * step * f[0] * gk;
  }
  return g;
}

SampledFunction volterra_G(const DissipativeParams& p) {
  p.validate();
  return solve_volterra(lorentzian_kernel(p.gamma, p.tau_c), p.grid_step, p.t_max);
}

DissipativeModel::DissipativeModel(DissipativeParams p)
    : DissipativeModel(p, lorentzian_kernel(p.gamma, p.tau_c)) {}

DissipativeModel::DissipativeModel(DissipativeParams p, MemoryKernel kernel) : p_(p) {
  p_.validate();
  g_ = solve_volterra(kernel, p_.grid_step, p_.t_max);
  const std::size_t n = g_.values.size() - 1;
  kernel_.resize(2 * n + 1);
  for (std::size_t k = 0; k <= 2 * n; ++k) kernel_[k] = kernel(p_.grid_step * static_cast<double>(k));
}

Complex DissipativeModel::G_double_nodes(std::size_t nt, std::size_t ntau) const {
  if (nt == 0 || ntau == 0) return 0.0;
  const std::vector<Complex>& g = g_.values;
  Complex total = 0.0;
  for (std::size_t i = 0; i <= nt; ++i) {
    Complex inner = 0.0;
    for (std::size_t j = 0; j <= ntau; ++j) {
      const double wj = (j == 0 || j == ntau) ? 0.5 : 1.0;
      inner += wj * kernel_[i + j] * g[ntau - j];
    }
    const double wi = (i == 0 || i == nt) ? 0.5 : 1.0;
    total += wi * g[nt - i] * inner;
  }
  return total * (g_.step * g_.step);
}

Complex DissipativeModel::G_double(double t, double tau) const {
  const double tmax = g_.t_max();
  if (!(t >= 0.0) || !(tau >= 0.0) || t > tmax * (1.0 + 1e-12) || tau > tmax * (1.0 + 1e-12)) {
    throw InvalidArgumentError("G_double: arguments must lie in [0, t_max]");
  }
  const double h = g_.step;
  const std::size_t last = g_.values.size() - 1;
  std::size_t it = 0, jt = 0;
  const bool t_node = on_grid(t, h, it);
  const bool tau_node = on_grid(tau, h, jt);
  if (t_node && tau_node) return G_double_nodes(std::min(it, last), std::min(jt, last));

  auto bracket = [&](double v, std::size_t& lo, std::size_t& hi, double& frac) {
    const double k = v / h;
    lo = std::min(static_cast<std::size_t>(std::floor(k)), last);
    hi = std::min(lo + 1, last);
    frac = hi == lo ? 0.0 : k - static_cast<double>(lo);
  };
  std::size_t t0, t1, s0, s1;
  double ft, fs;
  bracket(t, t0, t1, ft);
  bracket(tau, s0, s1, fs);
  return (1.0 - ft) * (1.0 - fs) * G_double_nodes(t0, s0) + ft * (1.0 - fs) * G_double_nodes(t1, s0) +
         (1.0 - ft) * fs * G_double_nodes(t0, s1) + ft * fs * G_double_nodes(t1, s1);
}

double DissipativeModel::cpf(double t, double tau, DissipativeDirections dirs,
                             CpfScheme scheme) const {
  return cpf_from(G_double(t, tau), t, dirs, scheme);
}

double DissipativeModel::cpf_from(Complex gtt, double t, DissipativeDirections dirs,
                                  CpfScheme scheme) const {
  const double random =
      dirs == DissipativeDirections::ZZZ ? std::norm(gtt) : -gtt.real();
  if (scheme == CpfScheme::Random) return random;
  const double factor = 1.0 - std::norm(g_.at(t)) / 2.0;
  return random / (factor * factor);
}

Complex G_double(const DissipativeParams& p, double t, double tau) {
  return DissipativeModel(p).G_double(t, tau);
}

double dissipative_cpf(const DissipativeParams& p, double t, double tau,
                       DissipativeDirections dirs, CpfScheme scheme) {
  return DissipativeModel(p).cpf(t, tau, dirs, scheme);
}

OhmicDecoherence::OhmicDecoherence(double omega_c, double lam) : omega_c_(omega_c), lam_(lam) {
  if (!(omega_c > 0.0) || !std::isfinite(omega_c) || !std::isfinite(lam)) {
    throw InvalidArgumentError("OhmicDecoherence: omega_c must be > 0");
  }
}

double OhmicDecoherence::gamma(double t) const {
  require_time(t, "OhmicDecoherence");
  const double x = omega_c_ * t;
  return 0.5 * lam_ * std::log1p(x * x);
}

double OhmicDecoherence::phi(double t) const {
  require_time(t, "OhmicDecoherence");
  return lam_ * std::atan(omega_c_ * t);
}

ModeSumDecoherence::ModeSumDecoherence(std::vector<Mode> modes) : modes_(std::move(modes)) {
  for (const Mode& m : modes_) {
    if (!(m.omega != 0.0) || !std::isfinite(m.omega)) {
      throw InvalidArgumentError("ModeSumDecoherence: mode frequencies must be nonzero");
    }
  }
}

double ModeSumDecoherence::gamma(double t) const {
  double s = 0.0;
  for (const Mode& m : modes_) s += 4.0 * std::norm(m.coupling) / (m.omega * m.omega) * (1.0 - std::cos(m.omega * t));
  return s;
}

double ModeSumDecoherence::phi(double t) const {
  double s = 0.0;
  for (const Mode& m : modes_) s += 4.0 * std::norm(m.coupling) / (m.omega * m.omega) * std::sin(m.omega * t);
  return s;
}

void DephasingParams::validate() const {
  if (!(omega_c > 0.0) || !std::isfinite(omega_c) || !std::isfinite(lam) || !std::isfinite(theta)) {
    throw InvalidArgumentError("DephasingParams: omega_c must be > 0 and all values finite");
  }
}

std::pair<double, double> dephasing_functions(const DephasingParams& p, double t) {
  p.validate();
  const OhmicDecoherence fns(p.omega_c, p.lam);
  return {fns.gamma(t), fns.phi(t)};
}

double dephasing_cpf(const DecoherenceFunctions& fns, double theta, double t, double tau,
                     int y_update, CpfScheme scheme) {
  require_sign(y_update, "dephasing_cpf");
  require_time(t, "dephasing_cpf");
  require_time(tau, "dephasing_cpf");
  const double g_t = fns.gamma(t), g_tau = fns.gamma(tau), g_sum = fns.gamma(t + tau);
  const double phase = fns.phi(t) + fns.phi(tau) - fns.phi(t + tau);
  const double random = y_update * std::cos(theta) * std::exp(-g_tau) * std::sin(phase);
  if (scheme == CpfScheme::Random) return random;
  const double big_gamma = g_t + g_tau - g_sum;
  return std::sin(theta) * std::exp(-(g_t + g_tau)) * std::sinh(big_gamma) + random;
}

double dephasing_cpf(const DephasingParams& p, double t, double tau, int y_update,
                     CpfScheme scheme) {
  p.validate();
  return dephasing_cpf(OhmicDecoherence(p.omega_c, p.lam), p.theta, t, tau, y_update, scheme);
}

}  // namespace bif

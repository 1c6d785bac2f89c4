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

#include "bif/protocol.hpp"

#include "bif/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace bif {

namespace {

constexpr double kClampFloor = -1e-14;

std::string value_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+g", v);
  return buf;
}

std::vector<std::string> outcome_labels(const MeasurementSet& m) {
  std::vector<std::string> out;
  for (double v : m.outcome_values()) out.push_back(value_label(v));
  return out;
}

AxisLabels make_labels(const SchemeConfig& cfg, std::size_t nyt) {
  AxisLabels l;
  l.z = outcome_labels(cfg.mz);
  l.y = outcome_labels(cfg.my);
  l.x = outcome_labels(cfg.mx);
  if (cfg.policy.kind() == UpdatePolicy::Kind::Deterministic) {
    l.ytilde = l.y;
  } else {
    for (std::size_t k = 0; k < nyt; ++k) l.ytilde.push_back("r" + std::to_string(k));
  }
  return l;
}

double trace_product(const CMatrix& effect, const CMatrix& rho) {
  // Tr(E rho) without forming the product.
  return (effect.transpose().cwiseProduct(rho)).sum().real();
}

// Tr_s((E (x) I) A) for a bipartite operator A.
CMatrix system_traced_with(const CMatrix& effect, const CMatrix& a, std::size_t d_s,
                           std::size_t d_e) {
  const auto ds = static_cast<Eigen::Index>(d_s);
  const auto de = static_cast<Eigen::Index>(d_e);
  CMatrix out = CMatrix::Zero(de, de);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) {
      const Complex e = effect(i, j);
      if (e == Complex(0.0, 0.0)) continue;
      out += e * a.block(j * de, i * de, de, de);
    }
  }
  return out;
}

// Tr_se((E (x) I) A).
double bipartite_expectation(const CMatrix& effect, const CMatrix& a, std::size_t d_s,
                             std::size_t d_e) {
  return system_traced_with(effect, a, d_s, d_e).trace().real();
}

}  // namespace

void SchemeConfig::validate() const {
  if (!(t >= 0.0) || !(tau >= 0.0) || !std::isfinite(t) || !std::isfinite(tau)) {
    throw InvalidArgumentError("SchemeConfig: t and tau must be finite and >= 0");
  }
  const std::size_t d = rho0.dim();
  if (mx.dim() != d || my.dim() != d || mz.dim() != d) {
    throw DimensionError("SchemeConfig: measurement dimensions differ from the system state");
  }
  if (!my.is_projective_rank1()) {
    throw InvalidArgumentError("SchemeConfig: the intermediate measurement must be rank-1 projective");
  }
  // Resolving checks the policy against the measurement shapes.
  (void)policy.resolve(my, mx.size());
}

JointTable4::JointTable4(std::size_t nz, std::size_t nyt, std::size_t ny, std::size_t nx)
    : nz_(nz), nyt_(nyt), ny_(ny), nx_(nx), p_(nz * nyt * ny * nx, 0.0) {}

double JointTable4::sum() const {
  double s = 0.0;
  for (double v : p_) s += v;
  return s;
}

void JointTable4::finalize() {
  for (double& v : p_) {
    if (v < 0.0) {
      if (v < kClampFloor) {
        std::ostringstream os;
        os << "joint table has a negative entry " << v;
        throw Error(os.str());
      }
      max_clamp = std::max(max_clamp, -v);
      v = 0.0;
    }
  }
  if (std::abs(sum() - 1.0) > kTableSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << "joint table sums to " << sum();
    throw Error(os.str());
  }
}

JointTable3::JointTable3(std::size_t nz, std::size_t nyt, std::size_t nx)
    : nz_(nz), nyt_(nyt), nx_(nx), p_(nz * nyt * nx, 0.0) {}

double JointTable3::sum() const {
  double s = 0.0;
  for (double v : p_) s += v;
  return s;
}

JointTable4 joint_noise(const NoiseEnsemble& ensemble, const SchemeConfig& cfg) {
  cfg.validate();
  if (ensemble.dim() != cfg.rho0.dim()) {
    throw DimensionError("joint_noise: ensemble and system dimensions differ");
  }
  const UpdatePolicy::Table upd = cfg.policy.resolve(cfg.my, cfg.mx.size());
  const std::size_t nx = cfg.mx.size(), ny = cfg.my.size(), nz = cfg.mz.size();
  const std::size_t nyt = upd.num_ytilde;

  JointTable4 table(nz, nyt, ny, nx);
  table.policy = cfg.policy.kind();
  table.labels = make_labels(cfg, nyt);

  std::vector<CMatrix> after_x;
  for (std::size_t x = 0; x < nx; ++x) {
    after_x.push_back(cfg.mx.op(x) * cfg.rho0.matrix() * cfg.mx.op(x).adjoint());
  }

  std::vector<double> first(ny * nx), second(nz * nyt);
  for (std::size_t a = 0; a < ensemble.size(); ++a) {
    const double q = ensemble.weight(a);
    if (q == 0.0) continue;
    const TwoTimePropagator& ch = ensemble.channel(a);
    for (std::size_t x = 0; x < nx; ++x) {
      const CMatrix evolved = ch.apply(0.0, cfg.t, after_x[x]);
      for (std::size_t y = 0; y < ny; ++y) first[y * nx + x] = trace_product(cfg.my.effect(y), evolved);
    }
    for (std::size_t yt = 0; yt < nyt; ++yt) {
      const CMatrix evolved = ch.apply(cfg.t, cfg.t + cfg.tau, upd.states[yt]);
      for (std::size_t z = 0; z < nz; ++z) second[z * nyt + yt] = trace_product(cfg.mz.effect(z), evolved);
    }
    for (std::size_t z = 0; z < nz; ++z) {
      for (std::size_t yt = 0; yt < nyt; ++yt) {
        for (std::size_t y = 0; y < ny; ++y) {
          for (std::size_t x = 0; x < nx; ++x) {
            const double w = upd(yt, y, x);
            if (w == 0.0) continue;
            table.at(z, yt, y, x) += q * w * second[z * nyt + yt] * first[y * nx + x];
          }
        }
      }
    }
  }
  table.finalize();
  return table;
}

JointTable4 joint_bipartite(const BipartiteModel& model, const SchemeConfig& cfg) {
  cfg.validate();
  const std::size_t d_s = model.system_dim(), d_e = model.env_dim();
  if (d_s != cfg.rho0.dim()) {
    throw DimensionError("joint_bipartite: model and scheme system dimensions differ");
  }
  const UpdatePolicy::Table upd = cfg.policy.resolve(cfg.my, cfg.mx.size());
  const std::size_t nx = cfg.mx.size(), ny = cfg.my.size(), nz = cfg.mz.size();
  const std::size_t nyt = upd.num_ytilde;

  JointTable4 table(nz, nyt, ny, nx);
  table.policy = cfg.policy.kind();
  table.labels = make_labels(cfg, nyt);

  const CMatrix& sigma0 = model.sigma0().matrix();
  for (std::size_t x = 0; x < nx; ++x) {
    const CMatrix after_x = cfg.mx.op(x) * cfg.rho0.matrix() * cfg.mx.op(x).adjoint();
    const CMatrix evolved = model.propagate(cfg.t, tensor(after_x, sigma0));
    for (std::size_t y = 0; y < ny; ++y) {
      // Unnormalized conditional environment state; its trace is P(y, x).
      const CMatrix env = system_traced_with(cfg.my.effect(y), evolved, d_s, d_e);
      const double p_yx = env.trace().real();
      if (p_yx < kZeroBranchProb) continue;
      CMatrix sigma_yx = env / p_yx;
      sigma_yx = 0.5 * (sigma_yx + sigma_yx.adjoint());
      for (std::size_t yt = 0; yt < nyt; ++yt) {
        const double w = upd(yt, y, x);
        if (w == 0.0) continue;
        const CMatrix final_state = model.propagate(cfg.tau, tensor(upd.states[yt], sigma_yx));
        for (std::size_t z = 0; z < nz; ++z) {
          table.at(z, yt, y, x) =
              w * p_yx * bipartite_expectation(cfg.mz.effect(z), final_state, d_s, d_e);
        }
      }
    }
  }
  table.finalize();
  return table;
}

JointTable3 marginalize_y(const JointTable4& t4) {
  JointTable3 t3(t4.nz(), t4.nyt(), t4.nx());
  t3.policy = t4.policy;
  t3.z_labels = t4.labels.z;
  t3.ytilde_labels = t4.labels.ytilde;
  t3.x_labels = t4.labels.x;
  for (std::size_t z = 0; z < t4.nz(); ++z) {
    for (std::size_t yt = 0; yt < t4.nyt(); ++yt) {
      for (std::size_t x = 0; x < t4.nx(); ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < t4.ny(); ++y) s += t4.at(z, yt, y, x);
        t3.at(z, yt, x) = s;
      }
    }
  }
  return t3;
}

ConditionalSet conditionals(const JointTable3& t3) {
  ConditionalSet c;
  c.nz = t3.nz();
  c.nyt = t3.nyt();
  c.nx = t3.nx();
  c.p_y.assign(c.nyt, 0.0);
  c.defined.assign(c.nyt, false);
  c.p_zx_given_y.assign(c.nyt * c.nz * c.nx, 0.0);
  c.p_z_given_y.assign(c.nyt * c.nz, 0.0);
  c.p_x_given_y.assign(c.nyt * c.nx, 0.0);
  for (std::size_t yt = 0; yt < c.nyt; ++yt) {
    double py = 0.0;
    for (std::size_t z = 0; z < c.nz; ++z) {
      for (std::size_t x = 0; x < c.nx; ++x) py += t3.at(z, yt, x);
    }
    c.p_y[yt] = py;
    if (!(py > kConditioningProb)) continue;
    c.defined[yt] = true;
    for (std::size_t z = 0; z < c.nz; ++z) {
      for (std::size_t x = 0; x < c.nx; ++x) {
        const double v = t3.at(z, yt, x) / py;
        c.p_zx_given_y[(yt * c.nz + z) * c.nx + x] = v;
        c.p_z_given_y[yt * c.nz + z] += v;
        c.p_x_given_y[yt * c.nx + x] += v;
      }
    }
  }
  return c;
}

double markov_residual(const JointTable3& t3) {
  const ConditionalSet c = conditionals(t3);
  double worst = 0.0;
  for (std::size_t yt = 0; yt < c.nyt; ++yt) {
    if (!c.defined[yt]) continue;
    for (std::size_t z = 0; z < c.nz; ++z) {
      for (std::size_t x = 0; x < c.nx; ++x) {
        worst = std::max(worst, std::abs(c.zx(z, x, yt) - c.z_given(z, yt) * c.x_given(x, yt)));
      }
    }
  }
  return worst;
}

}  // namespace bif

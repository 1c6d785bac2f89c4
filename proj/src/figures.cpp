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

#include "bif/figures.hpp"

#include "bif/analytic.hpp"
#include "bif/cpf.hpp"
#include "bif/csv.hpp"
#include "bif/error.hpp"
#include "bif/parallel.hpp"
#include "bif/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bif {

namespace {

using Row = std::vector<std::string>;

const std::vector<std::string> kHeader{"t",      "tau",     "theta",     "directions",
                                       "scheme", "y_update", "cpf_value", "markov_residual"};

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> grid(const Fig1Options& opt) {
  if (opt.points < 2 || !(opt.t_max > 0.0)) {
    throw InvalidArgumentError("fig1: need at least 2 points and t_max > 0");
  }
  std::vector<double> g(opt.points);
  for (std::size_t k = 0; k < opt.points; ++k) {
    g[k] = opt.t_max * static_cast<double>(k) / static_cast<double>(opt.points - 1);
  }
  g.back() = opt.t_max;
  return g;
}

Row make_row(double t, double theta, const std::string& dirs, const std::string& scheme,
             const std::string& y_update, double cpf, double residual) {
  return {format_double(t), format_double(t),   format_double(theta), dirs,
          scheme,           y_update,           format_double(cpf),   format_double(residual)};
}

std::vector<Row> panel_a_rows(double t) {
  const double theta = std::numbers::pi / 2;
  const NoiseEnsemble ensemble = NoiseEnsemble::pauli_mixture(1.0, {0.5, 0.5, 0.0});
  const BlochDirection n{theta, 0.0};
  const MeasurementSet mn = bloch_projectors(n);
  std::vector<Row> rows;
  for (auto kind : {UpdatePolicy::Kind::Deterministic, UpdatePolicy::Kind::Random}) {
    UpdatePolicy policy = UpdatePolicy::deterministic();
    if (kind == UpdatePolicy::Kind::Random) {
      const std::vector<DensityMatrix> renewed{DensityMatrix(CMatrix(mn.op(0))),
                                               DensityMatrix(CMatrix(mn.op(1)))};
      policy = UpdatePolicy::random_uniform(renewed, 2);
    }
    SchemeConfig cfg{.rho0 = DensityMatrix(CMatrix(bloch_projectors(BlochDirection::z()).op(0))),
                     .t = t,
                     .tau = t,
                     .mx = bloch_projectors(BlochDirection::x()),
                     .my = mn,
                     .mz = bloch_projectors(BlochDirection::x()),
                     .policy = policy};
    const JointTable3 t3 = marginalize_y(joint_noise(ensemble, cfg));
    const double residual = markov_residual(t3);
    const CpfResult c = cpf_correlation(t3, {1.0, -1.0}, {1.0, -1.0});
    const std::string scheme = kind == UpdatePolicy::Kind::Random ? "random" : "deterministic";
    for (std::size_t yt = 0; yt < t3.nyt(); ++yt) {
      const auto it = c.value_per_y.find(yt);
      rows.push_back(make_row(t, theta, "x-n-x", scheme, t3.ytilde_labels[yt],
                              it == c.value_per_y.end() ? kNan : it->second, residual));
    }
  }
  return rows;
}

}  // namespace

std::string fig1_csv(char panel, const Fig1Options& opt) {
  if (panel != 'a' && panel != 'b' && panel != 'c') {
    throw InvalidArgumentError(std::string("fig1: unknown panel '") + panel + "'");
  }
  const std::vector<double> ts = grid(opt);
  std::vector<std::vector<Row>> rows(ts.size());

  if (panel == 'a') {
    parallel_for(ts.size(), [&](std::size_t i) { rows[i] = panel_a_rows(ts[i]); });
  } else if (panel == 'b') {
    // Ten G-grid steps per output step keeps every output point on a node.
    DissipativeParams p;
    p.gamma = 1.0;
    p.tau_c = 5.0;
    p.t_max = opt.t_max;
    p.grid_step = opt.t_max / static_cast<double>(opt.points - 1) / 10.0;
    const DissipativeModel model(p);
    parallel_for(ts.size(), [&](std::size_t i) {
      const Complex gtt = model.G_double(ts[i], ts[i]);
      for (auto [dirs, name] : {std::pair{DissipativeDirections::ZZZ, "z-z-z"},
                                std::pair{DissipativeDirections::XZX, "x-z-x"}}) {
        for (auto [scheme, sname] : {std::pair{CpfScheme::Deterministic, "deterministic"},
                                     std::pair{CpfScheme::Random, "random"}}) {
          rows[i].push_back(make_row(ts[i], kNan, name, sname, "-1",
                                     model.cpf_from(gtt, ts[i], dirs, scheme), kNan));
        }
      }
    });
  } else {
    const OhmicDecoherence fns(1.0, 1.0);
    const double thetas[] = {0.0, std::numbers::pi / 4, std::numbers::pi / 2};
    parallel_for(ts.size(), [&](std::size_t i) {
      for (double theta : thetas) {
        for (auto [scheme, sname] : {std::pair{CpfScheme::Deterministic, "deterministic"},
                                     std::pair{CpfScheme::Random, "random"}}) {
          for (int y : {1, -1}) {
            rows[i].push_back(make_row(ts[i], theta, "n-y-x", sname, y > 0 ? "+1" : "-1",
                                       dephasing_cpf(fns, theta, ts[i], ts[i], y, scheme), kNan));
          }
        }
      }
    });
  }

  CsvWriter csv(kHeader);
  for (const auto& block : rows) {
    for (const auto& r : block) csv.row(r);
  }
  return csv.str();
}

}  // namespace bif

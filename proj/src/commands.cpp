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

#include "bif/commands.hpp"

#include "bif/cpf.hpp"
#include "bif/csv.hpp"
#include "bif/error.hpp"
#include "bif/figures.hpp"
#include "bif/montecarlo.hpp"
#include "bif/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace bif {

namespace {

using Row = std::vector<std::string>;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* scheme_name(UpdatePolicy::Kind k) {
  return k == UpdatePolicy::Kind::Deterministic ? "deterministic" : "random";
}

std::string direction_label(const DirectionTriple& d) {
  return d[0].label() + "-" + d[1].label() + "-" + d[2].label();
}

// Outcome values serve as the observables O_z and O_x.
std::vector<double> observable(const SchemeConfig& cfg, bool last) {
  return last ? cfg.mz.outcome_values() : cfg.mx.outcome_values();
}

JointTable4 exact_table(const ModelFile& mf, const SchemeConfig& cfg) {
  return mf.kind == ModelFile::Kind::NoiseEnsemble ? joint_noise(*mf.ensemble, cfg)
                                                   : joint_bipartite(*mf.bipartite, cfg);
}

TrajectorySampler make_sampler(const ModelFile& mf, const SchemeConfig& cfg) {
  return mf.kind == ModelFile::Kind::NoiseEnsemble ? TrajectorySampler(*mf.ensemble, cfg)
                                                   : TrajectorySampler(*mf.bipartite, cfg);
}

// One evaluation unit of a scan, in output order.
struct Task {
  double t, tau, theta;
  std::size_t dirs;
  UpdatePolicy::Kind kind;
};

struct TaskResult {
  std::vector<Row> rows;
  double residual = 0.0;
  double max_abs_cpf = 0.0;
};

std::vector<Task> exact_tasks(const ModelFile& mf, bool random_only) {
  std::vector<Task> tasks;
  const std::size_t ndirs = mf.scheme.direction_list(mf.system_dim()).size();
  for (const auto& [t, tau] : mf.scheme.time_points()) {
    for (double theta : mf.scheme.theta) {
      for (std::size_t d = 0; d < ndirs; ++d) {
        if (!random_only) tasks.push_back({t, tau, theta, d, UpdatePolicy::Kind::Deterministic});
        tasks.push_back({t, tau, theta, d, UpdatePolicy::Kind::Random});
      }
    }
  }
  return tasks;
}

TaskResult run_exact_task(const ModelFile& mf, const Task& task, std::size_t task_index) {
  const std::size_t d = mf.system_dim();
  const DirectionTriple dirs = mf.scheme.direction_list(d)[task.dirs];
  const SchemeConfig cfg = mf.scheme.make(d, dirs, task.t, task.tau, task.theta, task.kind);
  const JointTable3 t3 = marginalize_y(exact_table(mf, cfg));
  const std::vector<double> o_z = observable(cfg, true), o_x = observable(cfg, false);
  const CpfResult c = cpf_correlation(t3, o_z, o_x);

  TaskResult out;
  out.residual = markov_residual(t3);
  McCpf mc;
  if (mf.mc) {
    McConfig mcc;
    mcc.n_samples = mf.mc->n_samples;
    mcc.seed = substream_seed(mf.mc->seed, task_index);
    mcc.workers = mf.mc->workers;
    mc = replica_cpf(make_sampler(mf, cfg), mcc, o_z, o_x, mf.mc->replicas);
  }
  for (std::size_t yt = 0; yt < t3.nyt(); ++yt) {
    const auto it = c.value_per_y.find(yt);
    const double v = it == c.value_per_y.end() ? kNan : it->second;
    if (std::isfinite(v)) out.max_abs_cpf = std::max(out.max_abs_cpf, std::abs(v));
    Row r{format_double(task.t), format_double(task.tau), format_double(task.theta),
          direction_label(dirs), scheme_name(task.kind), t3.ytilde_labels[yt],
          format_double(v),      format_double(out.residual)};
    if (mf.mc) {
      r.push_back(format_double(mc.value[yt]));
      r.push_back(format_double(mc.error[yt]));
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

Row analytic_row(double t, double tau, double theta, const std::string& dirs, const char* scheme,
                 const std::string& y, double v, double residual) {
  return {format_double(t), format_double(tau), format_double(theta), dirs,
          scheme,           y,                  format_double(v),     format_double(residual)};
}

std::vector<Row> analytic_rows(const ModelFile& mf, bool random_only) {
  const auto points = mf.scheme.time_points();
  std::vector<std::vector<Row>> rows(points.size());
  std::vector<UpdatePolicy::Kind> kinds{UpdatePolicy::Kind::Deterministic, UpdatePolicy::Kind::Random};
  if (random_only) kinds.erase(kinds.begin());

  if (mf.kind == ModelFile::Kind::Eternal) {
    const std::array<double, 2> p_x{0.5 * (1.0 + mf.eternal_mean_x), 0.5 * (1.0 - mf.eternal_mean_x)};
    parallel_for(points.size(), [&](std::size_t i) {
      const auto [t, tau] = points[i];
      for (double theta : mf.scheme.theta) {
        EternalParams p = mf.eternal;
        p.theta = theta;
        for (auto kind : kinds) {
          const JointTable3 t3 = kind == UpdatePolicy::Kind::Deterministic
                                     ? eternal_table_det(t, tau, p, p_x)
                                     : eternal_table_rand(t, tau, p, p_x, {{{0.5, 0.5}, {0.5, 0.5}}});
          const double residual = markov_residual(t3);
          const CpfResult c = cpf_correlation(t3, {1.0, -1.0}, {1.0, -1.0});
          for (std::size_t yt = 0; yt < 2; ++yt) {
            const auto it = c.value_per_y.find(yt);
            rows[i].push_back(analytic_row(t, tau, theta, "x-n-x", scheme_name(kind), yt == 0 ? "+1" : "-1",
                                           it == c.value_per_y.end() ? kNan : it->second, residual));
          }
        }
      }
    });
  } else if (mf.kind == ModelFile::Kind::Dissipative) {
    const DissipativeModel model(mf.dissipative);
    parallel_for(points.size(), [&](std::size_t i) {
      const auto [t, tau] = points[i];
      const Complex g = model.G_double(t, tau);
      for (auto dirs : mf.dissipative_dirs) {
        for (auto kind : kinds) {
          const CpfScheme s = kind == UpdatePolicy::Kind::Random ? CpfScheme::Random : CpfScheme::Deterministic;
          rows[i].push_back(analytic_row(t, tau, kNan, dirs == DissipativeDirections::ZZZ ? "z-z-z" : "x-z-x",
                                         scheme_name(kind), "-1", model.cpf_from(g, t, dirs, s), kNan));
        }
      }
    });
  } else {
    const OhmicDecoherence fns(mf.dephasing.omega_c, mf.dephasing.lam);
    parallel_for(points.size(), [&](std::size_t i) {
      const auto [t, tau] = points[i];
      for (double theta : mf.scheme.theta) {
        for (auto kind : kinds) {
          const CpfScheme s = kind == UpdatePolicy::Kind::Random ? CpfScheme::Random : CpfScheme::Deterministic;
          for (int y : {1, -1}) {
            rows[i].push_back(analytic_row(t, tau, theta, "n-y-x", scheme_name(kind), y > 0 ? "+1" : "-1",
                                           dephasing_cpf(fns, theta, t, tau, y, s), kNan));
          }
        }
      }
    });
  }
  std::vector<Row> flat;
  for (auto& block : rows) {
    for (auto& r : block) flat.push_back(std::move(r));
  }
  return flat;
}

std::vector<std::string> scan_header(bool with_mc) {
  std::vector<std::string> h{"t",      "tau",      "theta",     "directions",
                             "scheme", "y_update", "cpf_value", "markov_residual"};
  if (with_mc) {
    h.push_back("mc_cpf");
    h.push_back("mc_stderr");
  }
  return h;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

ScanResult scan_model(const ModelFile& mf, bool random_only) {
  ScanResult result;
  CsvWriter csv(scan_header(mf.mc.has_value()));
  if (!mf.has_exact_engine()) {
    for (const Row& r : analytic_rows(mf, random_only)) {
      csv.row(r);
      if (r[4] == "random") {
        const double v = std::stod(r[6]);
        if (std::isfinite(v)) result.max_random_cpf = std::max(result.max_random_cpf, std::abs(v));
        const double res = std::stod(r[7]);
        if (std::isfinite(res)) result.max_residual = std::max(result.max_residual, res);
      }
    }
    result.csv = csv.str();
    return result;
  }

  const std::vector<Task> tasks = exact_tasks(mf, random_only);
  std::vector<TaskResult> results(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) { results[i] = run_exact_task(mf, tasks[i], i); });
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const Row& r : results[i].rows) csv.row(r);
    if (tasks[i].kind == UpdatePolicy::Kind::Random) {
      result.max_residual = std::max(result.max_residual, results[i].residual);
      result.max_random_cpf = std::max(result.max_random_cpf, results[i].max_abs_cpf);
    }
  }
  result.csv = csv.str();
  return result;
}

std::string mc_model(const ModelFile& mf) {
  if (!mf.mc) throw InvalidArgumentError("mc: the model file has no [mc] block");
  const std::vector<Task> tasks = exact_tasks(mf, false);
  std::vector<std::vector<Row>> rows(tasks.size());
  const std::size_t d = mf.system_dim();
  // Each task runs its own sampler; parallelism lives inside estimate_joint.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& task = tasks[i];
    const DirectionTriple dirs = mf.scheme.direction_list(d)[task.dirs];
    const SchemeConfig cfg = mf.scheme.make(d, dirs, task.t, task.tau, task.theta, task.kind);
    const JointTable4 exact = exact_table(mf, cfg);
    McConfig mcc;
    mcc.n_samples = mf.mc->n_samples;
    mcc.seed = substream_seed(mf.mc->seed, i);
    mcc.workers = mf.mc->workers;
    const McTable table = estimate_joint(make_sampler(mf, cfg), mcc);
    for (std::size_t z = 0; z < table.nz; ++z) {
      for (std::size_t yt = 0; yt < table.nyt; ++yt) {
        for (std::size_t y = 0; y < table.ny; ++y) {
          for (std::size_t x = 0; x < table.nx; ++x) {
            const std::size_t k = table.index(z, yt, y, x);
            rows[i].push_back({format_double(task.t), format_double(task.tau), format_double(task.theta),
                               direction_label(dirs), scheme_name(task.kind), table.labels.z[z],
                               table.labels.ytilde[yt], table.labels.y[y], table.labels.x[x],
                               format_double(exact.at(z, yt, y, x)), format_double(table.frequency(k)),
                               format_double(table.stderr_of(k)), std::to_string(table.counts[k])});
          }
        }
      }
    }
  }
  CsvWriter csv({"t", "tau", "theta", "directions", "scheme", "z", "y_update", "y", "x", "exact",
                 "frequency", "stderr", "count"});
  for (const auto& block : rows) {
    for (const auto& r : block) csv.row(r);
  }
  return csv.str();
}

int cmd_fig1(const std::string& panel, const std::string& out_path, std::ostream& err) {
  return guarded(err, [&] {
    if (panel.size() != 1) throw InvalidArgumentError("fig1: panel must be a, b or c");
    write_file_atomic(out_path, fig1_csv(panel[0]));
    return 0;
  });
}

int cmd_check_bif(const std::string& model_path, const std::string& out_path, double threshold,
                  std::ostream& err) {
  return guarded(err, [&] {
    if (!(threshold >= 0.0)) throw InvalidArgumentError("check-bif: threshold must be >= 0");
    const ModelFile mf = load_model_file(model_path);
    if (!mf.has_exact_engine()) {
      throw InvalidArgumentError("check-bif: needs a noise_ensemble or bipartite model");
    }
    ModelFile plain = mf;
    plain.mc.reset();
    const ScanResult r = scan_model(plain, true);
    write_file_atomic(out_path, r.csv);
    return r.max_residual > threshold ? 1 : 0;
  });
}

int cmd_scan(const std::string& model_path, const std::string& out_path, std::ostream& err) {
  return guarded(err, [&] {
    write_file_atomic(out_path, scan_model(load_model_file(model_path)).csv);
    return 0;
  });
}

int cmd_mc(const std::string& model_path, const std::string& out_path, std::ostream& err) {
  return guarded(err, [&] {
    write_file_atomic(out_path, mc_model(load_model_file(model_path)));
    return 0;
  });
}

}  // namespace bif

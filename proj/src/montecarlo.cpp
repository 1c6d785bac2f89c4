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

#include "bif/montecarlo.hpp"

#include "bif/cpf.hpp"
#include "bif/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace bif {

namespace {

double trace_product(const CMatrix& effect, const CMatrix& rho) {
  return (effect.transpose().cwiseProduct(rho)).sum().real();
}

// Tr_s((E (x) I) A).
CMatrix system_traced_with(const CMatrix& effect, const CMatrix& a, std::size_t d_s,
                           std::size_t d_e) {
  const auto ds = static_cast<Eigen::Index>(d_s);
  const auto de = static_cast<Eigen::Index>(d_e);
  CMatrix out = CMatrix::Zero(de, de);
  for (Eigen::Index i = 0; i < ds; ++i) {
    for (Eigen::Index j = 0; j < ds; ++j) out += effect(i, j) * a.block(j * de, i * de, de, de);
  }
  return out;
}

std::vector<std::string> value_labels(const MeasurementSet& m) {
  std::vector<std::string> out;
  for (double v : m.outcome_values()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+g", v);
    out.push_back(buf);
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

TrajectorySampler::Cdf TrajectorySampler::make_cdf(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  if (!(total > kZeroBranchProb)) return {};
  Cdf cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += std::max(weights[i], 0.0) / total;
    cdf[i] = acc;
  }
  // The last reachable outcome closes the distribution exactly.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) {
      for (std::size_t k = i; k < cdf.size(); ++k) cdf[k] = 1.0;
      break;
    }
  }
  return cdf;
}

std::size_t TrajectorySampler::draw(const Cdf& cdf, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  // First index with cdf > u; zero-weight outcomes have cdf equal to their
  // predecessor and are never selected.
  return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

void TrajectorySampler::init_shape(const SchemeConfig& cfg, const UpdatePolicy::Table& upd) {
  nx_ = cfg.mx.size();
  ny_ = cfg.my.size();
  nz_ = cfg.mz.size();
  nyt_ = upd.num_ytilde;
  policy_ = cfg.policy.kind();
  labels_.z = value_labels(cfg.mz);
  labels_.y = value_labels(cfg.my);
  labels_.x = value_labels(cfg.mx);
  if (policy_ == UpdatePolicy::Kind::Deterministic) {
    labels_.ytilde = labels_.y;
  } else {
    for (std::size_t k = 0; k < nyt_; ++k) labels_.ytilde.push_back("r" + std::to_string(k));
  }
  std::vector<double> px(nx_);
  for (std::size_t x = 0; x < nx_; ++x) px[x] = trace_product(cfg.mx.effect(x), cfg.rho0.matrix());
  x_ = make_cdf(px);
  yt_.resize(ny_ * nx_);
  for (std::size_t y = 0; y < ny_; ++y) {
    for (std::size_t x = 0; x < nx_; ++x) {
      std::vector<double> w(nyt_);
      for (std::size_t yt = 0; yt < nyt_; ++yt) w[yt] = upd(yt, y, x);
      yt_[y * nx_ + x] = make_cdf(w);
    }
  }
}

TrajectorySampler::TrajectorySampler(const NoiseEnsemble& ensemble, const SchemeConfig& cfg) {
  cfg.validate();
  if (ensemble.dim() != cfg.rho0.dim()) {
    throw DimensionError("TrajectorySampler: ensemble and system dimensions differ");
  }
  const UpdatePolicy::Table upd = cfg.policy.resolve(cfg.my, cfg.mx.size());
  init_shape(cfg, upd);
  nalpha_ = ensemble.size();
  alpha_ = make_cdf(ensemble.weights());
  y_.resize(nalpha_ * nx_);
  z_.resize(nalpha_ * nyt_);
  for (std::size_t a = 0; a < nalpha_; ++a) {
    const TwoTimePropagator& ch = ensemble.channel(a);
    for (std::size_t x = 0; x < nx_; ++x) {
      const CMatrix after_x = cfg.mx.op(x) * cfg.rho0.matrix() * cfg.mx.op(x).adjoint();
      const CMatrix evolved = ch.apply(0.0, cfg.t, after_x);
      std::vector<double> w(ny_);
      for (std::size_t y = 0; y < ny_; ++y) w[y] = trace_product(cfg.my.effect(y), evolved);
      y_[a * nx_ + x] = make_cdf(w);
    }
    for (std::size_t yt = 0; yt < nyt_; ++yt) {
      const CMatrix evolved = ch.apply(cfg.t, cfg.t + cfg.tau, upd.states[yt]);
      std::vector<double> w(nz_);
      for (std::size_t z = 0; z < nz_; ++z) w[z] = trace_product(cfg.mz.effect(z), evolved);
      z_[a * nyt_ + yt] = make_cdf(w);
    }
  }
}

TrajectorySampler::TrajectorySampler(const BipartiteModel& model, const SchemeConfig& cfg) {
  cfg.validate();
  const std::size_t d_s = model.system_dim(), d_e = model.env_dim();
  if (d_s != cfg.rho0.dim()) {
    throw DimensionError("TrajectorySampler: model and scheme system dimensions differ");
  }
  const UpdatePolicy::Table upd = cfg.policy.resolve(cfg.my, cfg.mx.size());
  init_shape(cfg, upd);
  bipartite_ = true;
  nalpha_ = 1;
  alpha_ = {1.0};
  y_.resize(nx_);
  z_.resize(nyt_ * ny_ * nx_);
  const CMatrix& sigma0 = model.sigma0().matrix();
  for (std::size_t x = 0; x < nx_; ++x) {
    const CMatrix after_x = cfg.mx.op(x) * cfg.rho0.matrix() * cfg.mx.op(x).adjoint();
    const double p_x = after_x.trace().real();
    if (!(p_x > kZeroBranchProb)) continue;
    const CMatrix evolved = model.propagate(cfg.t, tensor(after_x / p_x, sigma0));
    std::vector<double> w(ny_);
    for (std::size_t y = 0; y < ny_; ++y) {
      const CMatrix env = system_traced_with(cfg.my.effect(y), evolved, d_s, d_e);
      const double p_y = env.trace().real();
      w[y] = p_y;
      if (!(p_y > kZeroBranchProb)) continue;
      CMatrix sigma_yx = env / p_y;
      sigma_yx = 0.5 * (sigma_yx + sigma_yx.adjoint());
      for (std::size_t yt = 0; yt < nyt_; ++yt) {
        if (upd(yt, y, x) == 0.0) continue;
        const CMatrix final_state = model.propagate(cfg.tau, tensor(upd.states[yt], sigma_yx));
        std::vector<double> wz(nz_);
        for (std::size_t z = 0; z < nz_; ++z) {
          wz[z] = system_traced_with(cfg.mz.effect(z), final_state, d_s, d_e).trace().real();
        }
        z_[(yt * ny_ + y) * nx_ + x] = make_cdf(wz);
      }
    }
    y_[x] = make_cdf(w);
  }
}

Trajectory TrajectorySampler::sample(std::mt19937_64& rng) const {
  Trajectory tr;
  const std::size_t a = nalpha_ > 1 ? draw(alpha_, rng) : 0;
  tr.x = draw(x_, rng);
  tr.y = draw(y_[a * nx_ + tr.x], rng);
  tr.ytilde = draw(yt_[tr.y * nx_ + tr.x], rng);
  tr.z = bipartite_ ? draw(z_[(tr.ytilde * ny_ + tr.y) * nx_ + tr.x], rng)
                    : draw(z_[a * nyt_ + tr.ytilde], rng);
  return tr;
}

void McConfig::validate() const {
  if (n_samples == 0) throw InvalidArgumentError("McConfig: n_samples must be >= 1");
  if (chunk_size == 0) throw InvalidArgumentError("McConfig: chunk_size must be >= 1");
}

double McTable::frequency(std::size_t i) const {
  return n == 0 ? 0.0 : static_cast<double>(counts[i]) / static_cast<double>(n);
}

double McTable::stderr_of(std::size_t i) const {
  const double f = frequency(i);
  return std::sqrt(f * (1.0 - f) / static_cast<double>(n));
}

JointTable3 McTable::frequencies3() const {
  JointTable3 t3(nz, nyt, nx);
  t3.policy = policy;
  t3.z_labels = labels.z;
  t3.ytilde_labels = labels.ytilde;
  t3.x_labels = labels.x;
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t yt = 0; yt < nyt; ++yt) {
      for (std::size_t x = 0; x < nx; ++x) {
        std::uint64_t c = 0;
        for (std::size_t y = 0; y < ny; ++y) c += counts[index(z, yt, y, x)];
        t3.at(z, yt, x) = static_cast<double>(c) / static_cast<double>(n);
      }
    }
  }
  return t3;
}

McTable estimate_joint(const TrajectorySampler& sampler, const McConfig& cfg) {
  cfg.validate();
  McTable table;
  table.nz = sampler.nz();
  table.nyt = sampler.nyt();
  table.ny = sampler.ny();
  table.nx = sampler.nx();
  table.policy = sampler.policy();
  table.labels = sampler.labels();
  const std::size_t cells = table.nz * table.nyt * table.ny * table.nx;

  const std::uint64_t n_chunks = (cfg.n_samples + cfg.chunk_size - 1) / cfg.chunk_size;
  std::vector<std::vector<std::uint64_t>> chunk_counts(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t k = next++; k < n_chunks; k = next++) {
      std::vector<std::uint64_t> local(cells, 0);
      std::mt19937_64 rng(substream_seed(cfg.seed, k));
      const std::uint64_t begin = k * cfg.chunk_size;
      const std::uint64_t end = std::min(cfg.n_samples, begin + cfg.chunk_size);
      for (std::uint64_t s = begin; s < end; ++s) {
        const Trajectory tr = sampler.sample(rng);
        ++local[table.index(tr.z, tr.ytilde, tr.y, tr.x)];
      }
      chunk_counts[k] = std::move(local);
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, cfg.workers), n_chunks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  table.counts.assign(cells, 0);
  for (const auto& local : chunk_counts) {
    for (std::size_t i = 0; i < cells; ++i) table.counts[i] += local[i];
  }
  table.n = cfg.n_samples;
  return table;
}

McTable estimate_joint(const NoiseEnsemble& ensemble, const SchemeConfig& scheme,
                       const McConfig& cfg) {
  return estimate_joint(TrajectorySampler(ensemble, scheme), cfg);
}

McTable estimate_joint(const BipartiteModel& model, const SchemeConfig& scheme,
                       const McConfig& cfg) {
  return estimate_joint(TrajectorySampler(model, scheme), cfg);
}

McCpf replica_cpf(const TrajectorySampler& sampler, const McConfig& cfg,
                  const std::vector<double>& o_z, const std::vector<double>& o_x,
                  std::size_t replicas) {
  cfg.validate();
  if (replicas < 2) throw InvalidArgumentError("replica_cpf: need at least 2 replicas");
  if (cfg.n_samples < replicas) throw InvalidArgumentError("replica_cpf: fewer samples than replicas");
  const std::size_t nyt = sampler.nyt();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  McTable pooled;
  std::vector<std::vector<double>> per_replica(nyt);
  for (std::size_t r = 0; r < replicas; ++r) {
    McConfig sub = cfg;
    sub.seed = substream_seed(cfg.seed, r);
    sub.n_samples = cfg.n_samples / replicas + (r < cfg.n_samples % replicas ? 1 : 0);
    McTable t = estimate_joint(sampler, sub);
    const CpfResult c = cpf_correlation(t.frequencies3(), o_z, o_x);
    for (const auto& [yt, v] : c.value_per_y) per_replica[yt].push_back(v);
    if (r == 0) {
      pooled = std::move(t);
    } else {
      for (std::size_t i = 0; i < pooled.counts.size(); ++i) pooled.counts[i] += t.counts[i];
      pooled.n += t.n;
    }
  }

  McCpf out;
  out.value.assign(nyt, nan);
  out.error.assign(nyt, nan);
  const CpfResult c = cpf_correlation(pooled.frequencies3(), o_z, o_x);
  for (const auto& [yt, v] : c.value_per_y) out.value[yt] = v;
  for (std::size_t yt = 0; yt < nyt; ++yt) {
    const auto& vals = per_replica[yt];
    if (vals.size() < 2) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(vals.size() - 1);
    out.error[yt] = std::sqrt(var / static_cast<double>(vals.size()));
  }
  return out;
}

}  // namespace bif

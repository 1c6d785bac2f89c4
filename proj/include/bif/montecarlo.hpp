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

// Outcome-by-outcome sampling of the three-measurement scheme.
//
// Samples are split into fixed-size chunks; chunk k draws from an
// mt19937_64 seeded with mix(seed, k) (splitmix64 finalizer), so the merged
// counts depend only on the seed and the chunk size, never on the number of
// worker threads.

#pragma once

#include "bif/channels.hpp"
#include "bif/protocol.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace bif {

/// Substream seed for (seed, stream).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) from 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Trajectory {
  std::size_t x = 0, y = 0, ytilde = 0, z = 0;
};

/// Exact branch tree of one model + scheme, sampled by sequential Born-rule
/// draws. Branches of zero probability are never drawn.
class TrajectorySampler {
 public:
  /// Draws a = q first, then x, y | (x, a), y~ | (y, x), z | (y~, a).
  TrajectorySampler(const NoiseEnsemble& ensemble, const SchemeConfig& cfg);
  /// Keeps the exact conditional environment state for every (y, x) branch.
  TrajectorySampler(const BipartiteModel& model, const SchemeConfig& cfg);

  Trajectory sample(std::mt19937_64& rng) const;

  std::size_t nz() const { return nz_; }
  std::size_t nyt() const { return nyt_; }
  std::size_t ny() const { return ny_; }
  std::size_t nx() const { return nx_; }
  UpdatePolicy::Kind policy() const { return policy_; }
  const AxisLabels& labels() const { return labels_; }

 private:
  // Normalized cumulative distribution; empty when the branch is unreachable.
  using Cdf = std::vector<double>;
  static Cdf make_cdf(const std::vector<double>& weights);
  static std::size_t draw(const Cdf& cdf, std::mt19937_64& rng);

  void init_shape(const SchemeConfig& cfg, const UpdatePolicy::Table& upd);

  std::size_t nz_ = 0, nyt_ = 0, ny_ = 0, nx_ = 0, nalpha_ = 1;
  UpdatePolicy::Kind policy_ = UpdatePolicy::Kind::Deterministic;
  AxisLabels labels_;
  Cdf alpha_;
  Cdf x_;
  std::vector<Cdf> y_;   // [a * nx + x]
  std::vector<Cdf> yt_;  // [y * nx + x]
  std::vector<Cdf> z_;   // noise: [a * nyt + yt]; bipartite: [(yt * ny + y) * nx + x]
  bool bipartite_ = false;
};

struct McConfig {
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t chunk_size = 1u << 16;

  /// Throws InvalidArgumentError when n_samples or chunk_size is 0.
  void validate() const;
};

/// Counts over (z, y~, y, x) in the JointTable4 index order.
struct McTable {
  std::size_t nz = 0, nyt = 0, ny = 0, nx = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
  UpdatePolicy::Kind policy = UpdatePolicy::Kind::Deterministic;
  AxisLabels labels;

  std::size_t index(std::size_t z, std::size_t yt, std::size_t y, std::size_t x) const {
    return ((z * nyt + yt) * ny + y) * nx + x;
  }
  double frequency(std::size_t i) const;
  /// Binomial standard error sqrt(f (1 - f) / n).
  double stderr_of(std::size_t i) const;
  /// Empirical P(z, y~, x).
  JointTable3 frequencies3() const;

  bool operator==(const McTable& o) const { return counts == o.counts && n == o.n; }
};

McTable estimate_joint(const TrajectorySampler& sampler, const McConfig& cfg);
McTable estimate_joint(const NoiseEnsemble& ensemble, const SchemeConfig& scheme,
                       const McConfig& cfg);
McTable estimate_joint(const BipartiteModel& model, const SchemeConfig& scheme,
                       const McConfig& cfg);

/// CPF per y~ from replicas with independent seeds: value from the pooled
/// table, standard error from the spread of the replica values.
struct McCpf {
  std::vector<double> value;   // per y~ (NaN when undefined)
  std::vector<double> error;  // standard error per y~
};

/// Splits cfg.n_samples over `replicas` runs seeded substream_seed(cfg.seed, r).
McCpf replica_cpf(const TrajectorySampler& sampler, const McConfig& cfg,
                  const std::vector<double>& o_z, const std::vector<double>& o_x,
                  std::size_t replicas = 20);

}  // namespace bif

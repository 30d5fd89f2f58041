// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/manytofew.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/tilt.hpp"

namespace brwlab {
namespace {

constexpr int kMaxOneHorizon = 12;
constexpr int kMaxTwoHorizon = 8;

void check_horizon(int n, int limit) {
  if (n < 0) raise(ErrorKind::InvalidArgument, "horizon must be >= 0");
  if (n > limit) {
    std::ostringstream msg;
    msg << "horizon " << n << " exceeds " << limit;
    raise(ErrorKind::HorizonTooLarge, msg.str());
  }
}

// All generations of one uncapped run; parent[g][i] indexes generation g-1.
struct Tree {
  std::vector<std::vector<double>> pos;
  std::vector<std::vector<std::uint32_t>> parent;
};

void grow_tree(const OffspringLaw& law, int n, RandomStream& rng, Tree& tree) {
  const int d = law.dimension;
  tree.pos.resize(n + 1);
  tree.parent.resize(n + 1);
  tree.pos[0].assign(d, 0.0);
  tree.parent[0].assign(1, 0);
  std::vector<double> step(d);
  for (int g = 1; g <= n; ++g) {
    auto& pos = tree.pos[g];
    auto& par = tree.parent[g];
    pos.clear();
    par.clear();
    const std::size_t parents = tree.parent[g - 1].size();
    for (std::size_t p = 0; p < parents; ++p) {
      const auto k = sample_count(law.count, rng);
      for (std::uint64_t c = 0; c < k; ++c) {
        sample_displacement(law, rng, step);
        for (int i = 0; i < d; ++i) pos.push_back(tree.pos[g - 1][p * d + i] + step[i]);
        par.push_back(static_cast<std::uint32_t>(p));
      }
    }
  }
}

// Ancestral path of particle i of generation n, written into `path`.
void ancestral_path(const Tree& tree, int n, std::size_t i, int d, std::vector<double>& path) {
  path.resize(static_cast<std::size_t>(n + 1) * d);
  for (int g = n; g >= 0; --g) {
    std::copy_n(tree.pos[g].begin() + i * d, d, path.begin() + g * d);
    i = tree.parent[g][i];
  }
}

void walk_steps(const OffspringLaw& law, RandomStream& rng, int steps, double* out) {
  // out[0..d) already holds the start; fills `steps` further points.
  const int d = law.dimension;
  for (int s = 1; s <= steps; ++s) {
    double* cur = out + s * d;
    sample_displacement(law, rng, std::span<double>(cur, static_cast<std::size_t>(d)));
    for (int i = 0; i < d; ++i) cur[i] += cur[i - d];
  }
}

int common_horizon(std::span<const PathFunctional> funs) {
  if (funs.empty()) raise(ErrorKind::InvalidArgument, "no functionals given");
  for (const auto& f : funs)
    if (f.horizon != funs[0].horizon)
      raise(ErrorKind::InvalidArgument, "functionals must share one horizon");
  return funs[0].horizon;
}

std::vector<EstimateCI> to_estimates(const std::vector<std::vector<RunningStats>>& parts,
                                     std::size_t k, double scale) {
  std::vector<EstimateCI> out;
  for (std::size_t j = 0; j < k; ++j) {
    RunningStats s;
    for (const auto& p : parts) s.merge(p[j]);
    out.push_back(scaled(s.to_estimate(), scale));
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------ functionals

PathFunctional PathFunctional::constant(int n, double c) {
  PathFunctional f;
  f.kind = Kind::Constant;
  f.horizon = n;
  f.value = c;
  return f;
}

PathFunctional PathFunctional::endpoint_norm_ball(int n, double rho) {
  PathFunctional f;
  f.kind = Kind::EndpointNormBall;
  f.horizon = n;
  f.value = rho;
  return f;
}

PathFunctional PathFunctional::endpoint_halfspace(int n, Eigen::VectorXd theta, double c) {
  PathFunctional f;
  f.kind = Kind::EndpointHalfspace;
  f.horizon = n;
  f.value = c;
  const double norm = theta.norm();
  if (!(norm > 0)) raise(ErrorKind::InvalidArgument, "halfspace normal must be nonzero");
  f.theta = theta / norm;
  return f;
}

PathFunctional PathFunctional::barrier_indicator(int n, BarrierFamily family, double y) {
  PathFunctional f;
  f.kind = Kind::BarrierIndicator;
  f.horizon = n;
  f.value = y;
  f.family = family;
  return f;
}

PathFunctional PathFunctional::exp_projection(int n, double u) {
  PathFunctional f;
  f.kind = Kind::ExpProjection;
  f.horizon = n;
  f.value = u;
  return f;
}

std::string PathFunctional::name() const {
  switch (kind) {
    case Kind::Constant:
      return "constant";
    case Kind::EndpointNormBall:
      return "endpoint_norm_ball";
    case Kind::EndpointHalfspace:
      return "endpoint_halfspace";
    case Kind::BarrierIndicator:
      return "barrier_indicator";
    case Kind::ExpProjection:
      return "exp_projection";
  }
  return "?";
}

double evaluate(const PathFunctional& f, std::span<const double> path, int d) {
  const int n = f.horizon;
  if (path.size() != static_cast<std::size_t>(n + 1) * d)
    raise(ErrorKind::InvalidArgument, "path length does not match the horizon");
  const double* end = path.data() + static_cast<std::size_t>(n) * d;
  switch (f.kind) {
    case PathFunctional::Kind::Constant:
      return f.value;
    case PathFunctional::Kind::EndpointNormBall: {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += end[i] * end[i];
      return r2 <= f.value * f.value ? 1.0 : 0.0;
    }
    case PathFunctional::Kind::EndpointHalfspace: {
      double dot = 0.0;
      if (f.theta.size() == 0) {
        dot = end[0];
      } else {
        if (f.theta.size() != d) raise(ErrorKind::InvalidArgument, "halfspace normal has wrong dimension");
        for (int i = 0; i < d; ++i) dot += end[i] * f.theta[i];
      }
      return dot >= f.value ? 1.0 : 0.0;
    }
    case PathFunctional::Kind::BarrierIndicator:
      for (int s = 0; s <= n; ++s) {
        const double* x = path.data() + static_cast<std::size_t>(s) * d;
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
        const double lim = barrier_eval(f.family, n, s) + f.value;
        if (lim < 0 || r2 > lim * lim) return 0.0;
      }
      return 1.0;
    case PathFunctional::Kind::ExpProjection:
      return std::exp(f.value * end[0]);
  }
  return 0.0;
}

// ------------------------------------------------------------ many-to-one

std::vector<EstimateCI> mto_lhs(const OffspringLaw& law, std::span<const PathFunctional> funs,
                                std::uint64_t replicas, std::uint64_t seed) {
  validate(law);
  const int n = common_horizon(funs);
  check_horizon(n, kMaxOneHorizon);
  const int d = law.dimension;
  auto parts = map_chunks(replicas, 2048, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<RunningStats> acc(funs.size());
    Tree tree;
    std::vector<double> path;
    std::vector<double> sums(funs.size());
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream rng({seed, r, 0});
      grow_tree(law, n, rng, tree);
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t i = 0; i < tree.parent[n].size(); ++i) {
        ancestral_path(tree, n, i, d, path);
        for (std::size_t j = 0; j < funs.size(); ++j) sums[j] += evaluate(funs[j], path, d);
      }
      for (std::size_t j = 0; j < funs.size(); ++j) acc[j].add(sums[j]);
    }
    return acc;
  });
  return to_estimates(parts, funs.size(), 1.0);
}

std::vector<EstimateCI> mto_rhs(const OffspringLaw& law, std::span<const PathFunctional> funs,
                                std::uint64_t replicas, std::uint64_t seed) {
  const double m = mean_params(law).m;
  const int n = common_horizon(funs);
  check_horizon(n, kMaxOneHorizon);
  const int d = law.dimension;
  auto parts = map_chunks(replicas, 4096, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<RunningStats> acc(funs.size());
    std::vector<double> path(static_cast<std::size_t>(n + 1) * d);
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream rng({seed, r, 1});
      std::fill_n(path.begin(), d, 0.0);
      walk_steps(law, rng, n, path.data());
      for (std::size_t j = 0; j < funs.size(); ++j) acc[j].add(evaluate(funs[j], path, d));
    }
    return acc;
  });
  return to_estimates(parts, funs.size(), std::pow(m, n));
}

EstimateCI mto_lhs(const OffspringLaw& law, const PathFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed) {
  return mto_lhs(law, std::span<const PathFunctional>(&fun, 1), replicas, seed)[0];
}

EstimateCI mto_rhs(const OffspringLaw& law, const PathFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed) {
  return mto_rhs(law, std::span<const PathFunctional>(&fun, 1), replicas, seed)[0];
}

// ------------------------------------------------------------ many-to-two

EstimateCI mtt_lhs(const OffspringLaw& law, const PairFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed) {
  validate(law);
  const int n = fun.horizon();
  if (fun.second.horizon != n) raise(ErrorKind::InvalidArgument, "pair horizons differ");
  check_horizon(n, kMaxTwoHorizon);
  const int d = law.dimension;
  auto parts = map_chunks(replicas, 2048, [&](std::uint64_t begin, std::uint64_t end) {
    RunningStats acc;
    Tree tree;
    std::vector<double> path;
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream rng({seed, r, 0});
      grow_tree(law, n, rng, tree);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < tree.parent[n].size(); ++i) {
        ancestral_path(tree, n, i, d, path);
        a += evaluate(fun.first, path, d);
        b += evaluate(fun.second, path, d);
      }
      acc.add(a * b);
    }
    return std::vector<RunningStats>{acc};
  });
  return to_estimates(parts, 1, 1.0)[0];
}

EstimateCI mtt_rhs(const OffspringLaw& law, const PairFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed, SpineMode mode) {
  const auto mp = mean_params(law);
  const int n = fun.horizon();
  if (fun.second.horizon != n) raise(ErrorKind::InvalidArgument, "pair horizons differ");
  check_horizon(n, kMaxTwoHorizon);
  if (n == 0) {
    const double v = evaluate(fun.first, std::vector<double>(law.dimension, 0.0), law.dimension) *
                     evaluate(fun.second, std::vector<double>(law.dimension, 0.0), law.dimension);
    return {v, 0.0, replicas};
  }
  const int d = law.dimension;
  const double m = mp.m;

  // Stratum 0 is the diagonal term, stratum 1 + k the split after step k.
  std::vector<double> weight(n + 1);
  weight[0] = std::pow(m, n);
  for (int k = 0; k < n; ++k) weight[1 + k] = mp.m2 * std::pow(m, 2 * n - 2 - k);
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  const std::uint64_t floor_alloc = std::min<std::uint64_t>(1000, std::max<std::uint64_t>(replicas / (4 * (n + 1)), 2));
  std::vector<std::uint64_t> alloc(n + 1);
  for (int j = 0; j <= n; ++j)
    alloc[j] = std::max(floor_alloc, static_cast<std::uint64_t>(std::llround(weight[j] / total * static_cast<double>(replicas))));

  double estimate = 0.0;
  double variance = 0.0;
  std::uint64_t used = 0;
  for (int j = 0; j <= n; ++j) {
    const int k = j - 1;
    auto parts = map_chunks(alloc[j], 4096, [&](std::uint64_t begin, std::uint64_t end) {
      RunningStats acc;
      std::vector<double> p(static_cast<std::size_t>(n + 1) * d);
      std::vector<double> q(static_cast<std::size_t>(n + 1) * d);
      for (std::uint64_t r = begin; r < end; ++r) {
        RandomStream rng({seed, r, static_cast<std::uint32_t>(2 + j)});
        std::fill_n(p.begin(), d, 0.0);
        if (j == 0) {
          walk_steps(law, rng, n, p.data());
          acc.add(evaluate(fun.first, p, d) * evaluate(fun.second, p, d));
          continue;
        }
        std::fill_n(q.begin(), d, 0.0);
        if (mode == SpineMode::Pair) {
          walk_steps(law, rng, k, p.data());
          std::copy_n(p.begin(), static_cast<std::size_t>(k + 1) * d, q.begin());
          const auto pair = sample_spine_pair(law, rng);
          for (int i = 0; i < d; ++i) {
            p[(k + 1) * d + i] = p[k * d + i] + pair.delta1[i];
            q[(k + 1) * d + i] = q[k * d + i] + pair.delta2[i];
          }
          walk_steps(law, rng, n - k - 1, p.data() + (k + 1) * d);
          walk_steps(law, rng, n - k - 1, q.data() + (k + 1) * d);
        } else {
          walk_steps(law, rng, n, p.data());
          walk_steps(law, rng, n, q.data());
        }
        acc.add(evaluate(fun.first, p, d) * evaluate(fun.second, q, d));
      }
      return acc;
    });
    const RunningStats s = merge_all(parts);
    estimate += weight[j] * s.mean();
    variance += weight[j] * weight[j] * s.variance() / static_cast<double>(s.count());
    used += alloc[j];
  }
  return {estimate, std::sqrt(variance), used};
}

double mto_constant(const OffspringLaw& law, int n) { return std::pow(mean_params(law).m, n); }

double mtt_constant(const OffspringLaw& law, int n) {
  const auto mp = mean_params(law);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::pow(mp.m, -k);
  return std::pow(mp.m, n) + mp.m2 * std::pow(mp.m, 2 * n - 2) * sum;
}

// ---------------------------------------------------------- cap count

CapCountEstimate first_moment_cap_count(const OffspringLaw& law, const LambdaSolution& sol,
                                        int t, double y, std::uint64_t replicas,
                                        std::uint64_t seed, double margin) {
  if (t < 1 || t > 400) raise(ErrorKind::InvalidArgument, "t must lie in 1..400");
  if (!(y >= 0) || y > std::sqrt(static_cast<double>(t)))
    raise(ErrorKind::InvalidArgument, "y must lie in [0, sqrt t]");
  CumulantHandle handle(law);
  if (std::isnan(margin)) margin = default_barrier_margin(handle, sol);
  const BarrierFamily family = front_barrier(sol, margin, y);
  std::vector<double> f(t + 1);
  for (int s = 0; s <= t; ++s) {
    f[s] = barrier_eval(family, t, s);
    if (f[s] < 0) raise(ErrorKind::DegenerateBarrier, "barrier f_s is negative; increase M");
  }

  const TiltedWalk walk(handle, sol.lambda);
  const int d = law.dimension;
  const double log_m = std::log(handle.mean_offspring());
  const double log_scale = t * (walk.log_normalizer() + log_m);
  auto parts = map_chunks(replicas, 1024, [&](std::uint64_t begin, std::uint64_t end) {
    RunningStats acc;
    std::vector<double> q(d), step(d);
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream rng({seed, r, 0});
      std::fill(q.begin(), q.end(), 0.0);
      bool inside = true;
      for (int s = 1; s <= t && inside; ++s) {
        walk.sample_vector(rng, step);
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) {
          q[i] += step[i];
          r2 += q[i] * q[i];
        }
        inside = r2 <= f[s] * f[s];
      }
      if (inside && q[0] >= f[t] - 1.0)
        acc.add(std::exp(log_scale - sol.lambda * q[0]));
      else
        acc.add(0.0);
    }
    return acc;
  });
  CapCountEstimate out;
  out.margin = margin;
  out.raw = merge_all(parts).to_estimate();
  out.normalized = out.raw.estimate * std::pow(static_cast<double>(t), 0.5 * (d - 1)) *
                   std::exp(y) / (1 + y);
  return out;
}

}  // namespace brwlab

// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/brw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"

namespace brwlab {

BranchingRandomWalk::BranchingRandomWalk(const OffspringLaw& law, std::uint64_t cap,
                                         StreamKey key, SimulationOptions options)
    : law_(law), cap_(cap), key_(key), options_(options) {
  validate(law);
  if (cap < 1) raise(ErrorKind::InvalidArgument, "cap must be >= 1");
  gen_.dimension = next_.dimension = law.dimension;
  gen_.positions.assign(law.dimension, 0.0);
  gen_.parent_index.assign(1, 0);
}

std::optional<double> BranchingRandomWalk::max_radius() const {
  if (extinct()) return std::nullopt;
  return std::sqrt(max2_);
}

std::uint64_t BranchingRandomWalk::step() {
  const int d = law_.dimension;
  RandomStream rng(key_.with_stream(static_cast<std::uint32_t>(gen_.time + 1)));
  next_.time = gen_.time + 1;

  // Counts first, so the child arrays are sized once.
  const std::size_t parents = gen_.size();
  counts_.resize(parents);
  std::uint64_t population = 0;
  for (std::size_t p = 0; p < parents; ++p) {
    counts_[p] = static_cast<std::uint32_t>(sample_count(law_.count, rng));
    population += counts_[p];
  }
  next_.positions.resize(population * d);
  next_.parent_index.resize(population);
  norms2_.resize(population);

  double* pos = next_.positions.data();
  std::size_t child = 0;
  double max2 = 0.0;
  for (std::size_t p = 0; p < parents; ++p) {
    const double* origin = gen_.positions.data() + p * d;
    for (std::uint32_t c = 0; c < counts_[p]; ++c, ++child, pos += d) {
      sample_displacement(law_, rng, std::span<double>(pos, static_cast<std::size_t>(d)));
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        pos[i] += origin[i];
        r2 += pos[i] * pos[i];
      }
      norms2_[child] = r2;
      max2 = std::max(max2, r2);
      next_.parent_index[child] = static_cast<std::uint32_t>(p);
    }
  }
  max2_ = max2;
  if (population > cap_) apply_cap(norms2_, rng);
  std::swap(gen_, next_);
  return population;
}

// Keeps the `extremes` largest |X| (ties at the threshold resolved by
// index) plus a uniform sample of the others, preserving particle order.
void BranchingRandomWalk::apply_cap(std::vector<double>& norms2, RandomStream& rng) {
  cap_hit_ = true;
  const int d = law_.dimension;
  const std::size_t n = norms2.size();
  const auto extremes = std::min<std::size_t>(
      cap_, static_cast<std::size_t>(std::ceil(options_.extreme_fraction * static_cast<double>(cap_))));

  keep_.assign(n, 0);
  if (extremes > 0) {
    scratch_.assign(norms2.begin(), norms2.end());
    std::nth_element(scratch_.begin(), scratch_.begin() + (extremes - 1), scratch_.end(),
                     std::greater<>());
    const double threshold = scratch_[extremes - 1];
    std::size_t above = 0;
    for (std::size_t i = 0; i < n; ++i) above += norms2[i] > threshold;
    std::size_t at_threshold = extremes - above;
    for (std::size_t i = 0; i < n; ++i) {
      if (norms2[i] > threshold) {
        keep_[i] = 1;
      } else if (norms2[i] == threshold && at_threshold > 0) {
        keep_[i] = 1;
        --at_threshold;
      }
    }
  }
  // Selection sampling over the remaining particles.
  std::size_t need = cap_ - extremes;
  std::size_t pool = n - extremes;
  for (std::size_t i = 0; i < n && need > 0; ++i) {
    if (keep_[i]) continue;
    if (rng.uniform_open() * static_cast<double>(pool) < static_cast<double>(need)) {
      keep_[i] = 1;
      --need;
    }
    --pool;
  }

  std::size_t out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep_[i]) continue;
    if (out != i) {
      std::copy_n(next_.positions.data() + i * d, d, next_.positions.data() + out * d);
      next_.parent_index[out] = next_.parent_index[i];
    }
    ++out;
  }
  next_.positions.resize(out * d);
  next_.parent_index.resize(out);
}

RunRecord simulate(const OffspringLaw& law, int t_max, std::uint64_t cap, StreamKey key,
                   SimulationOptions options) {
  if (t_max < 0) raise(ErrorKind::InvalidArgument, "t_max must be >= 0");
  if (law.dimension > 64) raise(ErrorKind::InvalidArgument, "dimension above 64 is not supported");
  BranchingRandomWalk walk(law, cap, key, options);
  RunRecord rec;
  rec.seed = key.seed;
  rec.replica = key.replica;
  rec.max_radius.reserve(t_max + 1);
  rec.max_radius.push_back(0.0);
  rec.population.push_back(1);
  for (int t = 1; t <= t_max; ++t) {
    if (walk.extinct()) {
      rec.max_radius.push_back(std::nullopt);
      rec.population.push_back(0);
      continue;
    }
    rec.population.push_back(walk.step());
    rec.max_radius.push_back(walk.max_radius());
  }
  rec.survived = !walk.extinct();
  rec.cap_hit = walk.cap_hit();
  return rec;
}

std::pair<std::size_t, Eigen::VectorXd> farthest_particle(const Generation& gen,
                                                          RandomStream& rng) {
  if (gen.size() == 0) raise(ErrorKind::EmptyGeneration, "generation has no particles");
  std::size_t best = 0;
  double best2 = -1.0;
  std::uint64_t ties = 0;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const double r2 = gen.position(i).squaredNorm();
    if (r2 > best2) {
      best2 = r2;
      best = i;
      ties = 1;
    } else if (r2 == best2) {
      // Reservoir step keeps each tied index with probability 1/ties.
      ++ties;
      if (rng.uniform_open() * static_cast<double>(ties) < 1.0) best = i;
    }
  }
  return {best, gen.position(best)};
}

ConditionedRuns conditioned_runs(const OffspringLaw& law, int t_max, std::uint64_t cap,
                                 std::size_t n_surviving, std::uint64_t seed,
                                 std::uint64_t max_attempts, SimulationOptions options) {
  ConditionedRuns out;
  if (n_surviving == 0) return out;
  std::uint64_t next = 0;
  while (out.runs.size() < n_surviving) {
    if (next >= max_attempts) {
      const double rate = static_cast<double>(out.runs.size()) / static_cast<double>(next);
      if (rate < 1e-4) raise(ErrorKind::Timeout, "survival acceptance below 1e-4 within the attempt budget");
    }
    const std::uint64_t batch = std::max<std::uint64_t>(n_surviving - out.runs.size(), 1);
    auto parts = map_chunks(batch, 1, [&](std::uint64_t b, std::uint64_t) {
      return simulate(law, t_max, cap, StreamKey{seed, next + b, 0}, options);
    });
    for (auto& rec : parts) {
      if (out.runs.size() == n_surviving) break;
      ++out.attempted;
      if (rec.survived) out.runs.push_back(std::move(rec));
    }
    next += batch;
  }
  out.acceptance = static_cast<double>(out.runs.size()) / static_cast<double>(out.attempted);
  return out;
}

void write_run_csv_header(std::ostream& out) {
  out << "seed,replica,t,R_t,pop,survived,cap_hit\n";
}

void write_run_csv(std::ostream& out, const RunRecord& run) {
  char buf[64];
  for (std::size_t t = 0; t < run.max_radius.size(); ++t) {
    out << run.seed << ',' << run.replica << ',' << t << ',';
    if (run.max_radius[t]) {
      std::snprintf(buf, sizeof buf, "%.10g", *run.max_radius[t]);
      out << buf;
    }
    out << ',' << run.population[t] << ',' << (run.survived ? 1 : 0) << ','
        << (run.cap_hit ? 1 : 0) << '\n';
  }
}

}  // namespace brwlab

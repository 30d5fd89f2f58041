// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "brwlab/model.hpp"
#include "brwlab/rng.hpp"

namespace brwlab {

/// One generation of particles, positions stored flat (row i occupies
/// positions[i*d .. i*d + d)).
struct Generation {
  int time = 0;
  int dimension = 2;
  std::vector<double> positions;
  std::vector<std::uint32_t> parent_index;

  std::size_t size() const { return parent_index.size(); }
  Eigen::Map<const Eigen::VectorXd> position(std::size_t i) const {
    return {positions.data() + i * dimension, dimension};
  }
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::vector<std::optional<double>> max_radius;  ///< R_t, absent after extinction
  std::vector<std::uint64_t> population;          ///< population before capping
  bool survived = false;
  bool cap_hit = false;
};

struct SimulationOptions {
  /// Share of the cap filled by the particles of largest |X|; the rest is a
  /// uniform subsample of the others.
  double extreme_fraction = 0.5;
};

/// Steps a single run generation by generation. Generation t draws its
/// randomness from stream t of the run's key.
class BranchingRandomWalk {
 public:
  BranchingRandomWalk(const OffspringLaw& law, std::uint64_t cap, StreamKey key,
                      SimulationOptions options = {});

  /// Advances one generation; returns the new population before capping.
  std::uint64_t step();

  const Generation& current() const { return gen_; }
  bool extinct() const { return gen_.size() == 0; }
  bool cap_hit() const { return cap_hit_; }
  /// Largest |X| in the current generation, absent when extinct.
  std::optional<double> max_radius() const;

 private:
  void apply_cap(std::vector<double>& norms2, RandomStream& rng);

  OffspringLaw law_;
  std::uint64_t cap_;
  StreamKey key_;
  SimulationOptions options_;
  Generation gen_;
  Generation next_;
  std::vector<double> norms2_;
  std::vector<double> scratch_;
  std::vector<std::uint32_t> counts_;
  std::vector<unsigned char> keep_;
  double max2_ = 0.0;
  bool cap_hit_ = false;
};

RunRecord simulate(const OffspringLaw& law, int t_max, std::uint64_t cap, StreamKey key,
                   SimulationOptions options = {});

/// Argmax of |X| over a generation with exact ties broken uniformly.
std::pair<std::size_t, Eigen::VectorXd> farthest_particle(const Generation& gen,
                                                          RandomStream& rng);

struct ConditionedRuns {
  std::vector<RunRecord> runs;
  std::uint64_t attempted = 0;
  double acceptance = 0.0;
};

/// Runs replicas 0, 1, 2, ... and keeps the first n_surviving that survive
/// to t_max. Throws Timeout once max_attempts replicas have been tried with
/// an acceptance rate below 1e-4.
ConditionedRuns conditioned_runs(const OffspringLaw& law, int t_max, std::uint64_t cap,
                                 std::size_t n_surviving, std::uint64_t seed,
                                 std::uint64_t max_attempts = 1'000'000,
                                 SimulationOptions options = {});

/// CSV rows (seed, replica, t, R_t, pop, survived, cap_hit).
void write_run_csv_header(std::ostream& out);
void write_run_csv(std::ostream& out, const RunRecord& run);

}  // namespace brwlab

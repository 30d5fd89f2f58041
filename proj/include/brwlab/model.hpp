// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "brwlab/rng.hpp"

namespace brwlab {

// Offspring-count laws.
struct FixedCount {
  int k = 2;
};
/// N = 2 with probability p_two, else N = 0.
struct BinaryCount {
  double p_two = 0.75;
};
/// Poisson(mean); with `conditioned` the law of N given N >= 1.
struct PoissonCount {
  double mean = 2.0;
  bool conditioned = false;
};
/// P{N = k} = (1 - p)^k p for k >= 0.
struct GeometricCount {
  double p = 0.5;
};
using CountLaw = std::variant<FixedCount, BinaryCount, PoissonCount, GeometricCount>;

// Laws of the displacement length |X|.
/// Radius of sigma * G, G a standard Gaussian vector (chi law with d dof).
struct ChiRadius {
  double sigma = 1.0;
};
struct ExponentialRadius {
  double rate = 1.0;
};
/// Uniform on [0, max]; the compactly supported example.
struct UniformRadius {
  double max = 1.0;
};
struct AtomRadius {
  double r0 = 1.0;
};
using RadialLaw = std::variant<ChiRadius, ExponentialRadius, UniformRadius, AtomRadius>;

/// Children draw independent displacements; the only coupling supported.
enum class Coupling { Iid };

/// Radially symmetric offspring point process: N children, each displaced
/// by radius * uniform direction.
struct OffspringLaw {
  int dimension = 2;
  CountLaw count = FixedCount{};
  RadialLaw radial = ChiRadius{};
  Coupling coupling = Coupling::Iid;
};

/// Throws InvalidArgument for malformed parameters (d < 2, negative scales,
/// probabilities outside [0, 1]).
void validate(const OffspringLaw& law);

struct MeanParams {
  double m = 0.0;   ///< E[N]
  double m2 = 0.0;  ///< E[N^2] - E[N]
};

/// Closed-form first and second factorial moments; throws Subcritical when
/// E[N] <= 1.
MeanParams mean_params(const OffspringLaw& law);

double count_mean(const CountLaw& law);
double count_second_moment(const CountLaw& law);
bool count_allows_pairs(const CountLaw& law);

std::uint64_t sample_count(const CountLaw& law, RandomStream& rng);
/// Draws N from the law size-biased by N(N-1).
std::uint64_t sample_pair_biased_count(const CountLaw& law, RandomStream& rng);

double sample_radius(const RadialLaw& law, int d, RandomStream& rng);
double radial_median(const RadialLaw& law, int d);
/// True when |X| = 0 almost surely.
bool radial_is_degenerate(const RadialLaw& law);

/// Writes one child displacement into out[0..d).
void sample_displacement(const OffspringLaw& law, RandomStream& rng,
                         std::span<double> out);

std::vector<Eigen::VectorXd> sample_offspring(const OffspringLaw& law,
                                              RandomStream& rng);

/// Positions of an ordered pair of distinct siblings, with the family
/// size-biased by N(N-1).
struct SpinePair {
  Eigen::VectorXd delta1;
  Eigen::VectorXd delta2;
};
SpinePair sample_spine_pair(const OffspringLaw& law, RandomStream& rng);

/// One-dimensional projection R * H of a single displacement.
double sample_projection(const OffspringLaw& law, RandomStream& rng);

std::string describe(const OffspringLaw& law);

void to_json(nlohmann::json& j, const OffspringLaw& law);
void from_json(const nlohmann::json& j, OffspringLaw& law);

}  // namespace brwlab

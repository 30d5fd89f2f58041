// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "brwlab/cumulant.hpp"

namespace brwlab {

struct DirectionSet {
  enum class Kind { CapCover, SeparatedGrid };

  int d = 2;
  std::vector<double> coords;  ///< size() * d, row-major unit vectors
  double separation = 0.0;     ///< guaranteed chord distance between members
  Kind kind = Kind::CapCover;
  double parameter = 0.0;      ///< R for a cover, t for a grid
  double spread = 0.0;         ///< A of a grid
  /// Volume bounds on size() as multiples of parameter^{(d-1)/2}.
  double c_lower = 0.0;
  double c_upper = 0.0;
  std::size_t repaired = 0;    ///< cover points added after certification

  std::size_t size() const { return coords.size() / static_cast<std::size_t>(d); }
  std::span<const double> direction(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
};

/// Directions whose caps {<theta, v> >= 1 - 1/R} cover the sphere S^{d-1}.
/// Throws InvalidArgument for d < 2 or R <= 1.
DirectionSet cap_cover(int d, double R);

/// Greedy packing of the sphere with chord separation A / sqrt(t).
DirectionSet separated_grid(int d, double t, double A);

/// Fraction of probe directions within the cap of some member; the probes
/// are 1e5 quasi-uniform points unless given.
double cover_fraction(const DirectionSet& set, std::size_t probes = 100'000);

/// Smallest chord distance between two members. Exact by brute force up to
/// 1e4 members; above that, pairs are only compared within neighbouring
/// hash cells and +inf means every distance is at least `separation`.
double min_pairwise_distance(const DirectionSet& set);

/// Area fraction of {v : <v, theta> >= 1 - h} on S^{d-1}. Throws
/// InvalidArgument unless 0 <= h <= 1.
double cap_area_ratio(int d, double h);

/// CSV rows "index,x1,...,xd".
void write_direction_csv(std::ostream& out, const DirectionSet& set);

struct TrigBoundCheck {
  double lhs_min = 0.0;
  double argmin = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// inf over x in [0,1] of a(1 - cos(alpha - asin x)) + b x against
/// min(a alpha^2, b alpha) / pi.
TrigBoundCheck verify_trig_bound(double a, double b, double alpha, std::size_t grid_size = 2001);

struct GainCostOptions {
  int radial = 10;   ///< radii per disc, 0 and r included
  int angular = 32;  ///< angles per radius, 0 included
  std::vector<double> alphas = {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.2, 1.5707963267948966};
};

struct GainCostReport {
  double h_reference = 0.0;  ///< h_0(r e1, 0, 0)
  double grid_max = 0.0;
  double argmax_alpha = 0.0;
  double argmax[6] = {};     ///< x, x + y1, x + y2
  bool max_at_reference = false;
  /// min over alpha > 0 of (deficit - (lambda - eps/10)(r - m)) / alpha^2.
  double best_c = 0.0;
  /// min over alpha = 0 of deficit - (lambda - eps/10)(r - m).
  double alpha0_slack = 0.0;
  double half_radius_deficit = 0.0;  ///< at (r/2 e1, 0, 0), alpha = 0
  double half_radius_bound = 0.0;    ///< (lambda - eps/10) r / 2
  bool pass = false;
};

/// Grid search of
///   h_a(x, y1, y2) = lambda <x+y1, th1> + lambda <x+y2, th2> - s I1(|x|/s)
///                    - (lambda + eps) max(|y1|, |y2|)
/// over planar x, x+y1, x+y2 in the disc of radius r, th_{1,2} = (cos a, +-sin a).
GainCostReport verify_gain_cost_optimum(const CumulantHandle& handle, double r, double s,
                                        double lambda, double epsilon,
                                        const GainCostOptions& options = {});

}  // namespace brwlab

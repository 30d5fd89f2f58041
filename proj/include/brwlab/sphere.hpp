// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "brwlab/rng.hpp"

namespace brwlab {

/// Density of the first coordinate H of a uniform point on S^{d-1}:
/// (1 - x^2)^{(d-3)/2} / B(1/2, (d-1)/2) on [-1, 1], zero outside.
double projection_density(int d, double x);

/// CDF of the first coordinate of a uniform point on S^{d-1}.
double projection_cdf(int d, double x);

/// Draws H; H = 2B - 1 with B ~ Beta((d-1)/2, (d-1)/2).
double sample_sphere_coordinate(int d, RandomStream& rng);

/// Uniform direction on S^{d-1} by normalising a standard Gaussian vector.
void sample_unit_vector(int d, RandomStream& rng, std::span<double> out);

/// Moment generating function of H, M(u) = E exp(u H), in log form
/// together with M'(u)/M(u) and M''(u)/M(u). M is the normalised modified
/// Bessel function Gamma(d/2) (2/u)^{d/2-1} I_{d/2-1}(u).
struct SphereMgf {
  double log_value = 0.0;
  double ratio1 = 0.0;
  double ratio2 = 0.0;
};
SphereMgf sphere_mgf(int d, double u);

/// Draws H from the exponentially tilted law exp(kappa h) f_H(h) / M(kappa).
/// Uses Wood's rejection sampler for the von Mises-Fisher cosine.
double sample_tilted_sphere_coordinate(int d, double kappa, RandomStream& rng);

}  // namespace brwlab

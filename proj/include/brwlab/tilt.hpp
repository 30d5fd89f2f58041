// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "brwlab/cumulant.hpp"
#include "brwlab/rng.hpp"

namespace brwlab {

/// Projected step X1 under the exponential tilt exp(b x) dF(x) / E exp(b X1).
///
/// Gaussian steps shift by b sigma^2. Other laws draw the radius R from its
/// tilted marginal by rejection against rho(r) exp(|b| r), then the cosine H
/// given R from the von Mises-Fisher law with concentration b R.
class TiltedWalk {
 public:
  TiltedWalk(const CumulantHandle& handle, double b);

  double b() const { return b_; }
  /// E exp(b X1) = Phi(b) / m.
  double normalizer() const { return std::exp(log_normalizer_); }
  double log_normalizer() const { return log_normalizer_; }
  /// Tilted mean, Psi'(b).
  double mean() const { return mean_; }
  /// Probability that one radial proposal is accepted (1 when no rejection
  /// step is needed).
  double acceptance() const { return acceptance_; }
  int dimension() const { return d_; }

  double sample_step(RandomStream& rng) const;

  /// Full d-dimensional displacement tilted along e1: coordinate 0 has the
  /// tilted projected law, the rest is a uniform transverse direction of
  /// length R sqrt(1 - H^2).
  void sample_vector(RandomStream& rng, std::span<double> out) const;

  /// log of (Phi(b)/m)^n exp(-b s_n).
  double log_weight(int n, double endpoint) const {
    return n * log_normalizer_ - b_ * endpoint;
  }

 private:
  struct RadiusCosine {
    double r;
    double h;
  };
  RadiusCosine sample_radius_cosine(RandomStream& rng) const;

  OffspringLaw law_;
  int d_ = 2;
  double b_ = 0.0;
  double log_normalizer_ = 0.0;
  double mean_ = 0.0;
  double acceptance_ = 1.0;
};

double sample_tilted_step(const TiltedWalk& walk, RandomStream& rng);

/// Radon-Nikodym weight (Phi(b)/m)^n exp(-b S_n) of a path given by its
/// positions S_1..S_n; an empty path has weight 1.
double path_weight(const TiltedWalk& walk, std::span<const double> path);

}  // namespace brwlab

// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/tilt.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "brwlab/error.hpp"
#include "brwlab/sphere.hpp"

namespace brwlab {

TiltedWalk::TiltedWalk(const CumulantHandle& handle, double b)
    : law_(handle.law()), d_(handle.law().dimension), b_(b) {
  if (!(std::fabs(b) < handle.u_max()))
    raise(ErrorKind::DomainExceeded, "tilt parameter outside the domain of Phi");
  const auto v = handle.evaluate(b);
  log_normalizer_ = v.psi - std::log(handle.mean_offspring());
  mean_ = v.psi_prime;
  const bool direct = b == 0.0 || std::holds_alternative<ChiRadius>(law_.radial) ||
                      std::holds_alternative<AtomRadius>(law_.radial);
  if (!direct)
    acceptance_ = std::exp(log_normalizer_ - handle.radial_log_mgf(std::fabs(b)));
}

TiltedWalk::RadiusCosine TiltedWalk::sample_radius_cosine(RandomStream& rng) const {
  const double a = std::fabs(b_);
  if (a == 0.0) {
    return {sample_radius(law_.radial, d_, rng), sample_sphere_coordinate(d_, rng)};
  }
  double r = 0.0;
  if (const auto* atom = std::get_if<AtomRadius>(&law_.radial)) {
    r = atom->r0;
  } else {
    for (;;) {
      if (const auto* e = std::get_if<ExponentialRadius>(&law_.radial)) {
        r = -std::log(rng.uniform_open()) / (e->rate - a);
      } else {
        const double top = std::get<UniformRadius>(law_.radial).max;
        r = std::log1p(rng.uniform_open() * std::expm1(a * top)) / a;
      }
      // M(a r) e^{-a r} <= 1.
      if (std::log(rng.uniform_open()) <= sphere_mgf(d_, a * r).log_value - a * r) break;
    }
  }
  return {r, sample_tilted_sphere_coordinate(d_, b_ * r, rng)};
}

double TiltedWalk::sample_step(RandomStream& rng) const {
  if (const auto* chi = std::get_if<ChiRadius>(&law_.radial)) {
    boost::random::normal_distribution<double> normal(b_ * chi->sigma * chi->sigma, chi->sigma);
    return normal(rng);
  }
  const auto rh = sample_radius_cosine(rng);
  return rh.r * rh.h;
}

void TiltedWalk::sample_vector(RandomStream& rng, std::span<double> out) const {
  if (const auto* chi = std::get_if<ChiRadius>(&law_.radial)) {
    boost::random::normal_distribution<double> normal(0.0, chi->sigma);
    out[0] = b_ * chi->sigma * chi->sigma + normal(rng);
    for (int i = 1; i < d_; ++i) out[i] = normal(rng);
    return;
  }
  const auto rh = sample_radius_cosine(rng);
  out[0] = rh.r * rh.h;
  const double transverse = rh.r * std::sqrt(std::max(0.0, 1.0 - rh.h * rh.h));
  sample_unit_vector(d_ - 1, rng, out.subspan(1));
  for (int i = 1; i < d_; ++i) out[i] *= transverse;
}

double sample_tilted_step(const TiltedWalk& walk, RandomStream& rng) {
  return walk.sample_step(rng);
}

double path_weight(const TiltedWalk& walk, std::span<const double> path) {
  if (path.empty()) return 1.0;
  return std::exp(walk.log_weight(static_cast<int>(path.size()), path.back()));
}

}  // namespace brwlab

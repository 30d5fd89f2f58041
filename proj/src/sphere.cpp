// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/sphere.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "brwlab/error.hpp"

namespace brwlab {
namespace {

void require_dimension(int d) {
  if (d < 2) raise(ErrorKind::InvalidArgument, "dimension must be >= 2");
}

double sample_symmetric_beta(double shape, RandomStream& rng) {
  boost::random::gamma_distribution<double> gamma(shape, 1.0);
  const double x = gamma(rng);
  const double y = gamma(rng);
  return x / (x + y);
}

// Power series in (u/2)^2, valid and fast for |u| < 2.
SphereMgf mgf_series(int d, double u) {
  const double nu = 0.5 * d - 1.0;
  const double q = 0.25 * u * u;
  double coeff = 1.0;  // Gamma(nu+1) / (k! Gamma(nu+k+1))
  double value = 1.0;
  double a = 0.0;  // M'(u) / u
  double qk = 1.0;
  for (int k = 1; k < 60; ++k) {
    coeff /= static_cast<double>(k) * (nu + k);
    a += 0.5 * coeff * k * qk;
    qk *= q;
    const double term = coeff * qk;
    value += term;
    if (term < 1e-18 * value) break;
  }
  const double m1 = u * a;
  const double m2 = value - (d - 1) * a;
  return {std::log(value), m1 / value, m2 / value};
}

// Hankel expansion of log I_nu(u) - u + log sqrt(2 pi u), and the sum itself.
double hankel_sum(double nu, double u) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * u);
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum;
}

}  // namespace

double projection_density(int d, double x) {
  require_dimension(d);
  if (x < -1.0 || x > 1.0) return 0.0;
  const double norm = std::beta(0.5, 0.5 * (d - 1));
  return std::pow((1.0 - x) * (1.0 + x), 0.5 * (d - 3)) / norm;
}

double projection_cdf(int d, double x) {
  require_dimension(d);
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = 0.5 * (d - 1);
  return boost::math::ibeta(a, a, 0.5 * (1.0 + x));
}

double sample_sphere_coordinate(int d, RandomStream& rng) {
  require_dimension(d);
  return 2.0 * sample_symmetric_beta(0.5 * (d - 1), rng) - 1.0;
}

void sample_unit_vector(int d, RandomStream& rng, std::span<double> out) {
  boost::random::normal_distribution<double> normal;
  for (;;) {
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      out[i] = normal(rng);
      norm2 += out[i] * out[i];
    }
    if (norm2 > 1e-300) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (int i = 0; i < d; ++i) out[i] *= inv;
      return;
    }
  }
}

SphereMgf sphere_mgf(int d, double u) {
  require_dimension(d);
  const double sign = u < 0 ? -1.0 : 1.0;
  const double x = std::fabs(u);
  const double nu = 0.5 * d - 1.0;
  SphereMgf out;
  if (x < 2.0) {
    out = mgf_series(d, x);
  } else if (x <= 600.0) {
    const double i_nu = boost::math::cyl_bessel_i(nu, x);
    const double i_next = boost::math::cyl_bessel_i(nu + 1.0, x);
    out.log_value = std::lgamma(nu + 1.0) + nu * std::log(2.0 / x) + std::log(i_nu);
    out.ratio1 = i_next / i_nu;
    out.ratio2 = 1.0 - (d - 1) / x * out.ratio1;
  } else {
    const double s_nu = hankel_sum(nu, x);
    const double s_next = hankel_sum(nu + 1.0, x);
    out.log_value = std::lgamma(nu + 1.0) + nu * std::log(2.0 / x) + x -
                    0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(s_nu);
    out.ratio1 = s_next / s_nu;
    out.ratio2 = 1.0 - (d - 1) / x * out.ratio1;
  }
  out.ratio1 *= sign;
  return out;
}

double sample_tilted_sphere_coordinate(int d, double kappa, RandomStream& rng) {
  require_dimension(d);
  if (kappa == 0.0) return sample_sphere_coordinate(d, rng);
  const double sign = kappa < 0 ? -1.0 : 1.0;
  const double k = std::fabs(kappa);
  const double dm1 = d - 1.0;
  const double b = dm1 / (2.0 * k + std::sqrt(4.0 * k * k + dm1 * dm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = k * x0 + dm1 * std::log(1.0 - x0 * x0);
  for (;;) {
    const double z = sample_symmetric_beta(0.5 * dm1, rng);
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double log_u = std::log(rng.uniform_open());
    if (k * w + dm1 * std::log(1.0 - x0 * w) - c >= log_u) return sign * w;
  }
}

}  // namespace brwlab

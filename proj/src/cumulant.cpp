// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "brwlab/error.hpp"
#include "brwlab/sphere.hpp"

namespace brwlab {
namespace {

constexpr double kQuadTol = 1e-12;
constexpr double kQuadAccept = 1e-10;

struct Moments {
  double e0 = 0.0;  // E G(uH)
  double e1 = 0.0;  // E H G'(uH)
  double e2 = 0.0;  // E H^2 G''(uH)
};

// Integrates an even-in-H functional: E[F(H)] where the caller supplies
// F(h) + F(-h) as sym(h, 1 - h) for h = cos(psi) >= 0. The complement is
// passed separately because kernels peaked at h = 1 need it exactly. The
// range is split at `knee`, the angular width of that peak.
template <class Sym>
double sphere_expectation(int d, Sym&& sym, double knee, const char* what) {
  const double norm = std::beta(0.5, 0.5 * (d - 1));
  auto f = [&](double psi) {
    const double half = std::sin(0.5 * psi);
    return std::pow(std::sin(psi), d - 2) * sym(std::cos(psi), 2.0 * half * half) / norm;
  };
  knee = std::clamp(knee, 1e-6, 0.35);
  double value = 0.0, err = 0.0, l1 = 0.0;
  const double cuts[] = {0.0, knee, 4.0 * knee, std::numbers::pi / 2};
  for (int i = 0; i < 3; ++i) {
    double e = 0.0, a = 0.0;
    value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, cuts[i], cuts[i + 1], 15, kQuadTol, &e, &a);
    err += e;
    l1 += a;
  }
  if (!std::isfinite(value) || err > kQuadAccept * l1 + 1e-300) {
    std::ostringstream msg;
    msg << what << ": error estimate " << err << " vs L1 norm " << l1;
    raise(ErrorKind::QuadratureFailure, msg.str());
  }
  return value;
}

// g_n(s) = int_0^1 v^n e^{s v} dv, even and odd parts, all scaled by e^{-c}.
struct UniformKernel {
  double c;

  double series(double s, int n, int parity) const {
    // sum over k with k % 2 == parity of s^k / (k! (k + n + 1))
    double sum = 0.0;
    double term = 1.0;  // s^k / k!
    for (int k = 0; k < 40; ++k) {
      if (k % 2 == parity) sum += term / (k + n + 1);
      term *= s / (k + 1);
    }
    return 2.0 * sum * std::exp(-c);
  }

  double g(double s, int n) const {
    const double e = std::exp(s - c);
    const double z = std::exp(-c);
    switch (n) {
      case 0: return (e - z) / s;
      case 1: return (e * (s - 1.0) + z) / (s * s);
      default: return (e * (s * s - 2.0 * s + 2.0) - 2.0 * z) / (s * s * s);
    }
  }

  double even(double s, int n) const {
    if (std::fabs(s) <= 1.0) return series(s, n, 0);
    return g(s, n) + g(-s, n);
  }
  double odd(double s, int n) const {
    if (std::fabs(s) <= 1.0) return series(s, n, 1);
    return g(s, n) - g(-s, n);
  }
};

Moments uniform_moments(int d, double rho, double x) {
  const double c = x * rho;
  const UniformKernel k{c};
  const double knee = 1.0 / std::sqrt(std::max(c, 1.0));
  Moments out;
  out.e0 = sphere_expectation(d, [&](double h, double) { return k.even(c * h, 0); }, knee, "uniform E0");
  out.e1 = sphere_expectation(d, [&](double h, double) { return h * k.odd(c * h, 1); }, knee, "uniform E1");
  out.e2 = sphere_expectation(d, [&](double h, double) { return h * h * k.even(c * h, 2); }, knee, "uniform E2");
  return out;
}

// kappa^2 - s^2 = (kappa - s)(kappa + s), with kappa - s = (kappa - x) + x (1 - h).
Moments exponential_moments(int d, double kappa, double x) {
  const double k2 = kappa * kappa;
  auto q_of = [&](double h, double comp) { return ((kappa - x) + x * comp) * (kappa + x * h); };
  const double knee = std::sqrt((kappa - x) / kappa);
  Moments out;
  out.e0 = sphere_expectation(
      d, [&](double h, double comp) { return 2.0 * k2 / q_of(h, comp); }, knee, "exponential E0");
  out.e1 = sphere_expectation(
      d,
      [&](double h, double comp) {
        const double q = q_of(h, comp);
        return h * 4.0 * k2 * x * h / (q * q);
      },
      knee, "exponential E1");
  out.e2 = sphere_expectation(
      d,
      [&](double h, double comp) {
        const double s = x * h;
        const double q = q_of(h, comp);
        return h * h * 4.0 * k2 * (k2 + 3.0 * s * s) / (q * q * q);
      },
      knee, "exponential E2");
  return out;
}

}  // namespace

CumulantHandle::CumulantHandle(const OffspringLaw& law)
    : law_(law), m_(mean_params(law).m) {
  if (const auto* e = std::get_if<ExponentialRadius>(&law.radial)) u_max_ = e->rate;
  closed_form_ = std::holds_alternative<ChiRadius>(law.radial) ||
                 std::holds_alternative<AtomRadius>(law.radial);
}

CumulantValue CumulantHandle::evaluate(double u) const {
  const double x = std::fabs(u);
  if (!(x < u_max_)) {
    std::ostringstream msg;
    msg << "|u| = " << x << " is outside the domain (u_max = " << u_max_ << ")";
    raise(ErrorKind::DomainExceeded, msg.str());
  }
  const int d = law_.dimension;
  const double log_m = std::log(m_);
  CumulantValue out;
  if (const auto* chi = std::get_if<ChiRadius>(&law_.radial)) {
    const double s2 = chi->sigma * chi->sigma;
    out.psi = log_m + 0.5 * s2 * x * x;
    out.psi_prime = s2 * x;
    out.psi_second = s2;
  } else if (const auto* atom = std::get_if<AtomRadius>(&law_.radial)) {
    const auto mg = sphere_mgf(d, x * atom->r0);
    out.psi = log_m + mg.log_value;
    out.psi_prime = atom->r0 * mg.ratio1;
    out.psi_second = atom->r0 * atom->r0 * (mg.ratio2 - mg.ratio1 * mg.ratio1);
  } else if (const auto* uni = std::get_if<UniformRadius>(&law_.radial)) {
    const auto mo = uniform_moments(d, uni->max, x);
    out.psi = log_m + x * uni->max + std::log(mo.e0);
    out.psi_prime = uni->max * mo.e1 / mo.e0;
    out.psi_second = uni->max * uni->max * mo.e2 / mo.e0 - out.psi_prime * out.psi_prime;
  } else {
    const double kappa = std::get<ExponentialRadius>(law_.radial).rate;
    const auto mo = exponential_moments(d, kappa, x);
    out.psi = log_m + std::log(mo.e0);
    out.psi_prime = mo.e1 / mo.e0;
    out.psi_second = mo.e2 / mo.e0 - out.psi_prime * out.psi_prime;
  }
  if (x == 0.0) out.psi_prime = 0.0;
  if (u < 0) out.psi_prime = -out.psi_prime;
  out.phi = std::exp(out.psi);
  return out;
}

double CumulantHandle::radial_log_mgf(double s) const {
  if (!(s < u_max_)) raise(ErrorKind::DomainExceeded, "radial mgf argument outside the domain");
  if (const auto* chi = std::get_if<ChiRadius>(&law_.radial)) {
    // E exp(s sigma chi_d) by quadrature against the chi density, scaled
    // by the dominant factor exp(s^2 sigma^2 / 2).
    const double k = 0.5 * law_.dimension;
    const double a = s * chi->sigma;
    auto f = [&](double r) {
      return std::exp((2 * k - 1) * std::log(r) - 0.5 * (r - a) * (r - a) -
                      (k - 1) * std::log(2.0) - std::lgamma(k));
    };
    const double hi = std::max(a, 0.0) + 40.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, hi, 20, kQuadTol);
    return 0.5 * a * a + std::log(v);
  }
  if (const auto* e = std::get_if<ExponentialRadius>(&law_.radial))
    return std::log(e->rate / (e->rate - s));
  if (const auto* uni = std::get_if<UniformRadius>(&law_.radial)) {
    const double c = s * uni->max;
    if (std::fabs(c) < 1e-8) return 0.5 * c;
    return c > 0 ? c + std::log(-std::expm1(-c) / c) : std::log(std::expm1(c) / c);
  }
  return s * std::get<AtomRadius>(law_.radial).r0;
}

PsiValue psi(const CumulantHandle& handle, double u) {
  const auto v = handle.evaluate(u);
  return {v.phi, v.psi, v.psi_prime};
}

namespace {

// Largest admissible trial point strictly inside a finite domain.
double approach(double lo, double u_max) { return lo + 0.5 * (u_max - lo); }

}  // namespace

LambdaSolution solve_lambda(const CumulantHandle& handle, double tol) {
  if (!(tol > 0)) raise(ErrorKind::InvalidArgument, "tol must be positive");
  if (radial_is_degenerate(handle.law().radial))
    raise(ErrorKind::DegenerateStep, "displacements vanish almost surely, Psi' is identically 0");
  const double u_max = handle.u_max();
  auto F = [&](double u) {
    const auto v = handle.evaluate(u);
    return std::pair{u * v.psi_prime - v.psi, u * v.psi_second};
  };

  // Bracket: F(0) = -log m < 0 and F is increasing on (0, u_max).
  double lo = 0.0;
  double hi = std::isfinite(u_max) ? std::min(1.0, approach(0.0, u_max)) : 1.0;
  std::ostringstream profile;
  for (int i = 0;; ++i) {
    const double f = F(hi).first;
    profile << " F(" << hi << ")=" << f;
    if (f >= 0) break;
    lo = hi;
    if (std::isfinite(u_max)) {
      if (u_max - hi < 1e-9 * u_max || i > 200)
        raise(ErrorKind::NoSolution, "u Psi'(u) - Psi(u) < 0 up to u_max; sign profile:" + profile.str());
      hi = std::min(2.0 * hi, approach(hi, u_max));
    } else {
      if (hi > 1e12)
        raise(ErrorKind::NoSolution, "u Psi'(u) - Psi(u) < 0 on the scanned range; sign profile:" + profile.str());
      hi *= 2.0;
    }
  }

  double u = 0.5 * (lo + hi);
  int it = 0;
  for (; it < 200; ++it) {
    const auto [f, df] = F(u);
    if (f == 0.0) break;
    (f < 0 ? lo : hi) = u;
    double next = df > 0 ? u - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - u);
    u = next;
    if (step <= 1e-3 * tol * std::max(1.0, u) || hi - lo <= 1e-15 * u) break;
  }

  const auto v = handle.evaluate(u);
  LambdaSolution sol;
  sol.lambda = u;
  sol.residual = std::fabs(u * v.psi_prime - v.psi);
  sol.psi_lambda = v.psi;
  sol.gamma = v.psi / u;
  sol.dimension = handle.law().dimension;
  sol.log_coeff = (sol.dimension - 4) / (2.0 * u);
  sol.iterations = it;
  double eps = std::isfinite(u_max) ? std::min(0.1 * u, 0.5 * (u_max - u)) : 0.1 * u;
  // Confirms Phi(lambda + eps) is finite and evaluable.
  while (eps > 0 && !std::isfinite(handle.evaluate(u + eps).psi)) eps *= 0.5;
  sol.epsilon_margin = eps;
  return sol;
}

RateValue rate_function(const CumulantHandle& handle, double b) {
  if (!(b >= 0)) raise(ErrorKind::InvalidArgument, "rate function needs b >= 0");
  if (b == 0.0) return {0.0, 0.0, false};
  const double u_max = handle.u_max();
  const double log_m = std::log(handle.mean_offspring());
  auto G = [&](double a) { return handle.evaluate(a).psi_prime - b; };

  double lo = 0.0;
  double hi = std::isfinite(u_max) ? std::min(1.0, approach(0.0, u_max)) : 1.0;
  for (int i = 0;; ++i) {
    if (G(hi) >= 0) break;
    lo = hi;
    if (std::isfinite(u_max)) {
      if (u_max - hi < 1e-9 * u_max || i > 200)
        return {std::numeric_limits<double>::infinity(), u_max, true};
      hi = std::min(2.0 * hi, approach(hi, u_max));
    } else {
      if (hi > 1e8) return {std::numeric_limits<double>::infinity(), hi, true};
      hi *= 2.0;
    }
  }

  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto v = handle.evaluate(a);
    const double g = v.psi_prime - b;
    if (g == 0.0) break;
    (g < 0 ? lo : hi) = a;
    double next = v.psi_second > 0 ? a - g / v.psi_second : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - a);
    a = next;
    if (step <= 1e-15 * std::max(1.0, a) || hi - lo <= 1e-15 * a) break;
  }
  const auto v = handle.evaluate(a);
  return {a * b - v.psi + log_m, a, false};
}

double displacement_front(const LambdaSolution& solution, double t) {
  if (!(t >= 1.0)) raise(ErrorKind::InvalidArgument, "front needs t >= 1");
  return solution.gamma * t + solution.log_coeff * std::log(t);
}

}  // namespace brwlab

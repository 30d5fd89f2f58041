// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>

#include "brwlab/model.hpp"

namespace brwlab {

/// Phi(u) = m E exp(u X1), Psi = log Phi and its first two derivatives,
/// where X1 is the first coordinate of a single displacement.
struct CumulantValue {
  double phi = 0.0;
  double psi = 0.0;
  double psi_prime = 0.0;
  double psi_second = 0.0;
};

/// Evaluator for the projected-step cumulant of one offspring law.
///
/// Gaussian steps have a closed form and so does a radial atom (through the
/// sphere mgf). For uniform and exponential radii the radial expectation is
/// explicit given the projection H, leaving a smooth integral over the
/// angle of H which is done by adaptive Gauss-Kronrod.
class CumulantHandle {
 public:
  explicit CumulantHandle(const OffspringLaw& law);

  const OffspringLaw& law() const { return law_; }
  double mean_offspring() const { return m_; }
  /// Supremum of |u| with Phi(u) finite; infinite unless the radius has an
  /// exponential tail.
  double u_max() const { return u_max_; }
  bool closed_form() const { return closed_form_; }

  /// Throws DomainExceeded if |u| >= u_max, QuadratureFailure if the
  /// estimated relative error exceeds 1e-10.
  CumulantValue evaluate(double u) const;

  /// log E exp(s R) for the radial law; finite for s < u_max.
  double radial_log_mgf(double s) const;

 private:
  OffspringLaw law_;
  double m_ = 0.0;
  double u_max_ = std::numeric_limits<double>::infinity();
  bool closed_form_ = false;
};

struct PsiValue {
  double phi = 0.0;
  double psi = 0.0;
  double psi_prime = 0.0;
};
PsiValue psi(const CumulantHandle& handle, double u);

struct LambdaSolution {
  double lambda = 0.0;
  double residual = 0.0;  ///< |lambda Psi'(lambda) - Psi(lambda)|
  double gamma = 0.0;     ///< Psi(lambda) / lambda
  double log_coeff = 0.0; ///< (d - 4) / (2 lambda)
  double epsilon_margin = 0.0;
  double psi_lambda = 0.0;
  int dimension = 2;
  int iterations = 0;
};

/// Positive root of F(u) = u Psi'(u) - Psi(u). Throws DegenerateStep when
/// displacements vanish and NoSolution when F stays negative on the domain.
LambdaSolution solve_lambda(const CumulantHandle& handle, double tol = 1e-10);

struct RateValue {
  double value = 0.0;
  double derivative = 0.0;
  bool infinite = false;
};

/// I1(b) = sup_a [a b - Psi(a) + log m] for b >= 0, with I1'(b) = a*.
/// `infinite` is set when b is not below sup Psi' on the domain.
RateValue rate_function(const CumulantHandle& handle, double b);

/// r_t = gamma t + log_coeff log t.
double displacement_front(const LambdaSolution& solution, double t);

}  // namespace brwlab

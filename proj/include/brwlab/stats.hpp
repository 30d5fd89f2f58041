// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace brwlab::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value with the usual
/// small-sample correction of the effective size).
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS test against a continuous CDF.
TestResult ks_one_sample(std::vector<double> sample,
                         const std::function<double(double)>& cdf);

/// Pearson chi-square goodness of fit; `expected` holds expected counts.
TestResult chi_square(std::span<const double> observed,
                      std::span<const double> expected);

double normal_cdf(double x);

/// Linear-interpolation quantile (type 7). Sorts a copy.
double quantile(std::vector<double> values, double q);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace brwlab::stats

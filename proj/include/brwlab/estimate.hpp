// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace brwlab {

/// Monte-Carlo estimate with its standard error and the number of
/// independent replicas behind it.
struct EstimateCI {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t replicas = 0;
};

/// Welford accumulator; merge() is Chan's pairwise update so partial
/// results from independent chunks combine exactly.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n_ + other.n_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.n_) / total;
    m2_ += other.m2_ + delta * delta * static_cast<double>(n_) *
                           static_cast<double>(other.n_) / total;
    n_ += other.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double std_error() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

  EstimateCI to_estimate() const { return {mean_, std_error(), n_}; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline RunningStats merge_all(std::span<const RunningStats> parts) {
  RunningStats total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

/// Difference of two independent estimates in units of their combined
/// standard error. Returns 0 when both are exact and equal.
inline double z_score(const EstimateCI& a, const EstimateCI& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = a.estimate - b.estimate;
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  return diff / se;
}

inline EstimateCI scaled(const EstimateCI& e, double factor) {
  return {e.estimate * factor, e.std_error * std::fabs(factor), e.replicas};
}

}  // namespace brwlab

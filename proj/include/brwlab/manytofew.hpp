// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "brwlab/ballot.hpp"
#include "brwlab/cumulant.hpp"
#include "brwlab/estimate.hpp"
#include "brwlab/model.hpp"

namespace brwlab {

/// Bounded functional of a path (x_0, ..., x_n) in R^d.
struct PathFunctional {
  enum class Kind { Constant, EndpointNormBall, EndpointHalfspace, BarrierIndicator, ExpProjection };

  Kind kind = Kind::Constant;
  int horizon = 1;
  double value = 1.0;     ///< constant, radius rho, offset c, slack y or tilt u
  Eigen::VectorXd theta;  ///< halfspace normal; e1 when empty
  BarrierFamily family = ZeroBarrier{};

  static PathFunctional constant(int n, double c = 1.0);
  /// 1{|x_n| <= rho}
  static PathFunctional endpoint_norm_ball(int n, double rho);
  /// 1{<x_n, theta> >= c}
  static PathFunctional endpoint_halfspace(int n, Eigen::VectorXd theta, double c);
  /// 1{|x_s| <= f_n(s) + y for all s <= n}
  static PathFunctional barrier_indicator(int n, BarrierFamily family, double y);
  /// exp(u <x_n, e1>)
  static PathFunctional exp_projection(int n, double u);

  std::string name() const;
};

/// `path` holds (n+1) points of dimension d, row-major.
double evaluate(const PathFunctional& f, std::span<const double> path, int d);

/// f(p, q) = first(p) * second(q).
struct PairFunctional {
  PathFunctional first;
  PathFunctional second;
  int horizon() const { return first.horizon; }
};

/// Monte-Carlo mean of sum_{|v|=n} f(path of v) over uncapped runs. Throws
/// HorizonTooLarge for n > 12.
EstimateCI mto_lhs(const OffspringLaw& law, const PathFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed);
/// m^n E f(Q_0..Q_n) with Q the walk of the normalised mean measure.
EstimateCI mto_rhs(const OffspringLaw& law, const PathFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed);

/// Several functionals (sharing one horizon) on the same samples.
std::vector<EstimateCI> mto_lhs(const OffspringLaw& law, std::span<const PathFunctional> funs,
                                std::uint64_t replicas, std::uint64_t seed);
std::vector<EstimateCI> mto_rhs(const OffspringLaw& law, std::span<const PathFunctional> funs,
                                std::uint64_t replicas, std::uint64_t seed);

/// Monte-Carlo mean of sum_{|u|=|v|=n} f(path u, path v). Throws
/// HorizonTooLarge for n > 8.
EstimateCI mtt_lhs(const OffspringLaw& law, const PairFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed);

enum class SpineMode {
  Pair,         ///< walks share Q_0..Q_k, then split through (Delta1, Delta2)
  Independent,  ///< negative control: two unrelated walks
};

/// m^n E f(Q, Q) + m2 m^{2n-2} sum_k m^{-k} E f(Q<k>, Q[k]), one stratum per
/// term with replicas allocated in proportion to the term weight.
EstimateCI mtt_rhs(const OffspringLaw& law, const PairFunctional& fun, std::uint64_t replicas,
                   std::uint64_t seed, SpineMode mode = SpineMode::Pair);

/// Closed form of the f = 1 right-hand sides.
double mto_constant(const OffspringLaw& law, int n);
double mtt_constant(const OffspringLaw& law, int n);

struct CapCountEstimate {
  EstimateCI raw;
  double normalized = 0.0;  ///< raw t^{(d-1)/2} e^y / (1+y)
  double margin = 0.0;      ///< the M used
};

/// E #{|u| = t : |X_s(u)| <= f_s for s <= t, <X_t(u), e1> >= f_t - 1} with
/// f = f^{t,y}, by tilting the e1-coordinate by lambda. A NaN margin selects
/// default_barrier_margin. Throws DegenerateBarrier if the barrier dips
/// below 0.
CapCountEstimate first_moment_cap_count(const OffspringLaw& law, const LambdaSolution& sol,
                                        int t, double y, std::uint64_t replicas,
                                        std::uint64_t seed, double margin = NAN);

}  // namespace brwlab

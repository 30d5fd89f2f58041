// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "brwlab/cumulant.hpp"
#include "brwlab/estimate.hpp"
#include "brwlab/rng.hpp"

namespace brwlab {

/// Centered, non-lattice step law of a one-dimensional walk.
class WalkLaw {
 public:
  enum class Kind { Normal, Laplace, ShiftedExponential, StudentT };

  static WalkLaw normal();
  /// Density exp(-|x| / beta) / (2 beta).
  static WalkLaw laplace(double beta = 1.0);
  /// E - 1/rate with E ~ Exp(rate).
  static WalkLaw shifted_exponential(double rate = 1.0);
  /// Student t with nu >= 5 degrees of freedom.
  static WalkLaw student_t(double nu = 5.0);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  std::string name() const;

  double sample(RandomStream& rng) const;
  double density(double x) const;
  /// Infimum of the support (-inf except for the shifted exponential).
  double support_min() const;

  double variance() const { return variance_; }
  double third_abs_moment() const { return third_abs_; }
  /// The epsilon with E|S1|^{3+eps} < infinity used throughout.
  double epsilon() const { return epsilon_; }
  double moment_3_eps() const { return moment_3_eps_; }

  /// E|S1|^p; closed form for normal and Laplace steps, adaptive quadrature
  /// for the other two.
  double abs_moment(double p) const;

 private:
  WalkLaw(Kind kind, double param);

  Kind kind_;
  double param_;
  double variance_ = 1.0;
  double third_abs_ = 0.0;
  double epsilon_ = 1.0;
  double moment_3_eps_ = 0.0;
};

/// f_k^{t,y} built from a critical tilt; with `centered` the linear drift
/// (Psi(lambda)/lambda) k is removed.
struct FrontBarrier {
  double lambda = 1.0;
  double psi_lambda = 0.0;
  double margin = 1.0;  ///< M
  int dimension = 2;
  double y = 0.0;
  bool centered = false;
};
/// f_n(k) = c1 ln(k+1) - c2 ln((n+1)/(n-k+1)).
struct LogBarrier {
  double c1 = 1.0;
  double c2 = 0.0;
};
struct ZeroBarrier {};
using BarrierFamily = std::variant<FrontBarrier, LogBarrier, ZeroBarrier>;

FrontBarrier front_barrier(const LambdaSolution& sol, double margin, double y,
                           bool centered = false);

/// f_n(k); throws IndexOutOfRange unless 0 <= k <= n.
double barrier_eval(const BarrierFamily& family, std::int64_t n, std::int64_t k);

/// Increasing f(k) bounding the running maxima of |f_n| and |g_n| for all n.
std::function<double(double)> barrier_envelope(const BarrierFamily& family);

/// Direct scan of the envelope property over n <= n_max.
bool envelope_dominates(const BarrierFamily& family, std::int64_t n_max);

/// The M of the barrier: 1.01 max(1, lambda, lambda median|Q1|, M0) where M0
/// is the least value keeping the barrier numerator nonnegative.
double default_barrier_margin(const CumulantHandle& handle, const LambdaSolution& sol);

struct Summability {
  std::vector<double> partial_sums;         ///< sum_{m<=k} f(m)/m^{3/2}, k = 1..N
  std::vector<double> dyadic_partial_sums;  ///< sum_{j<=k} f(2^j)/2^{j/2}
  bool converged = false;
  bool dyadic_converged = false;
};

/// Flags a series as converged when its last dyadic block adds less than
/// `tol` relative to the partial sum.
Summability check_summability(const std::function<double(double)>& f, std::int64_t horizon,
                              double tol = 1e-2);

enum class BallotMethod { Auto, Plain, Glued };

struct BallotOptions {
  BallotMethod method = BallotMethod::Auto;
  std::int64_t glue_threshold = 200;  ///< Auto glues for n above this
  double width = 1.0;                 ///< terminal window length
  std::uint64_t block = 2000;         ///< segments per side in one glued block
};

struct BallotEstimate {
  EstimateCI raw;
  double normalized = 0.0;  ///< n^{3/2} p / ((a+1)(b+1))
  bool glued = false;
};

/// P{S_k >= f_n(k) - a for k <= n, S_n in [f_n(n) - a + b, ... + width]}.
///
/// The glued estimator samples paths of the first n - L - 1 steps forward
/// and the last L = ceil(n/3) steps backward from a uniform point of the
/// window, then joins every forward/backward pair through the step density
/// of the connecting increment. Each block of `block` segments per side
/// gives one unbiased estimate; `replicas` counts segments over both sides.
BallotEstimate ballot_probability(const WalkLaw& walk, const BarrierFamily& family, double a,
                                  double b, std::int64_t n, std::uint64_t replicas,
                                  std::uint64_t seed, const BallotOptions& options = {});

struct SurvivalEstimate {
  EstimateCI lower;  ///< P{S_k >= f(k) - a, n_f <= k <= n}
  EstimateCI upper;  ///< P{S_k >= -f(k) - a, 1 <= k <= n}
  double lower_normalized = 0.0;  ///< sqrt(n) p / (a+1)
  double upper_normalized = 0.0;
};

SurvivalEstimate barrier_survival(const WalkLaw& walk, const std::function<double(double)>& f,
                                  double a, std::int64_t n, std::uint64_t replicas,
                                  std::uint64_t seed, std::int64_t n_f = 8);

struct TailEstimate {
  EstimateCI raw;
  double normalized = 0.0;
};

/// P{min_{k<=n} S_k >= -a}.
TailEstimate hitting_time_tail(const WalkLaw& walk, double a, std::int64_t n,
                               std::uint64_t replicas, std::uint64_t seed);

struct LadderRecord {
  std::vector<std::uint64_t> epochs;  ///< first strict ascending ladder epoch, per replica
  std::vector<double> heights;        ///< first ladder height H1, per replica
  std::vector<double> levels;
  std::vector<std::vector<double>> overshoots;  ///< S_{T_b} - b per level
  std::uint64_t truncated = 0;  ///< excursions abandoned at max_steps
};

struct OvershootRow {
  double level = 0.0;
  EstimateCI moment;  ///< E (S_{T_b} - b)^{1+eps}
  EstimateCI bound;   ///< E L^{1+eps} + (E L)^{1+eps}, L size-biased H1
  double z = 0.0;     ///< (moment - bound) / combined stderr
};

struct LadderReport {
  LadderRecord record;
  std::vector<OvershootRow> table;
  double epsilon = 1.0;
};

/// Ladder heights and overshoots. Every overshoot replica composes its own
/// sequence of ladder heights on a stream tied to its level.
LadderReport ladder_overshoot(const WalkLaw& walk, const std::vector<double>& levels,
                              std::uint64_t replicas, std::uint64_t seed,
                              std::uint64_t max_steps = 1'000'000);

struct ColicReport {
  bool pass = true;
  double min_slack = 0.0;  ///< min of f^2 - g^2 - h^2 over the scan
  std::int64_t worst_t = 0;
  std::int64_t worst_s = 0;
  double worst_y = 0.0;
  std::uint64_t violations = 0;
};

/// Squared-domination scan of the barrier against the split g + h over
/// s = 0..t, y in {1, sqrt t}, t in t_range.
ColicReport colic_check(const LambdaSolution& sol, double margin, double epsilon,
                        const std::vector<std::int64_t>& t_range);

/// g_s^{t,y} and h_s^t of the scan, exposed for tests.
double colic_g(const LambdaSolution& sol, double margin, double epsilon, std::int64_t t,
               double y, std::int64_t s);
double colic_h(const LambdaSolution& sol, double margin, double epsilon, std::int64_t t,
               std::int64_t s);

}  // namespace brwlab

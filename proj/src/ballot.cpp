// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/ballot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"

namespace brwlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// Densities below ~1e-30 of their peak cannot move a double sum.
double density_cutoff(const WalkLaw& w) {
  switch (w.kind()) {
    case WalkLaw::Kind::Normal:
      return 12.0;
    case WalkLaw::Kind::Laplace:
      return 70.0 * w.parameter();
    case WalkLaw::Kind::ShiftedExponential:
      return 70.0 / w.parameter() + 1.0 / w.parameter();
    case WalkLaw::Kind::StudentT:
      return kInf;
  }
  return kInf;
}

template <class Fold>
RunningStats replica_stats(std::uint64_t replicas, Fold&& one) {
  auto parts = map_chunks(replicas, 4096, [&](std::uint64_t begin, std::uint64_t end) {
    RunningStats s;
    for (std::uint64_t r = begin; r < end; ++r) s.add(one(r));
    return s;
  });
  return merge_all(parts);
}

}  // namespace

// ---------------------------------------------------------------- WalkLaw

WalkLaw::WalkLaw(Kind kind, double param) : kind_(kind), param_(param) {
  if (kind == Kind::StudentT) epsilon_ = std::min(1.0, 0.5 * (param - 3.0));
  variance_ = abs_moment(2.0);
  third_abs_ = abs_moment(3.0);
  moment_3_eps_ = abs_moment(3.0 + epsilon_);
}

WalkLaw WalkLaw::normal() { return {Kind::Normal, 1.0}; }

WalkLaw WalkLaw::laplace(double beta) {
  if (!(beta > 0)) raise(ErrorKind::InvalidArgument, "Laplace scale must be positive");
  return {Kind::Laplace, beta};
}

WalkLaw WalkLaw::shifted_exponential(double rate) {
  if (!(rate > 0)) raise(ErrorKind::InvalidArgument, "exponential rate must be positive");
  return {Kind::ShiftedExponential, rate};
}

WalkLaw WalkLaw::student_t(double nu) {
  if (!(nu >= 5.0)) raise(ErrorKind::InvalidArgument, "Student t needs nu >= 5");
  return {Kind::StudentT, nu};
}

std::string WalkLaw::name() const {
  switch (kind_) {
    case Kind::Normal:
      return "normal";
    case Kind::Laplace:
      return "laplace";
    case Kind::ShiftedExponential:
      return "shifted_exponential";
    case Kind::StudentT:
      return "student_t";
  }
  return "?";
}

double WalkLaw::sample(RandomStream& rng) const {
  switch (kind_) {
    case Kind::Normal: {
      boost::random::normal_distribution<double> normal;
      return normal(rng);
    }
    case Kind::Laplace: {
      const std::uint64_t bits = rng();
      const double e = -param_ * std::log((static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53);
      return (bits & 1) ? e : -e;
    }
    case Kind::ShiftedExponential:
      return (-std::log(rng.uniform_open()) - 1.0) / param_;
    case Kind::StudentT: {
      boost::random::student_t_distribution<double> t(param_);
      return t(rng);
    }
  }
  return 0.0;
}

double WalkLaw::density(double x) const {
  switch (kind_) {
    case Kind::Normal:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case Kind::Laplace:
      return std::exp(-std::fabs(x) / param_) / (2.0 * param_);
    case Kind::ShiftedExponential:
      return x < -1.0 / param_ ? 0.0 : param_ * std::exp(-param_ * x - 1.0);
    case Kind::StudentT: {
      const double nu = param_;
      const double log_c = std::lgamma(0.5 * (nu + 1)) - std::lgamma(0.5 * nu) -
                           0.5 * std::log(nu * std::numbers::pi);
      return std::exp(log_c - 0.5 * (nu + 1) * std::log1p(x * x / nu));
    }
  }
  return 0.0;
}

double WalkLaw::support_min() const {
  return kind_ == Kind::ShiftedExponential ? -1.0 / param_ : -kInf;
}

double WalkLaw::abs_moment(double p) const {
  switch (kind_) {
    case Kind::Normal:
      return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1)) / std::sqrt(std::numbers::pi);
    case Kind::Laplace:
      return std::pow(param_, p) * std::tgamma(p + 1);
    case Kind::ShiftedExponential: {
      // In units of 1/rate: |u|^p e^{-(u+1)} on u > -1.
      const double neg = gk([p](double v) { return std::pow(v, p) * std::exp(v - 1.0); }, 0.0, 1.0);
      const double pos = std::exp(-1.0) * std::tgamma(p + 1);
      return (neg + pos) / std::pow(param_, p);
    }
    case Kind::StudentT: {
      if (p >= param_) return kInf;
      // x = u / (1 - u) maps [0, inf) to [0, 1).
      boost::math::quadrature::tanh_sinh<double> ts;
      auto f = [&](double u) {
        const double x = u / (1.0 - u);
        return std::pow(x, p) * density(x) / ((1.0 - u) * (1.0 - u));
      };
      return 2.0 * ts.integrate(f, 0.0, 1.0, 1e-13);
    }
  }
  return 0.0;
}

// -------------------------------------------------------------- barriers

FrontBarrier front_barrier(const LambdaSolution& sol, double margin, double y, bool centered) {
  return {sol.lambda, sol.psi_lambda, margin, sol.dimension, y, centered};
}

double barrier_eval(const BarrierFamily& family, std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) raise(ErrorKind::IndexOutOfRange, "barrier index outside 0..n");
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroBarrier>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, LogBarrier>) {
          return f.c1 * std::log1p(kk) - f.c2 * std::log((nn + 1) / (nn - kk + 1));
        } else {
          const double drift = f.centered ? 0.0 : f.psi_lambda / f.lambda * kk;
          return drift + (f.dimension - 1) / (2 * f.lambda) * std::log1p(kk) -
                 1.5 / f.lambda * std::log((nn + 1) / (nn - kk + 1)) +
                 (3 * f.margin + f.y) / f.lambda;
        }
      },
      family);
}

std::function<double(double)> barrier_envelope(const BarrierFamily& family) {
  return std::visit(
      [](const auto& f) -> std::function<double(double)> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroBarrier>) {
          return [](double) { return 0.0; };
        } else if constexpr (std::is_same_v<T, LogBarrier>) {
          const double c = std::fabs(f.c1) + std::fabs(f.c2);
          return [c](double k) { return c * std::log1p(k); };
        } else {
          const double slope = f.centered ? 0.0 : f.psi_lambda / f.lambda;
          const double c = (f.dimension + 2) / (2 * f.lambda);
          const double shift = (3 * f.margin + std::fabs(f.y)) / f.lambda;
          return [=](double k) { return slope * k + c * std::log1p(k) + shift; };
        }
      },
      family);
}

bool envelope_dominates(const BarrierFamily& family, std::int64_t n_max) {
  const auto env = barrier_envelope(family);
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const double fn = barrier_eval(family, n, n);
    double fbar = 0.0;
    double gbar = 0.0;
    for (std::int64_t k = 0; k <= n; ++k) {
      fbar = std::max(fbar, std::fabs(barrier_eval(family, n, k)));
      gbar = std::max(gbar, std::fabs(barrier_eval(family, n, n - k) - fn));
      const double e = env(static_cast<double>(k));
      if (std::max(fbar, gbar) > e + 1e-12 * (1.0 + std::fabs(e))) return false;
    }
  }
  return true;
}

double default_barrier_margin(const CumulantHandle& handle, const LambdaSolution& sol) {
  const int d = sol.dimension;
  const double psi = sol.psi_lambda;
  // The barrier numerator is smallest at s = t; beyond s* it only grows.
  double lowest = 0.0;
  const double s_star = d < 4 ? (4.0 - d) / (2.0 * psi) + 2.0 : 1.0;
  for (std::int64_t s = 0; s <= static_cast<std::int64_t>(std::ceil(s_star)); ++s)
    lowest = std::min(lowest, psi * s + 0.5 * (d - 4) * std::log1p(static_cast<double>(s)));
  const double median = radial_median(handle.law().radial, d);
  return 1.01 * std::max({1.0, sol.lambda, sol.lambda * median, -lowest});
}

Summability check_summability(const std::function<double(double)>& f, std::int64_t horizon,
                              double tol) {
  Summability out;
  if (horizon < 1) return out;
  out.partial_sums.reserve(horizon);
  double sum = 0.0;
  for (std::int64_t m = 1; m <= horizon; ++m) {
    const double x = static_cast<double>(m);
    sum += f(x) / (x * std::sqrt(x));
    out.partial_sums.push_back(sum);
  }
  const double half = out.partial_sums[horizon / 2 == 0 ? 0 : horizon / 2 - 1];
  const double block = sum - (horizon >= 2 ? half : 0.0);
  out.converged = sum == 0.0 || std::fabs(block) < tol * std::fabs(sum);

  double dsum = 0.0;
  double last = 0.0;
  for (std::int64_t j = 0; (std::int64_t{1} << j) <= horizon; ++j) {
    const double x = std::ldexp(1.0, static_cast<int>(j));
    last = f(x) / std::sqrt(x);
    dsum += last;
    out.dyadic_partial_sums.push_back(dsum);
  }
  out.dyadic_converged = dsum == 0.0 || std::fabs(last) < tol * std::fabs(dsum);
  return out;
}

// --------------------------------------------------------- ballot probability

BallotEstimate ballot_probability(const WalkLaw& walk, const BarrierFamily& family, double a,
                                  double b, std::int64_t n, std::uint64_t replicas,
                                  std::uint64_t seed, const BallotOptions& options) {
  if (n < 1) raise(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(options.width > 0)) raise(ErrorKind::InvalidArgument, "window width must be positive");
  std::vector<double> lo(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) lo[k] = barrier_eval(family, n, k) - a;
  const double w0 = lo[n] + b;
  const double w1 = w0 + options.width;
  if (std::isfinite(walk.support_min()) && w1 < static_cast<double>(n) * walk.support_min())
    raise(ErrorKind::WindowEmpty, "terminal window below the reachable range");

  const bool glued = n >= 2 && (options.method == BallotMethod::Glued ||
                                (options.method == BallotMethod::Auto && n > options.glue_threshold));
  BallotEstimate out;
  out.glued = glued;
  const double scale = std::pow(static_cast<double>(n), 1.5) / ((a + 1) * (b + 1));

  if (lo[0] > 0.0) {
    out.raw = {0.0, 0.0, replicas};
    return out;
  }

  if (!glued) {
    auto stats = replica_stats(replicas, [&](std::uint64_t r) {
      RandomStream rng({seed, r, 0});
      double s = 0.0;
      for (std::int64_t k = 1; k <= n; ++k) {
        s += walk.sample(rng);
        if (s < lo[k]) return 0.0;
      }
      return (s >= w0 && s <= w1) ? 1.0 : 0.0;
    });
    out.raw = stats.to_estimate();
    out.normalized = out.raw.estimate * scale;
    return out;
  }

  const std::int64_t tail = (n + 2) / 3;
  const std::int64_t head = n - tail - 1;  // forward steps before the joining step
  const std::uint64_t k_side = std::max<std::uint64_t>(options.block, 1);
  const std::uint64_t blocks = std::max<std::uint64_t>(replicas / (2 * k_side), 2);
  const double cutoff = density_cutoff(walk);

  auto parts = map_chunks(blocks, 1, [&](std::uint64_t begin, std::uint64_t end) {
    RunningStats s;
    std::vector<double> fwd, bwd;
    for (std::uint64_t blk = begin; blk < end; ++blk) {
      fwd.clear();
      bwd.clear();
      for (std::uint64_t j = 0; j < k_side; ++j) {
        RandomStream rng({seed, blk, static_cast<std::uint32_t>(2 * j)});
        double x = 0.0;
        bool alive = true;
        for (std::int64_t k = 1; k <= head && alive; ++k) {
          x += walk.sample(rng);
          alive = x >= lo[k];
        }
        if (alive) fwd.push_back(x);
      }
      for (std::uint64_t j = 0; j < k_side; ++j) {
        RandomStream rng({seed, blk, static_cast<std::uint32_t>(2 * j + 1)});
        double x = w0 + options.width * rng.uniform_open();
        bool alive = true;
        for (std::int64_t i = 1; i <= tail && alive; ++i) {
          x -= walk.sample(rng);
          alive = x >= lo[n - i];
        }
        if (alive) bwd.push_back(x);
      }
      std::sort(fwd.begin(), fwd.end());
      double total = 0.0;
      for (double y : bwd) {
        auto first = std::lower_bound(fwd.begin(), fwd.end(), y - cutoff);
        auto last = std::upper_bound(fwd.begin(), fwd.end(), y + cutoff);
        for (auto it = first; it != last; ++it) total += walk.density(y - *it);
      }
      const double kk = static_cast<double>(k_side);
      s.add(options.width * total / (kk * kk));
    }
    return s;
  });
  const RunningStats stats = merge_all(parts);
  out.raw = {stats.mean(), stats.std_error(), blocks * 2 * k_side};
  out.normalized = out.raw.estimate * scale;
  return out;
}

// ------------------------------------------------------- survival and tails

SurvivalEstimate barrier_survival(const WalkLaw& walk, const std::function<double(double)>& f,
                                  double a, std::int64_t n, std::uint64_t replicas,
                                  std::uint64_t seed, std::int64_t n_f) {
  if (n < 1) raise(ErrorKind::InvalidArgument, "n must be >= 1");
  std::vector<double> fk(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) fk[k] = f(static_cast<double>(k));

  struct Pair {
    RunningStats lower, upper;
  };
  auto parts = map_chunks(replicas, 4096, [&](std::uint64_t begin, std::uint64_t end) {
    Pair p;
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream rng({seed, r, 0});
      bool lower = true;
      bool upper = true;
      double s = 0.0;
      for (std::int64_t k = 1; k <= n && (lower || upper); ++k) {
        s += walk.sample(rng);
        if (k >= n_f && s < fk[k] - a) lower = false;
        if (s < -fk[k] - a) upper = false;
      }
      p.lower.add(lower);
      p.upper.add(upper);
    }
    return p;
  });
  RunningStats lower, upper;
  for (const auto& p : parts) {
    lower.merge(p.lower);
    upper.merge(p.upper);
  }
  SurvivalEstimate out;
  out.lower = lower.to_estimate();
  out.upper = upper.to_estimate();
  const double scale = std::sqrt(static_cast<double>(n)) / (a + 1);
  out.lower_normalized = out.lower.estimate * scale;
  out.upper_normalized = out.upper.estimate * scale;
  return out;
}

TailEstimate hitting_time_tail(const WalkLaw& walk, double a, std::int64_t n,
                               std::uint64_t replicas, std::uint64_t seed) {
  if (n < 1) raise(ErrorKind::InvalidArgument, "n must be >= 1");
  auto stats = replica_stats(replicas, [&](std::uint64_t r) {
    RandomStream rng({seed, r, 0});
    double s = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) {
      s += walk.sample(rng);
      if (s < -a) return 0.0;
    }
    return 1.0;
  });
  TailEstimate out;
  out.raw = stats.to_estimate();
  out.normalized = out.raw.estimate * std::sqrt(static_cast<double>(n)) / (a + 1);
  return out;
}

// ------------------------------------------------------------------ ladder

namespace {

struct Ladder {
  std::uint64_t epoch;
  double height;
};

std::optional<Ladder> next_ladder(const WalkLaw& walk, RandomStream& rng,
                                  std::uint64_t max_steps) {
  double s = 0.0;
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    s += walk.sample(rng);
    if (s > 0.0) return Ladder{k, s};
  }
  return std::nullopt;
}

EstimateCI size_biased_bound(const std::vector<double>& h, double eps) {
  const double n = static_cast<double>(h.size());
  if (h.size() < 2) return {};
  double m1 = 0, m2 = 0, m3 = 0;
  for (double x : h) {
    m1 += x;
    m2 += x * x;
    m3 += std::pow(x, 2 + eps);
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  double c[3][3] = {};
  for (double x : h) {
    const double v[3] = {x - m1, x * x - m2, std::pow(x, 2 + eps) - m3};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[i][j] += v[i] * v[j];
  }
  const double ratio = m2 / m1;
  const double bound = m3 / m1 + std::pow(ratio, 1 + eps);
  const double g[3] = {-m3 / (m1 * m1) - (1 + eps) * std::pow(ratio, eps) * m2 / (m1 * m1),
                       (1 + eps) * std::pow(ratio, eps) / m1, 1.0 / m1};
  double var = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var += g[i] * g[j] * c[i][j] / (n - 1);
  return {bound, std::sqrt(std::max(var, 0.0) / n), h.size()};
}

}  // namespace

LadderReport ladder_overshoot(const WalkLaw& walk, const std::vector<double>& levels,
                              std::uint64_t replicas, std::uint64_t seed,
                              std::uint64_t max_steps) {
  for (double b : levels)
    if (!(b >= 0)) raise(ErrorKind::InvalidArgument, "levels must be >= 0");
  LadderReport out;
  out.epsilon = walk.epsilon();
  auto& rec = out.record;
  rec.levels = levels;

  struct First {
    std::vector<std::uint64_t> epochs;
    std::vector<double> heights;
    std::uint64_t truncated = 0;
  };
  auto firsts = map_chunks(replicas, 1024, [&](std::uint64_t begin, std::uint64_t end) {
    First f;
    for (std::uint64_t r = begin; r < end; ++r) {
      RandomStream rng({seed, r, 0});
      if (auto l = next_ladder(walk, rng, max_steps)) {
        f.epochs.push_back(l->epoch);
        f.heights.push_back(l->height);
      } else {
        ++f.truncated;
      }
    }
    return f;
  });
  for (auto& f : firsts) {
    rec.epochs.insert(rec.epochs.end(), f.epochs.begin(), f.epochs.end());
    rec.heights.insert(rec.heights.end(), f.heights.begin(), f.heights.end());
    rec.truncated += f.truncated;
  }

  const EstimateCI bound = size_biased_bound(rec.heights, out.epsilon);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const double b = levels[li];
    struct Over {
      std::vector<double> values;
      std::uint64_t truncated = 0;
    };
    auto parts = map_chunks(replicas, 256, [&](std::uint64_t begin, std::uint64_t end) {
      Over o;
      for (std::uint64_t r = begin; r < end; ++r) {
        RandomStream rng({seed, r, static_cast<std::uint32_t>(1 + li)});
        double record = 0.0;
        for (;;) {
          auto l = next_ladder(walk, rng, max_steps);
          if (!l) {
            ++o.truncated;
            break;
          }
          record += l->height;
          if (record >= b) {
            o.values.push_back(record - b);
            break;
          }
        }
      }
      return o;
    });
    std::vector<double> values;
    RunningStats moment;
    for (auto& o : parts) {
      rec.truncated += o.truncated;
      for (double v : o.values) moment.add(std::pow(v, 1 + out.epsilon));
      values.insert(values.end(), o.values.begin(), o.values.end());
    }
    rec.overshoots.push_back(std::move(values));
    OvershootRow row;
    row.level = b;
    row.moment = moment.to_estimate();
    row.bound = bound;
    row.z = z_score(row.moment, row.bound);
    out.table.push_back(row);
  }
  return out;
}

// ---------------------------------------------------- barrier split scan

double colic_g(const LambdaSolution& sol, double margin, double epsilon, std::int64_t t,
               double y, std::int64_t s) {
  const double f = barrier_eval(front_barrier(sol, margin, y), t, s);
  const double onset =
      epsilon > 0 ? std::pow(margin / (epsilon * sol.lambda), 5.0 / 3.0) : kInf;
  const double sd = static_cast<double>(s);
  double g = f;
  if (sd > onset)
    g -= epsilon * std::pow(static_cast<double>(std::min(s, t - s)), 0.4);
  else
    g -= margin / sol.lambda;
  if (s == t) g -= 0.5;
  return g;
}

double colic_h(const LambdaSolution& sol, double margin, double epsilon, std::int64_t t,
               std::int64_t s) {
  const double grow = epsilon * std::min(std::pow(static_cast<double>(s), 0.6),
                                         std::sqrt(static_cast<double>(t)));
  return std::max(grow, margin / sol.lambda);
}

ColicReport colic_check(const LambdaSolution& sol, double margin, double epsilon,
                        const std::vector<std::int64_t>& t_range) {
  if (!(epsilon >= 0)) raise(ErrorKind::InvalidArgument, "epsilon must be >= 0");
  ColicReport out;
  out.min_slack = kInf;
  for (std::int64_t t : t_range) {
    for (double y : {1.0, std::sqrt(static_cast<double>(t))}) {
      for (std::int64_t s = 0; s <= t; ++s) {
        const double f = barrier_eval(front_barrier(sol, margin, y), t, s);
        const double g = colic_g(sol, margin, epsilon, t, y, s);
        const double h = colic_h(sol, margin, epsilon, t, s);
        const double slack = (f - g) * (f + g) - h * h;
        if (slack < 0) ++out.violations;
        if (slack < out.min_slack) {
          out.min_slack = slack;
          out.worst_t = t;
          out.worst_s = s;
          out.worst_y = y;
        }
      }
    }
  }
  out.pass = out.violations == 0;
  return out;
}

}  // namespace brwlab

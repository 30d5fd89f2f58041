// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner: one PASS/FAIL line per criterion, details indented
// below it. Arguments select criteria by number (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "brwlab/ballot.hpp"
#include "brwlab/cli.hpp"
#include "brwlab/cumulant.hpp"
#include "brwlab/error.hpp"
#include "brwlab/geometry.hpp"
#include "brwlab/manytofew.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/sphere.hpp"
#include "brwlab/stats.hpp"

namespace fs = std::filesystem;
using namespace brwlab;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> lines;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string f(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

OffspringLaw gaussian(int d) {
  OffspringLaw law;
  law.dimension = d;
  law.count = FixedCount{2};
  law.radial = ChiRadius{1.0};
  return law;
}

std::vector<std::pair<std::string, OffspringLaw>> law_families() {
  std::vector<std::pair<std::string, OffspringLaw>> out;
  out.emplace_back("fixed(2)/chi d=2", gaussian(2));
  OffspringLaw b;
  b.dimension = 3;
  b.count = BinaryCount{0.75};
  b.radial = ExponentialRadius{1.0};
  out.emplace_back("binary(0.75)/exponential d=3", b);
  OffspringLaw p;
  p.dimension = 4;
  p.count = PoissonCount{2.0, false};
  p.radial = UniformRadius{1.0};
  out.emplace_back("poisson(2)/uniform d=4", p);
  OffspringLaw g;
  g.dimension = 2;
  g.count = GeometricCount{0.4};
  g.radial = AtomRadius{1.0};
  out.emplace_back("geometric(0.4)/atom d=2", g);
  return out;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0 ? *hi / *lo : INFINITY;
}

// ------------------------------------------------------------------ 1

Verdict criterion_1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = solve_lambda(CumulantHandle(gaussian(2)));
  const double exact = std::sqrt(2 * std::numbers::ln2);
  v.expect(std::fabs(g.lambda - exact) <= 1e-8, f("gaussian m=2: lambda=%.12f, |lambda - sqrt(2 ln 2)|=%.2e", g.lambda,
                                                  std::fabs(g.lambda - exact)));
  for (const auto& [name, law] : law_families()) {
    const CumulantHandle h(law);
    const auto sol = solve_lambda(h);
    const auto p = psi(h, sol.lambda);
    const double residual = std::fabs(sol.lambda * p.psi_prime - p.psi);
    v.expect(residual < 1e-10, f("%s: lambda=%.10f residual=%.2e", name.c_str(), sol.lambda, residual));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 1.0, f("runtime %.3f s < 1 s", secs));
  return v;
}

// ------------------------------------------------------------------ 2

Verdict criterion_2() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& [name, law] : law_families()) {
    const CumulantHandle h(law);
    const auto sol = solve_lambda(h);
    const double ln_m = std::log(h.mean_offspring());
    const auto at = rate_function(h, sol.gamma);
    auto central = [&](double step) {
      return (rate_function(h, sol.gamma + step).value - rate_function(h, sol.gamma - step).value) / (2 * step);
    };
    const double hstep = 1e-2 * std::max(1.0, sol.gamma);
    const double fd = (4 * central(hstep / 2) - central(hstep)) / 3;
    v.expect(std::fabs(at.value - ln_m) <= 1e-6,
             f("%s: I1(gamma)=%.10f ln m=%.10f", name.c_str(), at.value, ln_m));
    v.expect(std::fabs(fd - sol.lambda) <= 1e-6 && std::fabs(at.derivative - sol.lambda) <= 1e-6,
             f("%s: I1'(gamma) fd=%.10f reported=%.10f lambda=%.10f", name.c_str(), fd, at.derivative, sol.lambda));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 10.0, f("runtime %.2f s < 10 s", secs));
  return v;
}

// ---------------------------------------------------------------- 3, 4

std::vector<std::pair<std::string, OffspringLaw>> two_laws() {
  OffspringLaw p;
  p.dimension = 3;
  p.count = PoissonCount{2.0, false};
  p.radial = ExponentialRadius{1.0};
  return {{"fixed(2)/chi d=2", gaussian(2)}, {"poisson(2)/exponential d=3", p}};
}

std::vector<PathFunctional> four_functionals(int n, int d) {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(d);
  e1[0] = 1.0;
  return {PathFunctional::constant(n), PathFunctional::endpoint_norm_ball(n, 1.5 * std::sqrt(n)),
          PathFunctional::endpoint_halfspace(n, e1, 0.5 * std::sqrt(n)), PathFunctional::exp_projection(n, 0.5)};
}

Verdict criterion_3() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kReplicas = 1'000'000;
  std::uint64_t seed = 300;
  for (const auto& [name, law] : two_laws()) {
    for (int n = 1; n <= 3; ++n) {
      const auto funs = four_functionals(n, law.dimension);
      const auto lhs = mto_lhs(law, funs, kReplicas, seed++);
      const auto rhs = mto_rhs(law, funs, kReplicas, seed++);
      for (std::size_t i = 0; i < funs.size(); ++i) {
        const double z = z_score(lhs[i], rhs[i]);
        v.expect(std::fabs(z) <= 4.0, f("%s n=%d %s: lhs=%.6g+-%.2g rhs=%.6g+-%.2g z=%.2f", name.c_str(), n,
                                        funs[i].name().c_str(), lhs[i].estimate, lhs[i].std_error, rhs[i].estimate,
                                        rhs[i].std_error, z));
      }
      if (std::holds_alternative<FixedCount>(law.count)) {
        const double mn = std::pow(2.0, n);
        v.expect(lhs[0].estimate == mn && rhs[0].estimate == mn && lhs[0].std_error == 0 && rhs[0].std_error == 0,
                 f("%s n=%d f=1 exact: lhs=%.17g rhs=%.17g m^n=%g", name.c_str(), n, lhs[0].estimate,
                   rhs[0].estimate, mn));
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 600, f("runtime %.1f s < 600 s", secs));
  return v;
}

Verdict criterion_4() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kReplicas = 1'000'000;
  std::uint64_t seed = 400;
  double control_max = 0.0;
  for (const auto& [name, law] : two_laws()) {
    for (int n = 1; n <= 3; ++n) {
      const auto funs = four_functionals(n, law.dimension);
      for (const auto& fun : funs) {
        const PairFunctional pair{fun, fun};
        const auto lhs = mtt_lhs(law, pair, kReplicas, seed++);
        const auto rhs = mtt_rhs(law, pair, kReplicas, seed++, SpineMode::Pair);
        const auto ctl = mtt_rhs(law, pair, kReplicas, seed++, SpineMode::Independent);
        const double z = z_score(lhs, rhs), zc = z_score(lhs, ctl);
        if (fun.kind != PathFunctional::Kind::Constant) control_max = std::max(control_max, std::fabs(zc));
        v.expect(std::fabs(z) <= 4.0, f("%s n=%d %s^2: lhs=%.6g+-%.2g rhs=%.6g+-%.2g z=%.2f control z=%.1f",
                                        name.c_str(), n, fun.name().c_str(), lhs.estimate, lhs.std_error,
                                        rhs.estimate, rhs.std_error, z, zc));
        if (fun.kind == PathFunctional::Kind::Constant && std::holds_alternative<FixedCount>(law.count)) {
          v.expect(lhs.std_error == 0 && rhs.std_error == 0 && lhs.estimate == rhs.estimate,
                   f("%s n=%d f=1 exact: lhs=%.17g rhs=%.17g", name.c_str(), n, lhs.estimate, rhs.estimate));
        }
      }
    }
  }
  v.expect(control_max > 4.0, f("independent-walk control: max |z| over correlated functionals = %.1f > 4", control_max));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 1200, f("runtime %.1f s < 1200 s", secs));
  return v;
}

// ------------------------------------------------------------------ 5

Verdict criterion_5() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kReplicas = 10'000'000;
  const WalkLaw walk = WalkLaw::normal();
  const BarrierFamily family = LogBarrier{1.0, 0.0};
  std::vector<double> band;
  std::uint64_t seed = 500;
  for (std::int64_t n : {64, 256, 1024}) {
    const auto e = ballot_probability(walk, family, 1, 1, n, kReplicas, seed++);
    band.push_back(e.normalized);
    v.note(f("n=%lld: p=%.4e+-%.1e normalized=%.4f (%s)", static_cast<long long>(n), e.raw.estimate,
             e.raw.std_error, e.normalized, e.glued ? "glued" : "plain"));
  }
  v.expect(spread(band) <= 2.0, f("band max/min over n in {64,256,1024}: %.3f <= 2", spread(band)));

  BallotOptions glued;
  glued.method = BallotMethod::Glued;
  const auto ref = ballot_probability(walk, family, 1, 1, 256, kReplicas, seed++, glued);
  double worst = 1.0;
  for (double a : {0.0, 1.0, 3.0}) {
    std::string row;
    for (double b : {0.0, 1.0, 3.0}) {
      const auto e = ballot_probability(walk, family, a, b, 256, kReplicas, seed++, glued);
      const double ratio = (e.raw.estimate / ref.raw.estimate) / ((a + 1) * (b + 1) / 4.0);
      worst = std::max({worst, ratio, 1.0 / ratio});
      row += f(" b=%g:%.3f", b, ratio);
    }
    v.note(f("profile ratio at n=256, a=%g:%s", a, row.c_str()));
  }
  v.expect(worst <= 1.5, f("(a+1)(b+1) profile max deviation %.3f <= 1.5", worst));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 1800, f("runtime %.1f s < 1800 s", secs));
  return v;
}

// ------------------------------------------------------------------ 6

Verdict criterion_6() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kReplicas = 1'000'000;
  std::uint64_t seed = 600;
  for (const auto& walk : {WalkLaw::normal(), WalkLaw::laplace(1.0)}) {
    for (const auto& [ename, env] : std::vector<std::pair<std::string, BarrierFamily>>{
             {"zero", ZeroBarrier{}}, {"log", LogBarrier{1.0, 0.0}}}) {
      const auto fn = barrier_envelope(env);
      std::vector<double> lower, upper;
      for (std::int64_t n : {100, 400, 1600}) {
        const auto e = barrier_survival(walk, fn, 1.0, n, kReplicas, seed++);
        lower.push_back(e.lower_normalized);
        upper.push_back(e.upper_normalized);
      }
      v.expect(spread(lower) <= 2.0 && spread(upper) <= 2.0,
               f("%s %s envelope: lower %.4f/%.4f/%.4f (spread %.3f), upper %.4f/%.4f/%.4f (spread %.3f)",
                 walk.name().c_str(), ename.c_str(), lower[0], lower[1], lower[2], spread(lower), upper[0], upper[1],
                 upper[2], spread(upper)));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 600, f("runtime %.1f s < 600 s", secs));
  return v;
}

// ------------------------------------------------------------------ 7

Verdict criterion_7() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t seed = 700;
  for (const auto& walk : {WalkLaw::normal(), WalkLaw::laplace(1.0)}) {
    const auto rep = ladder_overshoot(walk, {0, 2, 5, 10}, 100'000, seed++);
    for (const auto& row : rep.table) {
      v.expect(row.z <= 4.0, f("%s b=%g: E O^(1+eps)=%.4f+-%.1e bound=%.4f+-%.1e z=%.1f (eps=%g)", walk.name().c_str(),
                               row.level, row.moment.estimate, row.moment.std_error, row.bound.estimate,
                               row.bound.std_error, row.z, rep.epsilon));
    }
    if (rep.record.truncated > 0) v.note(f("%s: %llu truncated excursions", walk.name().c_str(),
                                           static_cast<unsigned long long>(rep.record.truncated)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 300, f("runtime %.1f s < 300 s", secs));
  return v;
}

// ------------------------------------------------------------------ 8

Verdict criterion_8() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kCap = 1'000'000;
  constexpr std::size_t kRuns = 25;
  std::vector<int> times;
  for (int t = 100; t <= 400; t += 10) times.push_back(t);
  const auto index = [&](int t) { return static_cast<std::size_t>(std::find(times.begin(), times.end(), t) - times.begin()); };
  for (int d : {2, 3}) {
    const auto study = front_study(gaussian(d), times, kCap, kRuns, 800 + d);
    const double gamma = study.solution.gamma;
    const double med200 = stats::quantile(study.radii[index(200)], 0.5);
    const double speed_err = std::fabs(med200 / 200.0 / gamma - 1.0);
    v.expect(speed_err <= 0.03, f("d=%d: median R_200/200 = %.5f, gamma = %.5f, relative error %.4f <= 0.03", d,
                                  med200 / 200.0, gamma, speed_err));
    const double iqr200 = residual_iqr(study, index(200)), iqr400 = residual_iqr(study, index(400));
    const double change = std::fabs(iqr400 / iqr200 - 1.0);
    v.expect(change < 0.25, f("d=%d: IQR(R_t - r_t) t=200: %.3f, t=400: %.3f, change %.3f < 0.25", d, iqr200,
                              iqr400, change));
    const auto drift = drift_comparison(study, 100);
    v.expect(drift.reduction >= 0.5,
             f("d=%d: median slope vs gamma t %.5f, vs r_t %.5f, reduction %.3f >= 0.5", d, drift.slope_linear,
               drift.slope_front, drift.reduction));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 3600, f("runtime %.0f s < 3600 s (cap %llu, %zu runs per d)", secs,
                          static_cast<unsigned long long>(kCap), kRuns));
  return v;
}

// ------------------------------------------------------------------ 9

Verdict criterion_9() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t seed = 900;
  for (int d : {2, 3}) {
    const auto law = gaussian(d);
    const auto sol = solve_lambda(CumulantHandle(law));
    std::vector<double> values;
    std::string row;
    for (double y : {1.0, 3.0}) {
      for (int t : {50, 100, 200}) {
        const auto e = first_moment_cap_count(law, sol, t, y, 1'000'000, seed++);
        values.push_back(e.normalized);
        row += f(" (t=%d,y=%g):%.4f", t, y, e.normalized);
      }
    }
    v.note(f("d=%d normalized:%s", d, row.c_str()));
    v.expect(spread(values) <= 2.0, f("d=%d: max/min over t in {50,100,200}, y in {1,3} = %.3f <= 2", d, spread(values)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 1800, f("runtime %.1f s < 1800 s", secs));
  return v;
}

// ----------------------------------------------------------------- 10

Verdict criterion_10() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::uint64_t kTrials = 10'000;
  std::uint64_t passed = 0;
  for (std::uint64_t i = 0; i < kTrials; ++i) {
    RandomStream rng({1000, i, 0});
    const double a = 10 * rng.uniform_open(), b = 10 * rng.uniform_open();
    const double alpha = std::numbers::pi / 2 * rng.uniform_open();
    passed += verify_trig_bound(a, b, alpha).pass ? 1 : 0;
  }
  v.expect(passed == kTrials, f("trigonometric bound: %llu / %llu random trials pass",
                                static_cast<unsigned long long>(passed), static_cast<unsigned long long>(kTrials)));
  for (int d : {2, 3}) {
    const CumulantHandle h(gaussian(d));
    const auto sol = solve_lambda(h);
    const double margin = default_barrier_margin(h, sol);
    const auto split = colic_check(sol, margin, 0.1, {100, 1000, 10000});
    v.expect(split.pass, f("d=%d barrier split scan, eps=0.1, M=%.4f, t in {1e2,1e3,1e4}: min slack %.4g, %llu violations",
                           d, margin, split.min_slack, static_cast<unsigned long long>(split.violations)));
    const double s = 200;
    const auto gc = verify_gain_cost_optimum(h, sol.gamma * s, s, sol.lambda, 0.1);
    v.expect(gc.max_at_reference && gc.pass,
             f("d=%d gain/cost grid: max %.4f at alpha=%.3f, reference value %.4f, at reference: %s, deficit %.3f vs "
               "bound %.3f",
               d, gc.grid_max, gc.argmax_alpha, gc.h_reference, gc.max_at_reference ? "yes" : "no",
               gc.half_radius_deficit, gc.half_radius_bound));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs < 300, f("runtime %.1f s < 300 s", secs));
  return v;
}

// ----------------------------------------------------------------- 11

Verdict criterion_11() {
  Verdict v;
  using boost::math::quadrature::gauss_kronrod;
  for (int d = 2; d <= 8; ++d) {
    // x = sin(theta) removes the endpoint singularity at d = 2.
    const double mass = gauss_kronrod<double, 61>::integrate(
        [d](double th) { return projection_density(d, std::sin(th)) * std::cos(th); }, -std::numbers::pi / 2,
        std::numbers::pi / 2, 15, 1e-14);
    v.expect(std::fabs(mass - 1.0) <= 1e-10, f("d=%d: integral of the density - 1 = %.2e", d, mass - 1.0));
  }
  for (int d : {2, 3, 5, 8}) {
    std::vector<double> sample(1'000'000);
    RandomStream rng({1100, static_cast<std::uint64_t>(d), 0});
    for (auto& x : sample) x = sample_sphere_coordinate(d, rng);
    const double a = 0.5 * (d - 1);
    const auto ks = stats::ks_one_sample(sample, [a](double x) {
      if (x <= -1) return 0.0;
      if (x >= 1) return 1.0;
      return boost::math::ibeta(a, a, 0.5 * (x + 1));
    });
    v.expect(ks.p_value > 0.01, f("d=%d sampler, 1e6 draws: KS D=%.2e p=%.3f", d, ks.statistic, ks.p_value));
  }
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -0.9995 + 1.999 * i / 2000.0;
    worst = std::max({worst, std::fabs(projection_density(3, x) - 0.5), std::fabs(projection_cdf(3, x) - 0.5 * (x + 1))});
  }
  v.expect(worst <= 1e-14, f("d=3 uniform on [-1,1]: max deviation of density and CDF %.1e", worst));
  return v;
}

// ----------------------------------------------------------------- 12

Verdict criterion_12() {
  Verdict v;
  for (int d : {3, 4}) {
    std::vector<double> lr, ls;
    for (double R : {4.0, 16.0, 64.0}) {
      const auto set = cap_cover(d, R);
      const double cov = cover_fraction(set);
      v.expect(cov == 1.0, f("cap_cover d=%d R=%g: %zu directions, probe coverage %.6f", d, R, set.size(), cov));
      lr.push_back(std::log(R));
      ls.push_back(std::log(static_cast<double>(set.size())));
    }
    const double ratio = stats::ols_slope(lr, ls) / (0.5 * (d - 1));
    v.expect(ratio <= 2 && ratio >= 0.5, f("cap_cover d=%d: fitted exponent / ((d-1)/2) = %.3f", d, ratio));

    std::vector<double> lt, lg;
    const auto t_values = d == 3 ? std::vector<double>{100, 400, 1600} : std::vector<double>{16, 36, 100};
    for (double t : t_values) {
      const auto set = separated_grid(d, t, 1.0);
      const double dmin = min_pairwise_distance(set);
      v.expect(dmin >= 1.0 / std::sqrt(t), f("separated_grid d=%d t=%g: %zu points, min distance %.6g >= %.6g", d, t,
                                             set.size(), dmin, 1.0 / std::sqrt(t)));
      lt.push_back(std::log(t));
      lg.push_back(std::log(static_cast<double>(set.size())));
    }
    const double gratio = stats::ols_slope(lt, lg) / (0.5 * (d - 1));
    v.expect(gratio <= 2 && gratio >= 0.5, f("separated_grid d=%d: fitted exponent / ((d-1)/2) = %.3f", d, gratio));
  }
  return v;
}

// ----------------------------------------------------------------- 13

std::vector<json> small_configs() {
  const json law = json::parse(R"({"dimension": 2, "count_law": {"kind": "binary", "params": {"p_two": 0.75}},
                                   "radial_law": {"kind": "chi", "params": {"sigma": 1.0}}, "coupling": "iid"})");
  const json walk = {{"kind", "laplace"}, {"beta", 1.0}};
  const json half = {{"kind", "halfspace"}, {"offset", 0.5}};
  return {
      {{"kind", "front"}, {"seed", 1}, {"law", law}, {"replicas", 1000}, {"params", {{"t_max", 12}, {"cap", 500}}}},
      {{"kind", "tightness"}, {"seed", 2}, {"law", law}, {"replicas", 1000},
       {"params", {{"t_values", {10, 20}}, {"cap", 500}, {"slope_from", 10}, {"slope_step", 2}}}},
      {{"kind", "many_to_one"}, {"seed", 3}, {"law", law}, {"replicas", 20000},
       {"params", {{"n", 3}, {"functionals", json::array({{{"kind", "constant"}}, half})}}}},
      {{"kind", "many_to_two"}, {"seed", 4}, {"law", law}, {"replicas", 20000},
       {"params", {{"n", 2}, {"pairs", json::array({{{"first", half}, {"second", half}}})}}}},
      {{"kind", "first_moment"}, {"seed", 5}, {"law", law}, {"replicas", 5000},
       {"params", {{"t_values", {9, 16}}, {"y_values", {1.0, 3.0}}}}},
      {{"kind", "ballot_scaling"}, {"seed", 6}, {"walk", walk}, {"replicas", 4000},
       {"params", {{"n_values", {16, 300}}, {"block", 500}, {"profile", {{"a_values", {0, 1}}, {"b_values", {1}}, {"n", 32}}}}}},
      {{"kind", "barrier_survival"}, {"seed", 7}, {"walk", walk}, {"replicas", 5000}, {"params", {{"n_values", {50, 100}}}}},
      {{"kind", "hitting_tail"}, {"seed", 8}, {"walk", walk}, {"replicas", 5000}, {"params", {{"n_values", {50, 100}}}}},
      {{"kind", "ladder"}, {"seed", 9}, {"walk", walk}, {"replicas", 2000}, {"params", {{"levels", {0.0, 2.0}}}}},
      {{"kind", "geometry_suite"}, {"seed", 10},
       {"params", {{"cover", {{"d", 3}, {"R_values", {4, 16}}}}, {"grid", {{"d", 3}, {"t_values", {100, 400}}}}}}},
      {{"kind", "inequality_suite"}, {"seed", 11},
       {"params", {{"trials", 1000}, {"barrier_split", {{"t_values", {100}}}}, {"gain_cost", {{"radial", 6}, {"angular", 8}}}}}},
  };
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict criterion_13() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "brwlab_acceptance_13";
  fs::remove_all(root);
  const int saved = thread_count();
  for (const auto& doc : small_configs()) {
    const auto cfg = parse_config(doc);
    std::vector<std::vector<std::pair<std::string, std::string>>> outputs;
    for (int threads : {1, 8}) {
      set_thread_count(threads);
      const auto outcome = run_experiment(cfg, root / std::to_string(threads));
      std::vector<std::pair<std::string, std::string>> csvs;
      for (const auto& file : outcome.files)
        if (file.ends_with(".csv")) csvs.emplace_back(file, slurp(outcome.directory / file));
      outputs.push_back(std::move(csvs));
    }
    std::size_t bytes = 0;
    for (const auto& [_, text] : outputs[0]) bytes += text.size();
    v.expect(!outputs[0].empty() && outputs[0] == outputs[1],
             f("%s: %zu CSV files, %zu bytes, identical at 1 and 8 threads", cfg.kind.c_str(), outputs[0].size(), bytes));
  }
  set_thread_count(saved);
  fs::remove_all(root);
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "lambda solver", criterion_1},
      {2, "rate function identities", criterion_2},
      {3, "many-to-one identity", criterion_3},
      {4, "many-to-two identity and negative control", criterion_4},
      {5, "ballot scaling and (a+1)(b+1) profile", criterion_5},
      {6, "barrier survival stability", criterion_6},
      {7, "overshoot moments under the ladder bound", criterion_7},
      {8, "front: first order, tightness proxy, drift", criterion_8},
      {9, "first-moment cap count scaling", criterion_9},
      {10, "deterministic inequality suites", criterion_10},
      {11, "projection law", criterion_11},
      {12, "direction set geometry", criterion_12},
      {13, "determinism across thread counts", criterion_13},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " ("
              << f("%.1f", secs) << " s)\n";
    for (const auto& line : v.lines) std::cout << "    " << line << '\n';
    std::cout.flush();
    failures += v.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

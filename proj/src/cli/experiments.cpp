// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "brwlab/brw.hpp"
#include "brwlab/error.hpp"
#include "brwlab/geometry.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/stats.hpp"
#include "internal.hpp"

namespace brwlab {

FrontStudy front_study(const OffspringLaw& law, const std::vector<int>& times, std::uint64_t cap,
                       std::size_t runs, std::uint64_t seed) {
  FrontStudy study;
  study.solution = solve_lambda(CumulantHandle(law));
  study.times = times;
  const int t_max = times.empty() ? 0 : *std::max_element(times.begin(), times.end());
  const auto batch = conditioned_runs(law, t_max, cap, runs, seed);
  study.acceptance = batch.acceptance;
  study.radii.assign(times.size(), {});
  for (std::size_t i = 0; i < times.size(); ++i) {
    study.radii[i].reserve(batch.runs.size());
    for (const auto& run : batch.runs) study.radii[i].push_back(*run.max_radius[times[i]]);
  }
  return study;
}

double residual_iqr(const FrontStudy& study, std::size_t i) {
  return stats::quantile(study.radii[i], 0.75) - stats::quantile(study.radii[i], 0.25);
}

DriftComparison drift_comparison(const FrontStudy& study, int t_from) {
  std::vector<double> ts, linear, front;
  for (std::size_t i = 0; i < study.times.size(); ++i) {
    const int t = study.times[i];
    if (t < t_from || t < 1) continue;
    const double med = stats::quantile(study.radii[i], 0.5);
    ts.push_back(t);
    linear.push_back(med - study.solution.gamma * t);
    front.push_back(med - displacement_front(study.solution, t));
  }
  if (ts.size() < 2) raise(ErrorKind::InvalidArgument, "drift comparison needs two times");
  DriftComparison out;
  out.slope_linear = stats::ols_slope(ts, linear);
  out.slope_front = stats::ols_slope(ts, front);
  out.reduction = 1.0 - std::fabs(out.slope_front) / std::fabs(out.slope_linear);
  return out;
}

namespace cli {

namespace {

const json kEmptyObject = json::object();

bool stopped(const std::atomic<bool>* flag) { return flag != nullptr && flag->load(); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(tag + 1));
}

Reader params_of(const Reader& root) {
  return root.has("params") ? root.child("params") : Reader(kEmptyObject, "params");
}

std::uint64_t read_replicas(const Reader& root) {
  const auto r = root.integer("replicas");
  root.require(r >= 1000, "replicas", "must be at least 1000");
  return static_cast<std::uint64_t>(r);
}

std::vector<std::int64_t> positive_ascending(const Reader& node, const char* key, std::int64_t max,
                                             std::size_t min_size = 1) {
  auto v = node.integers(key);
  node.require(v.size() >= min_size, key, "needs at least " + std::to_string(min_size) + " entries");
  for (std::size_t i = 0; i < v.size(); ++i) {
    node.require(v[i] >= 1 && v[i] <= max, key, "entries must lie in [1, " + std::to_string(max) + "]");
    if (i > 0) node.require(v[i] > v[i - 1], key, "entries must be strictly increasing");
  }
  return v;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo <= 0) return INFINITY;
  return *hi / *lo;
}

std::string label(const std::string& prefix, double v) { return prefix + fmt(v); }

// ---------------------------------------------------------------- front

struct FrontParams {
  OffspringLaw law;
  std::uint64_t runs = 0;
  int t_max = 0;
  std::uint64_t cap = 0;
  double tolerance = 0.03;
};

FrontParams parse_front(const Reader& root) {
  FrontParams p;
  p.law = read_law(root);
  p.runs = read_replicas(root);
  const Reader prm = params_of(root);
  const auto t = prm.integer("t_max");
  prm.require(t >= 1 && t <= 100000, "t_max", "must lie in [1, 100000]");
  p.t_max = static_cast<int>(t);
  const auto cap = prm.integer("cap", 10000);
  prm.require(cap >= 1, "cap", "must be positive");
  p.cap = static_cast<std::uint64_t>(cap);
  p.tolerance = prm.number("speed_tolerance", 0.03);
  prm.require(p.tolerance > 0, "speed_tolerance", "must be positive");
  return p;
}

void run_front(const ExperimentConfig& cfg, const Reader& root, Products& out) {
  const auto p = parse_front(root);
  std::vector<int> times(p.t_max);
  for (int t = 1; t <= p.t_max; ++t) times[t - 1] = t;
  const auto study = front_study(p.law, times, p.cap, p.runs, cfg.seed);
  const auto& sol = study.solution;

  Table table("front", {"t", "median_R", "r_t", "residual", "q10", "q25", "q75", "q90"});
  Plot plot{"R_t - r_t quantiles", "t", "R_t - r_t", false, false, {}};
  const double qs[] = {0.1, 0.25, 0.5, 0.75, 0.9};
  for (double q : qs) plot.series.push_back({"q" + fmt(q * 100), {}, {}, {}, {}});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const int t = times[i];
    const double r_t = displacement_front(sol, t);
    std::vector<double> q(5);
    for (int k = 0; k < 5; ++k) q[k] = stats::quantile(study.radii[i], qs[k]);
    table.row({std::to_string(t), fmt(q[2]), fmt(r_t), fmt(q[2] - r_t), fmt(q[0]), fmt(q[1]), fmt(q[3]), fmt(q[4])});
    for (int k = 0; k < 5; ++k) {
      plot.series[k].x.push_back(t);
      plot.series[k].y.push_back(q[k] - r_t);
    }
  }
  out.tables.push_back(std::move(table));
  out.plots.emplace_back("front_residual_quantiles", std::move(plot));

  const double med = stats::quantile(study.radii.back(), 0.5);
  out.checks.push_back(check_le("speed_error_t" + std::to_string(p.t_max),
                                std::fabs(med / p.t_max / sol.gamma - 1.0), p.tolerance));
}

// ------------------------------------------------------------ tightness

struct TightnessParams {
  OffspringLaw law;
  std::uint64_t runs = 0;
  std::vector<std::int64_t> t_values;
  std::uint64_t cap = 0;
  int slope_from = 1;
  int slope_step = 1;
  double iqr_tolerance = 0.25;
  double drift_reduction = 0.5;
};

TightnessParams parse_tightness(const Reader& root) {
  TightnessParams p;
  p.law = read_law(root);
  p.runs = read_replicas(root);
  const Reader prm = params_of(root);
  p.t_values = positive_ascending(prm, "t_values", 100000, 2);
  const auto cap = prm.integer("cap", 10000);
  prm.require(cap >= 1, "cap", "must be positive");
  p.cap = static_cast<std::uint64_t>(cap);
  const auto t_max = p.t_values.back();
  p.slope_from = static_cast<int>(prm.integer("slope_from", p.t_values.front()));
  prm.require(p.slope_from >= 1 && p.slope_from < t_max, "slope_from", "must lie in [1, max t)");
  p.slope_step = static_cast<int>(prm.integer("slope_step", std::max<std::int64_t>(1, (t_max - p.slope_from) / 30)));
  prm.require(p.slope_step >= 1, "slope_step", "must be positive");
  p.iqr_tolerance = prm.number("iqr_tolerance", 0.25);
  p.drift_reduction = prm.number("drift_reduction", 0.5);
  return p;
}

void run_tightness(const ExperimentConfig& cfg, const Reader& root, Products& out) {
  const auto p = parse_tightness(root);
  std::set<int> grid(p.t_values.begin(), p.t_values.end());
  for (int t = p.slope_from; t <= p.t_values.back(); t += p.slope_step) grid.insert(t);
  const std::vector<int> times(grid.begin(), grid.end());
  const auto study = front_study(p.law, times, p.cap, p.runs, cfg.seed);
  const auto& sol = study.solution;

  Table table("tightness", {"t", "median_R_minus_gamma_t", "median_R_minus_r_t", "q25", "q75", "iqr"});
  Plot plot{"median drift of R_t", "t", "median residual", false, false, {}};
  plot.series = {{"R_t - gamma t", {}, {}, {}, {}}, {"R_t - r_t", {}, {}, {}, {}}};
  std::map<int, double> iqr;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const int t = times[i];
    const double med = stats::quantile(study.radii[i], 0.5);
    const double r_t = displacement_front(sol, t);
    const double q25 = stats::quantile(study.radii[i], 0.25) - r_t;
    const double q75 = stats::quantile(study.radii[i], 0.75) - r_t;
    iqr[t] = q75 - q25;
    table.row({std::to_string(t), fmt(med - sol.gamma * t), fmt(med - r_t), fmt(q25), fmt(q75), fmt(q75 - q25)});
    plot.series[0].x.push_back(t);
    plot.series[0].y.push_back(med - sol.gamma * t);
    plot.series[1].x.push_back(t);
    plot.series[1].y.push_back(med - r_t);
  }
  out.tables.push_back(std::move(table));
  out.plots.emplace_back("tightness_drift", std::move(plot));

  for (std::size_t i = 1; i < p.t_values.size(); ++i) {
    const int a = static_cast<int>(p.t_values[i - 1]), b = static_cast<int>(p.t_values[i]);
    out.checks.push_back(check_le("iqr_change_t" + std::to_string(a) + "_t" + std::to_string(b),
                                  std::fabs(iqr[b] / iqr[a] - 1.0), p.iqr_tolerance));
  }
  const auto drift = drift_comparison(study, p.slope_from);
  out.checks.push_back(check_ge("median_drift_reduction", drift.reduction, p.drift_reduction));
}

// ----------------------------------------------------------- many_to_one

struct MtoParams {
  OffspringLaw law;
  std::uint64_t replicas = 0;
  int n = 1;
  std::vector<PathFunctional> functionals;
  double z_max = 4.0;
};

MtoParams parse_mto(const Reader& root) {
  MtoParams p;
  p.law = read_law(root);
  p.replicas = read_replicas(root);
  const Reader prm = params_of(root);
  p.n = static_cast<int>(prm.integer("n"));
  prm.require(p.n >= 1 && p.n <= 12, "n", "must lie in [1, 12]");
  if (prm.has("functionals")) {
    for (const auto& f : prm.children("functionals")) p.functionals.push_back(read_functional(f, p.n, p.law.dimension));
    prm.require(!p.functionals.empty(), "functionals", "must not be empty");
  } else {
    p.functionals.push_back(PathFunctional::constant(p.n));
  }
  p.z_max = prm.number("z_max", 4.0);
  return p;
}

void run_mto(const ExperimentConfig& cfg, const Reader& root, Products& out) {
  const auto p = parse_mto(root);
  const auto lhs = mto_lhs(p.law, p.functionals, p.replicas, derive_seed(cfg.seed, 0));
  const auto rhs = mto_rhs(p.law, p.functionals, p.replicas, derive_seed(cfg.seed, 1));
  Table table("many_to_one", {"n", "functional", "lhs", "lhs_se", "rhs", "rhs_se", "z"});
  for (std::size_t i = 0; i < p.functionals.size(); ++i) {
    const std::string name = "f" + std::to_string(i) + "_" + p.functionals[i].name();
    const double z = z_score(lhs[i], rhs[i]);
    table.row({std::to_string(p.n), name, fmt(lhs[i].estimate), fmt(lhs[i].std_error), fmt(rhs[i].estimate),
               fmt(rhs[i].std_error), fmt(z)});
    out.checks.push_back(check_le("abs_z_" + name, std::fabs(z), p.z_max));
  }
  out.tables.push_back(std::move(table));
}

// ----------------------------------------------------------- many_to_two

struct MttParams {
  OffspringLaw law;
  std::uint64_t replicas = 0;
  int n = 1;
  std::vector<PairFunctional> pairs;
  bool control = true;
  double z_max = 4.0;
  double control_z = 4.0;
};

MttParams parse_mtt(const Reader& root) {
  MttParams p;
  p.law = read_law(root);
  p.replicas = read_replicas(root);
  const Reader prm = params_of(root);
  p.n = static_cast<int>(prm.integer("n"));
  prm.require(p.n >= 1 && p.n <= 8, "n", "must lie in [1, 8]");
  for (const auto& pair : prm.children("pairs")) {
    p.pairs.push_back({read_functional(pair.child("first"), p.n, p.law.dimension),
                       read_functional(pair.child("second"), p.n, p.law.dimension)});
  }
  prm.require(!p.pairs.empty(), "pairs", "must not be empty");
  p.control = prm.boolean("control", true);
  p.z_max = prm.number("z_max", 4.0);
  p.control_z = prm.number("control_z", 4.0);
  return p;
}

void run_mtt(const ExperimentConfig& cfg, const Reader& root, Products& out,
             const std::atomic<bool>* interrupt) {
  const auto p = parse_mtt(root);
  Table table("many_to_two", {"n", "pair", "lhs", "lhs_se", "rhs", "rhs_se", "z", "control_rhs",
                              "control_se", "control_z"});
  double control_max = 0.0;
  for (std::size_t i = 0; i < p.pairs.size() && !stopped(interrupt); ++i) {
    const auto& pair = p.pairs[i];
    const std::string name = "p" + std::to_string(i) + "_" + pair.first.name() + "_x_" + pair.second.name();
    const auto lhs = mtt_lhs(p.law, pair, p.replicas, derive_seed(cfg.seed, 3 * i));
    const auto rhs = mtt_rhs(p.law, pair, p.replicas, derive_seed(cfg.seed, 3 * i + 1));
    const double z = z_score(lhs, rhs);
    EstimateCI ctl{};
    double cz = 0.0;
    if (p.control) {
      ctl = mtt_rhs(p.law, pair, p.replicas, derive_seed(cfg.seed, 3 * i + 2), SpineMode::Independent);
      cz = z_score(lhs, ctl);
      control_max = std::max(control_max, std::fabs(cz));
    }
    table.row({std::to_string(p.n), name, fmt(lhs.estimate), fmt(lhs.std_error), fmt(rhs.estimate),
               fmt(rhs.std_error), fmt(z), fmt(ctl.estimate), fmt(ctl.std_error), fmt(cz)});
    out.checks.push_back(check_le("abs_z_" + name, std::fabs(z), p.z_max));
  }
  out.tables.push_back(std::move(table));
  if (p.control) out.checks.push_back(check_ge("control_max_abs_z", control_max, p.control_z));
}

// ---------------------------------------------------------- first_moment

struct FirstMomentParams {
  OffspringLaw law;
  std::uint64_t replicas = 0;
  std::vector<std::int64_t> t_values;
  std::vector<double> y_values;
  double margin = NAN;
  double factor = 2.0;
};

FirstMomentParams parse_first_moment(const Reader& root) {
  FirstMomentParams p;
  p.law = read_law(root);
  p.replicas = read_replicas(root);
  const Reader prm = params_of(root);
  p.t_values = positive_ascending(prm, "t_values", 400);
  p.y_values = prm.numbers("y_values");
  for (double y : p.y_values)
    prm.require(y >= 0 && y <= std::sqrt(static_cast<double>(p.t_values.front())), "y_values",
                "entries must lie in [0, sqrt(min t)]");
  if (prm.has("margin")) {
    p.margin = prm.number("margin");
    prm.require(p.margin > 0, "margin", "must be positive");
  }
  p.factor = prm.number("factor", 2.0);
  return p;
}

void run_first_moment(const ExperimentConfig& cfg, const Reader& root, Products& out,
                      const std::atomic<bool>* interrupt) {
  const auto p = parse_first_moment(root);
  const auto sol = solve_lambda(CumulantHandle(p.law));
  Table table("first_moment", {"t", "y", "raw", "raw_se", "normalized", "normalized_se", "margin"});
  Plot plot{"normalized first moment of the cap count", "t", "E#A t^((d-1)/2) e^y / (1+y)", true, true, {}};
  std::vector<double> normalized;
  std::uint64_t tag = 0;
  for (double y : p.y_values) {
    Series s{label("y=", y), {}, {}, {}, {}};
    for (auto t : p.t_values) {
      if (stopped(interrupt)) break;
      const auto e = first_moment_cap_count(p.law, sol, static_cast<int>(t), y, p.replicas,
                                            derive_seed(cfg.seed, tag++), p.margin);
      const double scale = e.normalized / e.raw.estimate;
      const double se = std::isfinite(scale) ? e.raw.std_error * scale : NAN;
      table.row({std::to_string(t), fmt(y), fmt(e.raw.estimate), fmt(e.raw.std_error), fmt(e.normalized), fmt(se),
                 fmt(e.margin)});
      normalized.push_back(e.normalized);
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(e.normalized);
      s.lo.push_back(e.normalized - 2 * se);
      s.hi.push_back(e.normalized + 2 * se);
    }
    plot.series.push_back(std::move(s));
  }
  out.tables.push_back(std::move(table));
  out.plots.emplace_back("first_moment_scaling", std::move(plot));
  if (!normalized.empty()) out.checks.push_back(check_le("normalized_spread", spread(normalized), p.factor));
}

// -------------------------------------------------------- ballot_scaling

struct BallotParams {
  WalkLaw walk = WalkLaw::normal();
  BarrierFamily barrier = LogBarrier{1.0, 0.0};
  std::uint64_t replicas = 0;
  std::vector<std::int64_t> n_values;
  double a = 1.0, b = 1.0;
  double band = 2.0;
  BallotOptions options;
  bool profile = false;
  std::vector<double> profile_a, profile_b;
  std::int64_t profile_n = 256;
  double profile_tolerance = 1.5;
};

BallotParams parse_ballot(const Reader& root) {
  BallotParams p;
  p.walk = read_walk(root);
  p.replicas = read_replicas(root);
  const Reader prm = params_of(root);
  if (prm.has("barrier")) p.barrier = read_barrier(prm.child("barrier"));
  p.n_values = positive_ascending(prm, "n_values", 1 << 20);
  p.a = prm.number("a", 1.0);
  p.b = prm.number("b", 1.0);
  prm.require(p.a >= 0, "a", "must be non-negative");
  prm.require(p.b >= 0, "b", "must be non-negative");
  p.band = prm.number("band", 2.0);
  const std::string method = prm.string("method", "auto");
  if (method == "auto") {
    p.options.method = BallotMethod::Auto;
  } else if (method == "plain") {
    p.options.method = BallotMethod::Plain;
  } else if (method == "glued") {
    p.options.method = BallotMethod::Glued;
  } else {
    config_error(prm.path("method"), "expected auto, plain or glued");
  }
  p.options.block = static_cast<std::uint64_t>(prm.integer("block", 2000));
  prm.require(p.options.block >= 2, "block", "must be at least 2");
  p.options.glue_threshold = prm.integer("glue_threshold", 200);
  if (prm.has("profile")) {
    const Reader pr = prm.child("profile");
    p.profile = true;
    p.profile_a = pr.has("a_values") ? pr.numbers("a_values") : std::vector<double>{0, 1, 3};
    p.profile_b = pr.has("b_values") ? pr.numbers("b_values") : std::vector<double>{0, 1, 3};
    for (double v : p.profile_a) pr.require(v >= 0, "a_values", "entries must be non-negative");
    for (double v : p.profile_b) pr.require(v >= 0, "b_values", "entries must be non-negative");
    p.profile_n = pr.integer("n", 256);
    pr.require(p.profile_n >= 1, "n", "must be positive");
    p.profile_tolerance = pr.number("tolerance", 1.5);
  }
  return p;
}

void run_ballot(const ExperimentConfig& cfg, const Reader& root, Products& out,
                const std::atomic<bool>* interrupt) {
  const auto p = parse_ballot(root);
  Table table("ballot_scaling", {"walk", "barrier", "n", "a", "b", "raw", "raw_se", "normalized", "glued"});
  Series s{"n^1.5 p / ((a+1)(b+1))", {}, {}, {}, {}};
  std::vector<double> normalized;
  std::uint64_t tag = 0;
  const double norm_ab = (p.a + 1) * (p.b + 1);
  for (auto n : p.n_values) {
    if (stopped(interrupt)) break;
    const auto e = ballot_probability(p.walk, p.barrier, p.a, p.b, n, p.replicas, derive_seed(cfg.seed, tag++), p.options);
    const double scale = std::pow(static_cast<double>(n), 1.5) / norm_ab;
    table.row({p.walk.name(), describe_barrier(p.barrier), std::to_string(n), fmt(p.a), fmt(p.b), fmt(e.raw.estimate),
               fmt(e.raw.std_error), fmt(e.normalized), e.glued ? "1" : "0"});
    normalized.push_back(e.normalized);
    s.x.push_back(static_cast<double>(n));
    s.y.push_back(e.normalized);
    s.lo.push_back(e.normalized - 2 * e.raw.std_error * scale);
    s.hi.push_back(e.normalized + 2 * e.raw.std_error * scale);
  }
  out.tables.push_back(std::move(table));
  out.plots.emplace_back("ballot_scaling", Plot{"ballot probability scaling", "n", "normalized", true, true, {s}});
  if (!normalized.empty()) out.checks.push_back(check_le("normalized_spread", spread(normalized), p.band));

  if (!p.profile || stopped(interrupt)) return;
  Table prof("ballot_profile", {"n", "a", "b", "raw", "raw_se", "profile_ratio"});
  const auto ref = ballot_probability(p.walk, p.barrier, p.a, p.b, p.profile_n, p.replicas,
                                      derive_seed(cfg.seed, 1000), p.options);
  double worst = 1.0;
  for (double a : p.profile_a) {
    for (double b : p.profile_b) {
      if (stopped(interrupt)) break;
      const auto e = ballot_probability(p.walk, p.barrier, a, b, p.profile_n, p.replicas,
                                        derive_seed(cfg.seed, tag++), p.options);
      const double ratio = (e.raw.estimate / ref.raw.estimate) / ((a + 1) * (b + 1) / norm_ab);
      worst = std::max(worst, std::max(ratio, 1.0 / ratio));
      prof.row({std::to_string(p.profile_n), fmt(a), fmt(b), fmt(e.raw.estimate), fmt(e.raw.std_error), fmt(ratio)});
    }
  }
  out.tables.push_back(std::move(prof));
  out.checks.push_back(check_le("profile_max_deviation", worst, p.profile_tolerance));
}

// ------------------------------------------------------ barrier_survival

struct SurvivalParams {
  WalkLaw walk = WalkLaw::normal();
  std::uint64_t replicas = 0;
  std::vector<std::int64_t> n_values;
  double a = 1.0;
  std::vector<BarrierFamily> envelopes;
  std::int64_t n_f = 8;
  double factor = 2.0;
};

SurvivalParams parse_survival(const Reader& root) {
  SurvivalParams p;
  p.walk = read_walk(root);
  p.replicas = read_replicas(root);
  const Reader prm = params_of(root);
  p.n_values = positive_ascending(prm, "n_values", 1 << 20);
  p.a = prm.number("a", 1.0);
  prm.require(p.a >= 0, "a", "must be non-negative");
  if (prm.has("envelopes")) {
    for (const auto& e : prm.children("envelopes")) p.envelopes.push_back(read_barrier(e));
    prm.require(!p.envelopes.empty(), "envelopes", "must not be empty");
  } else {
    p.envelopes = {ZeroBarrier{}, LogBarrier{1.0, 0.0}};
  }
  p.n_f = prm.integer("n_f", 8);
  prm.require(p.n_f >= 1, "n_f", "must be positive");
  p.factor = prm.number("factor", 2.0);
  return p;
}

void run_survival(const ExperimentConfig& cfg, const Reader& root, Products& out,
                  const std::atomic<bool>* interrupt) {
  const auto p = parse_survival(root);
  Table table("barrier_survival", {"walk", "envelope", "n", "a", "lower", "lower_se", "upper", "upper_se",
                                   "lower_normalized", "upper_normalized"});
  Plot plot{"barrier survival scaling", "n", "sqrt(n) p / (a+1)", true, true, {}};
  std::uint64_t tag = 0;
  for (const auto& env : p.envelopes) {
    const auto f = barrier_envelope(env);
    const std::string name = describe_barrier(env);
    std::vector<double> lower, upper;
    Series sl{name + " lower", {}, {}, {}, {}}, su{name + " upper", {}, {}, {}, {}};
    for (auto n : p.n_values) {
      if (stopped(interrupt)) break;
      const auto e = barrier_survival(p.walk, f, p.a, n, p.replicas, derive_seed(cfg.seed, tag++), p.n_f);
      table.row({p.walk.name(), name, std::to_string(n), fmt(p.a), fmt(e.lower.estimate), fmt(e.lower.std_error),
                 fmt(e.upper.estimate), fmt(e.upper.std_error), fmt(e.lower_normalized), fmt(e.upper_normalized)});
      lower.push_back(e.lower_normalized);
      upper.push_back(e.upper_normalized);
      sl.x.push_back(static_cast<double>(n));
      sl.y.push_back(e.lower_normalized);
      su.x.push_back(static_cast<double>(n));
      su.y.push_back(e.upper_normalized);
    }
    if (!lower.empty()) {
      out.checks.push_back(check_le(name + "_lower_spread", spread(lower), p.factor));
      out.checks.push_back(check_le(name + "_upper_spread", spread(upper), p.factor));
    }
    plot.series.push_back(std::move(sl));
    plot.series.push_back(std::move(su));
  }
  out.tables.push_back(std::move(table));
  out.plots.emplace_back("barrier_survival", std::move(plot));
}

// ---------------------------------------------------------- hitting_tail

void run_hitting(const ExperimentConfig& cfg, const Reader& root, Products& out,
                 const std::atomic<bool>* interrupt, bool dry) {
  const WalkLaw walk = read_walk(root);
  const auto replicas = read_replicas(root);
  const Reader prm = params_of(root);
  const auto n_values = positive_ascending(prm, "n_values", 1 << 20);
  const double a = prm.number("a", 1.0);
  prm.require(a >= 0, "a", "must be non-negative");
  const double factor = prm.number("factor", 2.0);
  if (dry) return;

  Table table("hitting_tail", {"walk", "n", "a", "raw", "raw_se", "normalized"});
  Series s{"sqrt(n) p / (a+1)", {}, {}, {}, {}};
  std::vector<double> normalized;
  std::uint64_t tag = 0;
  for (auto n : n_values) {
    if (stopped(interrupt)) break;
    const auto e = hitting_time_tail(walk, a, n, replicas, derive_seed(cfg.seed, tag++));
    const double scale = e.normalized / e.raw.estimate;
    table.row({walk.name(), std::to_string(n), fmt(a), fmt(e.raw.estimate), fmt(e.raw.std_error), fmt(e.normalized)});
    normalized.push_back(e.normalized);
    s.x.push_back(static_cast<double>(n));
    s.y.push_back(e.normalized);
    s.lo.push_back(e.normalized - 2 * e.raw.std_error * scale);
    s.hi.push_back(e.normalized + 2 * e.raw.std_error * scale);
  }
  out.tables.push_back(std::move(table));
  out.plots.emplace_back("hitting_tail", Plot{"first passage tail", "n", "normalized", true, true, {s}});
  if (!normalized.empty()) out.checks.push_back(check_le("normalized_spread", spread(normalized), factor));
}

// ---------------------------------------------------------------- ladder

void run_ladder(const ExperimentConfig& cfg, const Reader& root, Products& out, bool dry) {
  const WalkLaw walk = read_walk(root);
  const auto replicas = read_replicas(root);
  const Reader prm = params_of(root);
  const auto levels = prm.numbers("levels");
  for (double b : levels) prm.require(b >= 0, "levels", "entries must be non-negative");
  const double z_max = prm.number("z_max", 4.0);
  const auto max_steps = prm.integer("max_steps", 1'000'000);
  prm.require(max_steps >= 1, "max_steps", "must be positive");
  if (dry) return;

  const auto rep = ladder_overshoot(walk, levels, replicas, cfg.seed, static_cast<std::uint64_t>(max_steps));
  Table table("ladder_overshoot", {"walk", "level", "epsilon", "moment", "moment_se", "bound", "bound_se", "z"});
  for (const auto& row : rep.table) {
    table.row({walk.name(), fmt(row.level), fmt(rep.epsilon), fmt(row.moment.estimate), fmt(row.moment.std_error),
               fmt(row.bound.estimate), fmt(row.bound.std_error), fmt(row.z)});
    out.checks.push_back(check_le(label("z_level_", row.level), row.z, z_max));
  }
  RunningStats h;
  for (double v : rep.record.heights) h.add(v);
  Table summary("ladder_heights", {"walk", "replicas", "mean_H1", "mean_H1_se", "truncated"});
  summary.row({walk.name(), std::to_string(h.count()), fmt(h.mean()), fmt(h.std_error()),
               std::to_string(rep.record.truncated)});
  out.tables.push_back(std::move(table));
  out.tables.push_back(std::move(summary));
}

// -------------------------------------------------------- geometry_suite

struct GeometryParams {
  int cover_d = 3;
  std::vector<double> cover_R = {4, 16, 64};
  int grid_d = 3;
  std::vector<double> grid_t = {100, 400, 1600};
  double grid_A = 1.0;
  double slope_factor = 2.0;
};

GeometryParams parse_geometry(const Reader& root) {
  GeometryParams p;
  const Reader prm = params_of(root);
  if (prm.has("cover")) {
    const Reader c = prm.child("cover");
    p.cover_d = static_cast<int>(c.integer("d", 3));
    c.require(p.cover_d >= 2 && p.cover_d <= 8, "d", "must lie in [2, 8]");
    if (c.has("R_values")) p.cover_R = c.numbers("R_values");
    for (double R : p.cover_R) c.require(R > 1, "R_values", "entries must exceed 1");
  }
  if (prm.has("grid")) {
    const Reader g = prm.child("grid");
    p.grid_d = static_cast<int>(g.integer("d", 3));
    g.require(p.grid_d >= 2 && p.grid_d <= 8, "d", "must lie in [2, 8]");
    if (g.has("t_values")) p.grid_t = g.numbers("t_values");
    for (double t : p.grid_t) g.require(t >= 1, "t_values", "entries must be at least 1");
    p.grid_A = g.number("A", 1.0);
    g.require(p.grid_A > 0, "A", "must be positive");
  }
  p.slope_factor = prm.number("slope_factor", 2.0);
  return p;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return stats::ols_slope(lx, ly);
}

void run_geometry(const Reader& root, Products& out, const std::atomic<bool>* interrupt) {
  const auto p = parse_geometry(root);
  Table cover("cap_cover", {"d", "R", "size", "coverage", "scaled_size", "c_lower", "c_upper", "repaired"});
  std::vector<double> sizes;
  Series sc{"cap cover", {}, {}, {}, {}};
  for (double R : p.cover_R) {
    if (stopped(interrupt)) break;
    const auto set = cap_cover(p.cover_d, R);
    const double coverage = cover_fraction(set);
    const double scaled = static_cast<double>(set.size()) / std::pow(R, 0.5 * (p.cover_d - 1));
    cover.row({std::to_string(p.cover_d), fmt(R), std::to_string(set.size()), fmt(coverage), fmt(scaled),
               fmt(set.c_lower), fmt(set.c_upper), std::to_string(set.repaired)});
    out.checks.push_back(check_ge(label("coverage_R", R), coverage, 1.0));
    sizes.push_back(static_cast<double>(set.size()));
    sc.x.push_back(R);
    sc.y.push_back(static_cast<double>(set.size()));
  }
  if (sizes.size() >= 2) {
    const double ratio = log_slope(sc.x, sizes) / (0.5 * (p.cover_d - 1));
    out.checks.push_back(check_le("cover_exponent_ratio", std::max(ratio, 1.0 / ratio), p.slope_factor));
  }

  Table grid("separated_grid", {"d", "t", "A", "size", "separation", "min_distance", "scaled_size", "c_lower", "c_upper"});
  std::vector<double> gsizes;
  Series sg{"separated grid", {}, {}, {}, {}};
  for (double t : p.grid_t) {
    if (stopped(interrupt)) break;
    const auto set = separated_grid(p.grid_d, t, p.grid_A);
    const double dmin = set.size() > 1 ? min_pairwise_distance(set) : INFINITY;
    const double scaled = static_cast<double>(set.size()) / std::pow(t, 0.5 * (p.grid_d - 1));
    grid.row({std::to_string(p.grid_d), fmt(t), fmt(p.grid_A), std::to_string(set.size()), fmt(set.separation),
              fmt(dmin), fmt(scaled), fmt(set.c_lower), fmt(set.c_upper)});
    out.checks.push_back(check_ge(label("separation_t", t), dmin, p.grid_A / std::sqrt(t)));
    gsizes.push_back(static_cast<double>(set.size()));
    sg.x.push_back(t);
    sg.y.push_back(static_cast<double>(set.size()));
  }
  if (gsizes.size() >= 2) {
    const double ratio = log_slope(sg.x, gsizes) / (0.5 * (p.grid_d - 1));
    out.checks.push_back(check_le("grid_exponent_ratio", std::max(ratio, 1.0 / ratio), p.slope_factor));
  }
  out.tables.push_back(std::move(cover));
  out.tables.push_back(std::move(grid));
  out.plots.emplace_back("direction_set_sizes", Plot{"direction set cardinality", "R or t", "size", true, true, {sc, sg}});
}

// ------------------------------------------------------ inequality_suite

struct InequalityParams {
  OffspringLaw law;
  std::uint64_t trials = 10000;
  std::size_t trig_grid = 2001;
  double split_epsilon = 0.1;
  std::vector<std::int64_t> split_t = {100, 1000, 10000};
  std::vector<double> gain_s = {200};
  std::vector<double> gain_offsets = {0};
  double gain_epsilon = 0.1;
  GainCostOptions gain_options;
};

InequalityParams parse_inequality(const Reader& root) {
  InequalityParams p;
  if (root.has("law")) {
    p.law = read_law(root);
  } else {
    p.law.dimension = 2;
    p.law.count = FixedCount{2};
    p.law.radial = ChiRadius{1.0};
  }
  const Reader prm = params_of(root);
  const auto trials = prm.integer("trials", 10000);
  prm.require(trials >= 1000, "trials", "must be at least 1000");
  p.trials = static_cast<std::uint64_t>(trials);
  const auto grid = prm.integer("trig_grid", 2001);
  prm.require(grid >= 2, "trig_grid", "must be at least 2");
  p.trig_grid = static_cast<std::size_t>(grid);
  if (prm.has("barrier_split")) {
    const Reader c = prm.child("barrier_split");
    p.split_epsilon = c.number("epsilon", 0.1);
    c.require(p.split_epsilon >= 0, "epsilon", "must be non-negative");
    if (c.has("t_values")) p.split_t = positive_ascending(c, "t_values", 1'000'000);
  }
  if (prm.has("gain_cost")) {
    const Reader g = prm.child("gain_cost");
    if (g.has("s_values")) p.gain_s = g.numbers("s_values");
    for (double s : p.gain_s) g.require(s > 0, "s_values", "entries must be positive");
    if (g.has("offsets")) p.gain_offsets = g.numbers("offsets");
    p.gain_epsilon = g.number("epsilon", 0.1);
    g.require(p.gain_epsilon > 0, "epsilon", "must be positive");
    p.gain_options.radial = static_cast<int>(g.integer("radial", p.gain_options.radial));
    p.gain_options.angular = static_cast<int>(g.integer("angular", p.gain_options.angular));
    g.require(p.gain_options.radial >= 2, "radial", "must be at least 2");
    g.require(p.gain_options.angular >= 1, "angular", "must be positive");
    if (g.has("alphas")) p.gain_options.alphas = g.numbers("alphas");
  }
  return p;
}

void run_inequality(const ExperimentConfig& cfg, const Reader& root, Products& out,
                    const std::atomic<bool>* interrupt) {
  const auto p = parse_inequality(root);
  constexpr double kHalfPi = std::numbers::pi / 2;

  auto parts = map_chunks(p.trials, 256, [&](std::uint64_t begin, std::uint64_t end) {
    std::pair<std::uint64_t, double> acc{0, INFINITY};
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream rng({cfg.seed, i, 0});
      const double a = 10 * rng.uniform_open(), b = 10 * rng.uniform_open();
      const double alpha = kHalfPi * rng.uniform_open();
      const auto r = verify_trig_bound(a, b, alpha, p.trig_grid);
      acc.first += r.pass ? 1 : 0;
      acc.second = std::min(acc.second, r.lhs_min - r.rhs);
    }
    return acc;
  });
  std::uint64_t passed = 0;
  double worst = INFINITY;
  for (const auto& [k, w] : parts) {
    passed += k;
    worst = std::min(worst, w);
  }
  Table trig("trig_bound", {"trials", "passed", "pass_rate", "min_lhs_minus_rhs"});
  const double rate = static_cast<double>(passed) / static_cast<double>(p.trials);
  trig.row({std::to_string(p.trials), std::to_string(passed), fmt(rate), fmt(worst)});
  out.tables.push_back(std::move(trig));
  out.checks.push_back(check_ge("trig_pass_rate", rate, 1.0));
  if (stopped(interrupt)) return;

  const CumulantHandle handle(p.law);
  const auto sol = solve_lambda(handle);
  const double margin = default_barrier_margin(handle, sol);
  const auto split = colic_check(sol, margin, p.split_epsilon, p.split_t);
  Table ct("barrier_split", {"epsilon", "margin", "min_slack", "worst_t", "worst_s", "worst_y", "violations", "pass"});
  ct.row({fmt(p.split_epsilon), fmt(margin), fmt(split.min_slack), std::to_string(split.worst_t),
          std::to_string(split.worst_s), fmt(split.worst_y), std::to_string(split.violations), split.pass ? "1" : "0"});
  out.tables.push_back(std::move(ct));
  out.checks.push_back(check_le("barrier_split_violations", static_cast<double>(split.violations), 0.0));

  Table gt("gain_cost", {"s", "offset", "r", "epsilon", "h_reference", "grid_max", "max_at_reference", "best_c",
                         "alpha0_slack", "half_radius_deficit", "half_radius_bound", "pass"});
  for (double s : p.gain_s) {
    for (double off : p.gain_offsets) {
      if (stopped(interrupt)) break;
      const double r = sol.gamma * s + off;
      const auto rep = verify_gain_cost_optimum(handle, r, s, sol.lambda, p.gain_epsilon, p.gain_options);
      gt.row({fmt(s), fmt(off), fmt(r), fmt(p.gain_epsilon), fmt(rep.h_reference), fmt(rep.grid_max),
              rep.max_at_reference ? "1" : "0", fmt(rep.best_c), fmt(rep.alpha0_slack), fmt(rep.half_radius_deficit),
              fmt(rep.half_radius_bound), rep.pass ? "1" : "0"});
      const std::string tag = "_s" + fmt(s) + "_off" + fmt(off);
      out.checks.push_back(check_ge("gain_cost_max_at_reference" + tag, rep.max_at_reference ? 1.0 : 0.0, 1.0));
      out.checks.push_back(check_ge("gain_cost_deficit_bound" + tag, rep.pass ? 1.0 : 0.0, 1.0));
    }
  }
  out.tables.push_back(std::move(gt));
}

}  // namespace

void validate_kind(const ExperimentConfig& cfg) {
  const Reader root(cfg.document, "");
  const std::string& k = cfg.kind;
  Products unused;
  if (k == "front") {
    parse_front(root);
  } else if (k == "tightness") {
    parse_tightness(root);
  } else if (k == "many_to_one") {
    parse_mto(root);
  } else if (k == "many_to_two") {
    parse_mtt(root);
  } else if (k == "first_moment") {
    parse_first_moment(root);
  } else if (k == "ballot_scaling") {
    parse_ballot(root);
  } else if (k == "barrier_survival") {
    parse_survival(root);
  } else if (k == "hitting_tail") {
    run_hitting(cfg, root, unused, nullptr, true);
  } else if (k == "ladder") {
    run_ladder(cfg, root, unused, true);
  } else if (k == "geometry_suite") {
    parse_geometry(root);
  } else if (k == "inequality_suite") {
    parse_inequality(root);
  }
}

void run_kind(const ExperimentConfig& cfg, Products& out, const std::atomic<bool>* interrupt) {
  const Reader root(cfg.document, "");
  const std::string& k = cfg.kind;
  if (k == "front") {
    run_front(cfg, root, out);
  } else if (k == "tightness") {
    run_tightness(cfg, root, out);
  } else if (k == "many_to_one") {
    run_mto(cfg, root, out);
  } else if (k == "many_to_two") {
    run_mtt(cfg, root, out, interrupt);
  } else if (k == "first_moment") {
    run_first_moment(cfg, root, out, interrupt);
  } else if (k == "ballot_scaling") {
    run_ballot(cfg, root, out, interrupt);
  } else if (k == "barrier_survival") {
    run_survival(cfg, root, out, interrupt);
  } else if (k == "hitting_tail") {
    run_hitting(cfg, root, out, interrupt, false);
  } else if (k == "ladder") {
    run_ladder(cfg, root, out, false);
  } else if (k == "geometry_suite") {
    run_geometry(root, out, interrupt);
  } else if (k == "inequality_suite") {
    run_inequality(cfg, root, out, interrupt);
  } else {
    raise(ErrorKind::Config, "kind: unknown experiment kind '" + k + "'");
  }
}

}  // namespace cli

}  // namespace brwlab

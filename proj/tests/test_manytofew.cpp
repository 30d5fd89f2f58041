// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "brwlab/error.hpp"
#include "brwlab/manytofew.hpp"

using namespace brwlab;

namespace {

OffspringLaw law_of(int d, CountLaw c, RadialLaw r) {
  OffspringLaw law;
  law.dimension = d;
  law.count = c;
  law.radial = r;
  return law;
}

bool agree(const EstimateCI& a, const EstimateCI& b) { return std::fabs(z_score(a, b)) < 4; }

}  // namespace

TEST_CASE("path functionals") {
  const std::vector<double> path = {0, 0, 1, 0, 3, 4};  // d = 2, n = 2
  CHECK(evaluate(PathFunctional::constant(2, 2.5), path, 2) == 2.5);
  CHECK(evaluate(PathFunctional::endpoint_norm_ball(2, 5.0), path, 2) == 1.0);
  CHECK(evaluate(PathFunctional::endpoint_norm_ball(2, 4.9), path, 2) == 0.0);
  Eigen::VectorXd e2(2);
  e2 << 0, 2;
  CHECK(evaluate(PathFunctional::endpoint_halfspace(2, e2, 4.0), path, 2) == 1.0);
  CHECK(evaluate(PathFunctional::endpoint_halfspace(2, e2, 4.1), path, 2) == 0.0);
  CHECK(evaluate(PathFunctional::exp_projection(2, 0.5), path, 2) == doctest::Approx(std::exp(1.5)));
  CHECK(evaluate(PathFunctional::barrier_indicator(2, LogBarrier{1.0, 0.0}, 4.0), path, 2) == 1.0);
  CHECK(evaluate(PathFunctional::barrier_indicator(2, ZeroBarrier{}, 4.0), path, 2) == 0.0);
  CHECK_THROWS_AS(evaluate(PathFunctional::constant(3), path, 2), Error);
}

TEST_CASE("many-to-one with f = 1") {
  const auto fixed = law_of(2, FixedCount{2}, ChiRadius{1});
  auto lhs = mto_lhs(fixed, PathFunctional::constant(2), 1000, 1);
  CHECK(lhs.estimate == 4.0);
  CHECK(lhs.std_error == 0.0);
  const auto pois = law_of(3, PoissonCount{2.0}, AtomRadius{1.0});
  auto lp = mto_lhs(pois, PathFunctional::constant(2), 200000, 2);
  CHECK(std::fabs(lp.estimate - 4.0) < 4 * lp.std_error);
  auto rp = mto_rhs(pois, PathFunctional::constant(2), 1000, 3);
  CHECK(rp.estimate == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(rp.std_error == 0.0);
  CHECK(mto_constant(pois, 3) == doctest::Approx(8.0));
}

TEST_CASE("many-to-one against the cumulant") {
  for (const auto& law : {law_of(2, PoissonCount{2.0}, ChiRadius{1}),
                          law_of(3, FixedCount{3}, ExponentialRadius{2.0})}) {
    CumulantHandle h(law);
    const double phi = h.evaluate(0.7).phi;
    auto lhs = mto_lhs(law, PathFunctional::exp_projection(1, 0.7), 200000, 4);
    auto rhs = mto_rhs(law, PathFunctional::exp_projection(1, 0.7), 200000, 5);
    CHECK(std::fabs(lhs.estimate - phi) < 4 * lhs.std_error);
    CHECK(std::fabs(rhs.estimate - phi) < 4 * rhs.std_error);
  }
  const auto law = law_of(3, PoissonCount{2.0}, UniformRadius{1.0});
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 0);
  auto half = mto_rhs(law, PathFunctional::endpoint_halfspace(1, e1, 0.0), 200000, 6);
  CHECK(std::fabs(half.estimate - 1.0) < 4 * half.std_error);
}

TEST_CASE("many-to-one identity on every functional kind") {
  const auto law = law_of(2, PoissonCount{1.7}, ChiRadius{1.0});
  Eigen::VectorXd theta(2);
  theta << 1, 1;
  for (int n : {1, 3}) {
    std::vector<PathFunctional> funs = {
        PathFunctional::constant(n), PathFunctional::endpoint_norm_ball(n, 1.5),
        PathFunctional::endpoint_halfspace(n, theta, 0.5),
        PathFunctional::barrier_indicator(n, LogBarrier{1.0, 0.0}, 1.5),
        PathFunctional::exp_projection(n, 0.4)};
    auto lhs = mto_lhs(law, funs, 100000, 7);
    auto rhs = mto_rhs(law, funs, 100000, 8);
    for (std::size_t j = 0; j < funs.size(); ++j) {
      CAPTURE(funs[j].name());
      CHECK(agree(lhs[j], rhs[j]));
    }
  }
}

TEST_CASE("horizon limits") {
  const auto law = law_of(2, FixedCount{2}, ChiRadius{1});
  CHECK_THROWS_AS(mto_lhs(law, PathFunctional::constant(13), 10, 1), Error);
  CHECK_THROWS_AS(mtt_lhs(law, {PathFunctional::constant(9), PathFunctional::constant(9)}, 10, 1), Error);
  try {
    mto_lhs(law, PathFunctional::constant(13), 10, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HorizonTooLarge);
  }
}

TEST_CASE("many-to-two with f = 1") {
  const PairFunctional one1{PathFunctional::constant(1), PathFunctional::constant(1)};
  const auto fixed = law_of(2, FixedCount{2}, ChiRadius{1});
  CHECK(mtt_lhs(fixed, one1, 1000, 1).estimate == 4.0);
  CHECK(mtt_rhs(fixed, one1, 1000, 1).estimate == doctest::Approx(4.0));

  const auto pois = law_of(2, PoissonCount{2.0}, ChiRadius{1});
  auto lp = mtt_lhs(pois, one1, 400000, 2);
  CHECK(std::fabs(lp.estimate - 6.0) < 4 * lp.std_error);
  CHECK(mtt_rhs(pois, one1, 1000, 2).estimate == doctest::Approx(6.0));
  CHECK(mtt_constant(pois, 1) == doctest::Approx(6.0));

  // E Z_n^2 = Var(N) m^{n-1} + m^2 E Z_{n-1}^2.
  const auto binary = law_of(2, BinaryCount{0.75}, ChiRadius{1});
  const double m = 1.5, var = 3.0 - m * m;
  double ez2 = 1.0;
  for (int k = 1; k <= 3; ++k) ez2 = var * std::pow(m, k - 1) + m * m * ez2;
  CHECK(mtt_constant(binary, 3) == doctest::Approx(ez2).epsilon(1e-14));
  const PairFunctional one3{PathFunctional::constant(3), PathFunctional::constant(3)};
  auto lb = mtt_lhs(binary, one3, 400000, 3);
  CHECK(std::fabs(lb.estimate - ez2) < 4 * lb.std_error);
  auto rb = mtt_rhs(binary, one3, 1000, 3);
  CHECK(rb.estimate == doctest::Approx(ez2).epsilon(1e-12));
  CHECK(rb.std_error == 0.0);
}

TEST_CASE("many-to-two identity and the independent-walk control") {
  const auto law = law_of(2, PoissonCount{2.0}, ChiRadius{1.0});
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
  const PairFunctional half{PathFunctional::endpoint_halfspace(2, e1, 0.0),
                            PathFunctional::endpoint_halfspace(2, e1, 0.0)};
  auto lhs = mtt_lhs(law, half, 300000, 10);
  auto rhs = mtt_rhs(law, half, 300000, 11);
  CHECK(agree(lhs, rhs));
  auto control = mtt_rhs(law, half, 300000, 12, SpineMode::Independent);
  CHECK(std::fabs(z_score(lhs, control)) > 4);

  const PairFunctional mixed{PathFunctional::endpoint_norm_ball(3, 1.5),
                             PathFunctional::exp_projection(3, 0.3)};
  CHECK(agree(mtt_lhs(law, mixed, 200000, 13), mtt_rhs(law, mixed, 200000, 14)));
}

TEST_CASE("cap count at t = 1 matches plain sampling") {
  const auto law = law_of(2, FixedCount{2}, ChiRadius{1.0});
  CumulantHandle h(law);
  const auto sol = solve_lambda(h);
  auto est = first_moment_cap_count(law, sol, 1, 0.0, 400000, 20);
  const double f1 = barrier_eval(front_barrier(sol, est.margin, 0.0), 1, 1);
  RunningStats plain;
  RandomStream rng({21, 0, 0});
  std::vector<double> x(2);
  for (int i = 0; i < 4'000'000; ++i) {
    sample_displacement(law, rng, x);
    const double r = std::hypot(x[0], x[1]);
    plain.add(2.0 * (x[0] >= f1 - 1 && r <= f1));
  }
  CHECK(plain.mean() > 0);
  CHECK(agree(est.raw, plain.to_estimate()));
  CHECK(est.normalized == doctest::Approx(est.raw.estimate));
}

TEST_CASE("cap count rejects a negative barrier") {
  const auto law = law_of(2, PoissonCount{1.02}, ChiRadius{1.0});
  CumulantHandle h(law);
  const auto sol = solve_lambda(h);
  try {
    first_moment_cap_count(law, sol, 10, 0.0, 100, 1, 0.01);
    FAIL("expected DegenerateBarrier");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateBarrier);
  }
}

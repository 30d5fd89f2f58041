// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "brwlab/error.hpp"
#include "brwlab/estimate.hpp"
#include "brwlab/model.hpp"
#include "brwlab/sphere.hpp"
#include "brwlab/stats.hpp"

using namespace brwlab;

namespace {

OffspringLaw law_of(int d, CountLaw c, RadialLaw r) {
  OffspringLaw law;
  law.dimension = d;
  law.count = c;
  law.radial = r;
  return law;
}

}  // namespace

TEST_CASE("mean_params closed forms") {
  auto p = mean_params(law_of(2, FixedCount{2}, ChiRadius{1}));
  CHECK(p.m == 2.0);
  CHECK(p.m2 == 2.0);
  p = mean_params(law_of(2, BinaryCount{0.75}, ChiRadius{1}));
  CHECK(p.m == doctest::Approx(1.5));
  CHECK(p.m2 == doctest::Approx(1.5));
  p = mean_params(law_of(2, PoissonCount{2.0}, ChiRadius{1}));
  CHECK(p.m == doctest::Approx(2.0));
  CHECK(p.m2 == doctest::Approx(4.0));
  CHECK_THROWS_AS(mean_params(law_of(2, FixedCount{1}, ChiRadius{1})), Error);
  try {
    mean_params(law_of(2, BinaryCount{0.5}, ChiRadius{1}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Subcritical);
  }
}

TEST_CASE("mean_params agrees with sampled moments") {
  const std::vector<CountLaw> laws = {FixedCount{3}, BinaryCount{0.75}, PoissonCount{2.0},
                                      PoissonCount{0.7, true}, GeometricCount{0.3}};
  std::uint64_t tag = 0;
  for (const auto& c : laws) {
    RandomStream rng({21, tag++, 0});
    RunningStats n1, n2;
    for (int i = 0; i < 400000; ++i) {
      const double n = static_cast<double>(sample_count(c, rng));
      n1.add(n);
      n2.add(n * n);
    }
    CHECK(std::fabs(n1.mean() - count_mean(c)) <= 4 * n1.std_error() + 1e-12);
    CHECK(std::fabs(n2.mean() - count_second_moment(c)) <= 4 * n2.std_error() + 1e-12);
  }
}

TEST_CASE("pair-biased counts have the N(N-1) weighted law") {
  // E~[g(N)] = E[N(N-1) g(N)] / E[N(N-1)] with g(N) = N.
  const std::vector<CountLaw> laws = {PoissonCount{2.0}, PoissonCount{0.7, true}, GeometricCount{0.3}};
  const std::vector<double> third = {
      // E[N(N-1)N] for Poisson: mu^3 + 2 mu^2
      8.0 + 8.0,
      (0.343 + 2 * 0.49) / -std::expm1(-0.7),
      // geometric: E[N^3] - E[N^2] with E[N^3] = q(1 + 4q + q^2)/p^3
      0.7 * (1 + 2.8 + 0.49) / 0.027 - 0.7 * 1.7 / 0.09,
  };
  for (std::size_t i = 0; i < laws.size(); ++i) {
    RandomStream rng({22, i, 0});
    RunningStats s;
    for (int k = 0; k < 200000; ++k) s.add(static_cast<double>(sample_pair_biased_count(laws[i], rng)));
    const double fact2 = count_second_moment(laws[i]) - count_mean(laws[i]);
    CHECK(std::fabs(s.mean() - third[i] / fact2) < 4 * s.std_error());
  }
}

TEST_CASE("sample_offspring basic laws") {
  RandomStream rng({23, 0, 0});
  auto kids = sample_offspring(law_of(3, FixedCount{2}, AtomRadius{0.0}), rng);
  REQUIRE(kids.size() == 2);
  CHECK(kids[0].norm() == 0.0);
  CHECK(kids[1].norm() == 0.0);

  auto one = sample_offspring(law_of(2, FixedCount{1}, AtomRadius{1.0}), rng);
  REQUIRE(one.size() == 1);
  CHECK(one[0].norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("angles of unit offspring in d=2 are uniform") {
  RandomStream rng({24, 0, 0});
  const auto law = law_of(2, FixedCount{1}, AtomRadius{1.0});
  constexpr int kBins = 36;
  constexpr int kN = 1000000;
  std::vector<double> observed(kBins, 0.0), expected(kBins, kN / double(kBins));
  for (int i = 0; i < kN; ++i) {
    auto v = sample_offspring(law, rng)[0];
    double angle = std::atan2(v[1], v[0]);
    if (angle < 0) angle += 2 * std::numbers::pi;
    observed[std::min(kBins - 1, static_cast<int>(angle / (2 * std::numbers::pi) * kBins))] += 1;
  }
  CHECK(stats::chi_square(observed, expected).p_value > 0.01);
}

TEST_CASE("binary count law mean 1.5") {
  RandomStream rng({25, 0, 0});
  const auto law = law_of(2, BinaryCount{0.75}, ChiRadius{1});
  RunningStats s;
  for (int i = 0; i < 1000000; ++i) s.add(static_cast<double>(sample_offspring(law, rng).size()));
  CHECK(std::fabs(s.mean() - 1.5) < 3 * s.std_error());
}

TEST_CASE("spine pairs") {
  RandomStream rng({26, 0, 0});
  CHECK_THROWS_AS(sample_spine_pair(law_of(2, FixedCount{1}, ChiRadius{1}), rng), Error);

  const auto law = law_of(3, BinaryCount{0.75}, ExponentialRadius{1.0});
  std::vector<double> d1, single;
  RunningStats t1, t2, n1, n2, e1, e2;
  for (int i = 0; i < 200000; ++i) {
    auto p = sample_spine_pair(law, rng);
    d1.push_back(p.delta1[0]);
    t1.add(p.delta1[0]);
    t2.add(p.delta2[0]);
    n1.add(p.delta1.norm());
    n2.add(p.delta2.norm());
    e1.add(p.delta1.dot(Eigen::Vector3d::UnitX()) * p.delta2.norm());
    e2.add(p.delta2.dot(Eigen::Vector3d::UnitX()) * p.delta1.norm());
    std::vector<double> out(3);
    sample_displacement(law, rng, out);
    single.push_back(out[0]);
  }
  CHECK(stats::ks_two_sample(d1, single).p_value > 0.01);
  CHECK(std::fabs(z_score(t1.to_estimate(), t2.to_estimate())) < 4);
  CHECK(std::fabs(z_score(n1.to_estimate(), n2.to_estimate())) < 4);
  CHECK(std::fabs(z_score(e1.to_estimate(), e2.to_estimate())) < 4);
}

TEST_CASE("projection sampler") {
  RandomStream rng({27, 0, 0});
  CHECK(sample_projection(law_of(2, FixedCount{2}, AtomRadius{0.0}), rng) == 0.0);

  std::vector<double> xs(200000);
  const auto atom3 = law_of(3, FixedCount{2}, AtomRadius{1.0});
  for (auto& x : xs) x = sample_projection(atom3, rng);
  CHECK(stats::ks_one_sample(xs, [](double x) { return std::clamp(0.5 * (x + 1), 0.0, 1.0); }).p_value > 0.01);

  const auto gauss2 = law_of(2, FixedCount{2}, ChiRadius{1.0});
  for (auto& x : xs) x = sample_projection(gauss2, rng);
  CHECK(stats::ks_one_sample(xs, stats::normal_cdf).p_value > 0.01);
}

TEST_CASE("projection matches projected offspring and is direction free") {
  const std::vector<OffspringLaw> laws = {law_of(2, FixedCount{2}, UniformRadius{2.0}),
                                          law_of(4, FixedCount{2}, ExponentialRadius{1.5})};
  std::uint64_t tag = 0;
  for (const auto& law : laws) {
    RandomStream rng({28, tag++, 0});
    std::vector<double> proj, first, oblique;
    std::vector<double> v(law.dimension);
    for (int i = 0; i < 200000; ++i) {
      proj.push_back(sample_projection(law, rng));
      sample_displacement(law, rng, v);
      first.push_back(v[0]);
      oblique.push_back((v[0] - v[1]) / std::sqrt(2.0));
    }
    CHECK(stats::ks_two_sample(proj, first).p_value > 0.01);
    CHECK(stats::ks_two_sample(first, oblique).p_value > 0.01);
  }
}

TEST_CASE("radial medians") {
  RandomStream rng({29, 0, 0});
  for (RadialLaw r : std::vector<RadialLaw>{ChiRadius{1.3}, ExponentialRadius{2.0}, UniformRadius{3.0}}) {
    const double med = radial_median(r, 3);
    int below = 0;
    constexpr int kN = 100000;
    for (int i = 0; i < kN; ++i) below += sample_radius(r, 3, rng) <= med;
    CHECK(std::fabs(below / double(kN) - 0.5) < 4 * 0.5 / std::sqrt(double(kN)));
  }
}

TEST_CASE("law json round trip") {
  const auto law = law_of(3, PoissonCount{2.5, true}, ExponentialRadius{1.25});
  nlohmann::json j = law;
  CHECK(j["count_law"]["kind"] == "poisson");
  OffspringLaw back = j.get<OffspringLaw>();
  CHECK(describe(back) == describe(law));

  nlohmann::json bad = j;
  bad["radial_law"]["kind"] = "cauchy";
  CHECK_THROWS_AS(bad.get<OffspringLaw>(), Error);
  bad = j;
  bad["dimension"] = 1;
  CHECK_THROWS_AS(bad.get<OffspringLaw>(), Error);
}

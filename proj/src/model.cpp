// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/model.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <json.hpp>

#include "brwlab/error.hpp"
#include "brwlab/sphere.hpp"

namespace brwlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t sample_geometric(double p, RandomStream& rng) {
  if (p >= 1.0) return 0;
  return static_cast<std::uint64_t>(
      std::floor(std::log(rng.uniform_open()) / std::log1p(-p)));
}

std::uint64_t sample_poisson(double mean, RandomStream& rng) {
  if (mean <= 0.0) return 0;
  boost::random::poisson_distribution<std::uint64_t, double> poisson(mean);
  return poisson(rng);
}

// Poisson(mean) given N >= 1. Inversion of the truncated CDF for small
// means, where plain rejection would waste most draws.
std::uint64_t sample_positive_poisson(double mean, RandomStream& rng) {
  if (mean > 5.0) {
    for (;;) {
      const auto n = sample_poisson(mean, rng);
      if (n > 0) return n;
    }
  }
  const double p0 = std::exp(-mean);
  double u = p0 + rng.uniform_open() * (1.0 - p0);
  std::uint64_t n = 0;
  double pmf = p0;
  double cdf = p0;
  while (cdf < u && n < 1000) {
    ++n;
    pmf *= mean / static_cast<double>(n);
    cdf += pmf;
  }
  return std::max<std::uint64_t>(n, 1);
}

std::span<double> as_span(Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

void validate(const OffspringLaw& law) {
  if (law.dimension < 2) raise(ErrorKind::InvalidArgument, "dimension must be >= 2");
  std::visit(Overloaded{
                 [](const FixedCount& c) {
                   if (c.k < 0) raise(ErrorKind::InvalidArgument, "fixed count k must be >= 0");
                 },
                 [](const BinaryCount& c) {
                   if (!(c.p_two >= 0.0 && c.p_two <= 1.0))
                     raise(ErrorKind::InvalidArgument, "binary p_two must lie in [0, 1]");
                 },
                 [](const PoissonCount& c) {
                   if (!(c.mean > 0.0 && std::isfinite(c.mean)))
                     raise(ErrorKind::InvalidArgument, "poisson mean must be positive");
                 },
                 [](const GeometricCount& c) {
                   if (!(c.p > 0.0 && c.p <= 1.0))
                     raise(ErrorKind::InvalidArgument, "geometric p must lie in (0, 1]");
                 },
             },
             law.count);
  std::visit(Overloaded{
                 [](const ChiRadius& r) {
                   if (!(r.sigma >= 0.0)) raise(ErrorKind::InvalidArgument, "chi sigma must be >= 0");
                 },
                 [](const ExponentialRadius& r) {
                   if (!(r.rate > 0.0)) raise(ErrorKind::InvalidArgument, "exponential rate must be > 0");
                 },
                 [](const UniformRadius& r) {
                   if (!(r.max >= 0.0)) raise(ErrorKind::InvalidArgument, "uniform max must be >= 0");
                 },
                 [](const AtomRadius& r) {
                   if (!(r.r0 >= 0.0)) raise(ErrorKind::InvalidArgument, "atom r0 must be >= 0");
                 },
             },
             law.radial);
}

double count_mean(const CountLaw& law) {
  return std::visit(
      Overloaded{
          [](const FixedCount& c) { return static_cast<double>(c.k); },
          [](const BinaryCount& c) { return 2.0 * c.p_two; },
          [](const PoissonCount& c) {
            return c.conditioned ? c.mean / -std::expm1(-c.mean) : c.mean;
          },
          [](const GeometricCount& c) { return (1.0 - c.p) / c.p; },
      },
      law);
}

double count_second_moment(const CountLaw& law) {
  return std::visit(
      Overloaded{
          [](const FixedCount& c) { return static_cast<double>(c.k) * c.k; },
          [](const BinaryCount& c) { return 4.0 * c.p_two; },
          [](const PoissonCount& c) {
            const double raw = c.mean * c.mean + c.mean;
            return c.conditioned ? raw / -std::expm1(-c.mean) : raw;
          },
          [](const GeometricCount& c) {
            const double q = 1.0 - c.p;
            return q * (1.0 + q) / (c.p * c.p);
          },
      },
      law);
}

bool count_allows_pairs(const CountLaw& law) {
  return std::visit(Overloaded{
                        [](const FixedCount& c) { return c.k >= 2; },
                        [](const BinaryCount& c) { return c.p_two > 0.0; },
                        [](const PoissonCount& c) { return c.mean > 0.0; },
                        [](const GeometricCount& c) { return c.p < 1.0; },
                    },
                    law);
}

MeanParams mean_params(const OffspringLaw& law) {
  validate(law);
  const double m = count_mean(law.count);
  if (!(m > 1.0)) {
    std::ostringstream msg;
    msg << "mean offspring count " << m << " is not > 1";
    raise(ErrorKind::Subcritical, msg.str());
  }
  return {m, count_second_moment(law.count) - m};
}

std::uint64_t sample_count(const CountLaw& law, RandomStream& rng) {
  return std::visit(
      Overloaded{
          [](const FixedCount& c) { return static_cast<std::uint64_t>(c.k); },
          [&](const BinaryCount& c) -> std::uint64_t {
            return rng.uniform_open() < c.p_two ? 2 : 0;
          },
          [&](const PoissonCount& c) {
            return c.conditioned ? sample_positive_poisson(c.mean, rng)
                                 : sample_poisson(c.mean, rng);
          },
          [&](const GeometricCount& c) { return sample_geometric(c.p, rng); },
      },
      law);
}

// Size-biasing by N(N-1) maps each supported family to a shifted member of
// a related family, so no rejection step is needed.
std::uint64_t sample_pair_biased_count(const CountLaw& law, RandomStream& rng) {
  if (!count_allows_pairs(law))
    raise(ErrorKind::NoPairs, "count law puts no mass on N >= 2");
  return std::visit(
      Overloaded{
          [](const FixedCount& c) { return static_cast<std::uint64_t>(c.k); },
          [](const BinaryCount&) -> std::uint64_t { return 2; },
          [&](const PoissonCount& c) { return 2 + sample_poisson(c.mean, rng); },
          [&](const GeometricCount& c) {
            // n - 2 is negative binomial with 3 successes.
            return 2 + sample_geometric(c.p, rng) + sample_geometric(c.p, rng) +
                   sample_geometric(c.p, rng);
          },
      },
      law);
}

double sample_radius(const RadialLaw& law, int d, RandomStream& rng) {
  return std::visit(
      Overloaded{
          [&](const ChiRadius& r) {
            boost::random::gamma_distribution<double> gamma(0.5 * d, 1.0);
            return r.sigma * std::sqrt(2.0 * gamma(rng));
          },
          [&](const ExponentialRadius& r) {
            return -std::log(rng.uniform_open()) / r.rate;
          },
          [&](const UniformRadius& r) { return r.max * rng.uniform_open(); },
          [](const AtomRadius& r) { return r.r0; },
      },
      law);
}

double radial_median(const RadialLaw& law, int d) {
  return std::visit(
      Overloaded{
          [&](const ChiRadius& r) {
            return r.sigma * std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * d, 0.5));
          },
          [](const ExponentialRadius& r) { return std::log(2.0) / r.rate; },
          [](const UniformRadius& r) { return 0.5 * r.max; },
          [](const AtomRadius& r) { return r.r0; },
      },
      law);
}

bool radial_is_degenerate(const RadialLaw& law) {
  return std::visit(Overloaded{
                        [](const ChiRadius& r) { return r.sigma == 0.0; },
                        [](const ExponentialRadius&) { return false; },
                        [](const UniformRadius& r) { return r.max == 0.0; },
                        [](const AtomRadius& r) { return r.r0 == 0.0; },
                    },
                    law);
}

void sample_displacement(const OffspringLaw& law, RandomStream& rng,
                         std::span<double> out) {
  const int d = law.dimension;
  if (const auto* chi = std::get_if<ChiRadius>(&law.radial)) {
    boost::random::normal_distribution<double> normal(0.0, chi->sigma);
    for (int i = 0; i < d; ++i) out[i] = normal(rng);
    return;
  }
  const double r = sample_radius(law.radial, d, rng);
  sample_unit_vector(d, rng, out);
  for (int i = 0; i < d; ++i) out[i] *= r;
}

std::vector<Eigen::VectorXd> sample_offspring(const OffspringLaw& law,
                                              RandomStream& rng) {
  const auto n = sample_count(law.count, rng);
  std::vector<Eigen::VectorXd> children(n, Eigen::VectorXd(law.dimension));
  for (auto& child : children) sample_displacement(law, rng, as_span(child));
  return children;
}

SpinePair sample_spine_pair(const OffspringLaw& law, RandomStream& rng) {
  const auto n = sample_pair_biased_count(law.count, rng);
  // Under iid displacements the positions of the other n - 2 siblings do
  // not affect the pair, so only the chosen two are drawn.
  (void)n;
  SpinePair pair{Eigen::VectorXd(law.dimension), Eigen::VectorXd(law.dimension)};
  sample_displacement(law, rng, as_span(pair.delta1));
  sample_displacement(law, rng, as_span(pair.delta2));
  return pair;
}

double sample_projection(const OffspringLaw& law, RandomStream& rng) {
  const double r = sample_radius(law.radial, law.dimension, rng);
  return r * sample_sphere_coordinate(law.dimension, rng);
}

std::string describe(const OffspringLaw& law) {
  std::ostringstream s;
  s << "d=" << law.dimension << " ";
  std::visit(Overloaded{
                 [&](const FixedCount& c) { s << "fixed(" << c.k << ")"; },
                 [&](const BinaryCount& c) { s << "binary(" << c.p_two << ")"; },
                 [&](const PoissonCount& c) {
                   s << "poisson(" << c.mean << (c.conditioned ? ",N>=1" : "") << ")";
                 },
                 [&](const GeometricCount& c) { s << "geometric(" << c.p << ")"; },
             },
             law.count);
  s << " ";
  std::visit(Overloaded{
                 [&](const ChiRadius& r) { s << "chi(" << r.sigma << ")"; },
                 [&](const ExponentialRadius& r) { s << "exponential(" << r.rate << ")"; },
                 [&](const UniformRadius& r) { s << "uniform(" << r.max << ")"; },
                 [&](const AtomRadius& r) { s << "atom(" << r.r0 << ")"; },
             },
             law.radial);
  return s.str();
}

void to_json(nlohmann::json& j, const OffspringLaw& law) {
  nlohmann::json count;
  std::visit(Overloaded{
                 [&](const FixedCount& c) {
                   count = {{"kind", "fixed"}, {"params", {{"k", c.k}}}};
                 },
                 [&](const BinaryCount& c) {
                   count = {{"kind", "binary"}, {"params", {{"p_two", c.p_two}}}};
                 },
                 [&](const PoissonCount& c) {
                   count = {{"kind", "poisson"},
                            {"params", {{"mean", c.mean}, {"conditioned", c.conditioned}}}};
                 },
                 [&](const GeometricCount& c) {
                   count = {{"kind", "geometric"}, {"params", {{"p", c.p}}}};
                 },
             },
             law.count);
  nlohmann::json radial;
  std::visit(Overloaded{
                 [&](const ChiRadius& r) {
                   radial = {{"kind", "chi"}, {"params", {{"sigma", r.sigma}}}};
                 },
                 [&](const ExponentialRadius& r) {
                   radial = {{"kind", "exponential"}, {"params", {{"rate", r.rate}}}};
                 },
                 [&](const UniformRadius& r) {
                   radial = {{"kind", "uniform"}, {"params", {{"max", r.max}}}};
                 },
                 [&](const AtomRadius& r) {
                   radial = {{"kind", "atom"}, {"params", {{"r0", r.r0}}}};
                 },
             },
             law.radial);
  j = {{"dimension", law.dimension},
       {"count_law", count},
       {"radial_law", radial},
       {"coupling", "iid"}};
}

namespace {

template <class T>
T param_or(const nlohmann::json& params, const char* name, T fallback) {
  if (!params.contains(name)) return fallback;
  return params.at(name).get<T>();
}

}  // namespace

void from_json(const nlohmann::json& j, OffspringLaw& law) {
  try {
    law = OffspringLaw{};
    law.dimension = j.at("dimension").get<int>();
    const auto& count = j.at("count_law");
    const auto kind = count.at("kind").get<std::string>();
    const auto params = count.value("params", nlohmann::json::object());
    if (kind == "fixed") {
      law.count = FixedCount{param_or(params, "k", 2)};
    } else if (kind == "binary") {
      law.count = BinaryCount{param_or(params, "p_two", 0.75)};
    } else if (kind == "poisson") {
      law.count = PoissonCount{param_or(params, "mean", 2.0),
                               param_or(params, "conditioned", false)};
    } else if (kind == "geometric") {
      law.count = GeometricCount{param_or(params, "p", 0.5)};
    } else {
      raise(ErrorKind::Config, "count_law.kind: unknown kind '" + kind + "'");
    }

    const auto& radial = j.at("radial_law");
    const auto rkind = radial.at("kind").get<std::string>();
    const auto rparams = radial.value("params", nlohmann::json::object());
    if (rkind == "chi" || rkind == "gaussian") {
      law.radial = ChiRadius{param_or(rparams, "sigma", 1.0)};
    } else if (rkind == "exponential") {
      law.radial = ExponentialRadius{param_or(rparams, "rate", 1.0)};
    } else if (rkind == "uniform") {
      law.radial = UniformRadius{param_or(rparams, "max", 1.0)};
    } else if (rkind == "atom") {
      law.radial = AtomRadius{param_or(rparams, "r0", 1.0)};
    } else {
      raise(ErrorKind::Config, "radial_law.kind: unknown kind '" + rkind + "'");
    }
    if (j.contains("coupling") && j.at("coupling").get<std::string>() != "iid")
      raise(ErrorKind::Config, "coupling: only 'iid' is supported");
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Config, std::string("law: ") + e.what());
  }
  try {
    validate(law);
  } catch (const Error& e) {
    raise(ErrorKind::Config, e.what());
  }
}

}  // namespace brwlab

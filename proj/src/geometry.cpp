// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "brwlab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/sphere.hpp"

namespace brwlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kCandidateSeed = 0x67656f6dULL;
constexpr std::uint64_t kProbeSeed = 0x70726f62ULL;

// Fraction of the sphere within angle beta of a pole, for any beta in [0, pi].
double cap_fraction_angle(int d, double beta) {
  if (beta <= 0) return 0.0;
  if (beta >= kPi) return 1.0;
  const double a = 0.5 * (d - 1);
  return boost::math::ibeta(a, a, 0.5 * (1.0 - std::cos(beta)));
}

double chord_of_angle(double angle) { return 2.0 * std::sin(0.5 * std::min(angle, kPi)); }

double dist2(const double* p, const double* q, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return s;
}

// Points on the sphere bucketed by a cubic grid of side `cell`, so that any
// two points closer than `cell` sit in neighbouring buckets. Falls back to a
// linear scan in high dimension, where 3^d neighbours cost more than a scan.
class NeighborIndex {
 public:
  NeighborIndex(int d, double cell) : d_(d), cell_(cell), hashed_(d <= 4 && cell > 0) {}

  std::size_t size() const { return points_.size() / static_cast<std::size_t>(d_); }
  const double* point(std::size_t i) const { return points_.data() + i * static_cast<std::size_t>(d_); }

  void insert(const double* p) {
    const std::size_t id = size();
    points_.insert(points_.end(), p, p + d_);
    if (hashed_) buckets_[key(cells(p))].push_back(id);
  }

  // Calls fn(i) for every stored point that may lie within `cell` of p and
  // stops early when fn returns true.
  template <class Fn>
  bool visit(const double* p, Fn&& fn) const {
    if (!hashed_) {
      for (std::size_t i = 0; i < size(); ++i)
        if (fn(i)) return true;
      return false;
    }
    const auto base = cells(p);
    std::array<std::int64_t, 4> c{};
    int n_neighbors = 1;
    for (int k = 0; k < d_; ++k) n_neighbors *= 3;
    for (int code = 0; code < n_neighbors; ++code) {
      int rest = code;
      for (int k = 0; k < d_; ++k) {
        c[k] = base[k] + rest % 3 - 1;
        rest /= 3;
      }
      auto it = buckets_.find(key(c));
      if (it == buckets_.end()) continue;
      for (std::size_t i : it->second)
        if (fn(i)) return true;
    }
    return false;
  }

  bool any_within(const double* p, double radius2) const {
    return visit(p, [&](std::size_t i) { return dist2(p, point(i), d_) < radius2; });
  }

 private:
  std::array<std::int64_t, 4> cells(const double* p) const {
    std::array<std::int64_t, 4> c{};
    for (int k = 0; k < d_; ++k) c[k] = static_cast<std::int64_t>(std::floor((p[k] + 1.0) / cell_));
    return c;
  }
  std::uint64_t key(const std::array<std::int64_t, 4>& c) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int k = 0; k < d_; ++k) {
      h ^= static_cast<std::uint64_t>(c[k] + 0x8000) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  int d_;
  double cell_;
  bool hashed_;
  std::vector<double> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

void fibonacci_point(std::size_t i, std::size_t n, double* out) {
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * static_cast<double>(i);
  out[0] = rho * std::cos(phi);
  out[1] = rho * std::sin(phi);
  out[2] = z;
}

// Quasi-uniform probe points for coverage certification.
std::vector<double> probe_points(int d, std::size_t n) {
  std::vector<double> pts(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    double* p = pts.data() + i * static_cast<std::size_t>(d);
    if (d == 2) {
      const double angle = 2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      p[0] = std::cos(angle);
      p[1] = std::sin(angle);
    } else if (d == 3) {
      fibonacci_point(i, n, p);
    } else {
      RandomStream rng({kProbeSeed, i, 0});
      sample_unit_vector(d, rng, {p, static_cast<std::size_t>(d)});
    }
  }
  return pts;
}

// Greedy packing with chord separation `sep` from the candidate stream of
// the dimension. d = 2 uses equally spaced angles and d = 3 sweeps a
// Fibonacci lattice to its end, since the sweep order makes long rejection
// runs normal. d >= 4 draws a Gaussian stream that stops after 10 |set|
// consecutive rejections.
std::vector<double> greedy_pack(int d, double sep) {
  std::vector<double> out;
  const double sep2 = sep * sep;
  if (sep > 2.0) {
    out.assign(static_cast<std::size_t>(d), 0.0);
    out[0] = 1.0;
    return out;
  }
  NeighborIndex index(d, sep);
  std::vector<double> cand(static_cast<std::size_t>(d));
  std::uint64_t rejections = 0;
  auto offer = [&]() {
    if (index.any_within(cand.data(), sep2)) {
      ++rejections;
      return;
    }
    index.insert(cand.data());
    out.insert(out.end(), cand.begin(), cand.end());
    rejections = 0;
  };
  auto saturated = [&] { return out.size() > 0 && rejections >= 10 * (out.size() / d); };

  if (d == 2) {
    // Greedy over a fine angle grid converges to equal spacing.
    const double arc = 2.0 * std::asin(0.5 * sep);
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(2.0 * kPi / arc * (1.0 - 1e-12))));
    for (std::size_t i = 0; i < k; ++i) {
      const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
      out.push_back(std::cos(angle));
      out.push_back(std::sin(angle));
    }
  } else if (d == 3) {
    const auto n = static_cast<std::size_t>(std::ceil(64.0 / sep2)) + 1000;
    for (std::size_t i = 0; i < n; ++i) {
      fibonacci_point(i, n, cand.data());
      offer();
    }
  } else {
    for (std::uint64_t i = 0; !saturated(); ++i) {
      RandomStream rng({kCandidateSeed, i, 0});
      sample_unit_vector(d, rng, cand);
      offer();
    }
  }
  return out;
}

void check_dimension(int d) {
  if (d < 2) raise(ErrorKind::InvalidArgument, "dimension must be at least 2");
}

}  // namespace

double cap_area_ratio(int d, double h) {
  check_dimension(d);
  if (!(h >= 0.0 && h <= 1.0)) raise(ErrorKind::InvalidArgument, "cap height must lie in [0, 1]");
  const double a = 0.5 * (d - 1);
  return h == 0.0 ? 0.0 : boost::math::ibeta(a, a, 0.5 * h);
}

DirectionSet cap_cover(int d, double R) {
  check_dimension(d);
  if (!(R > 1.0)) raise(ErrorKind::InvalidArgument, "cap cover needs R > 1");
  const double theta_c = std::acos(1.0 - 1.0 / R);
  DirectionSet set;
  set.d = d;
  set.kind = DirectionSet::Kind::CapCover;
  set.parameter = R;

  if (d == 2) {
    const auto k = static_cast<std::size_t>(std::ceil(kPi / theta_c - 1e-12));
    for (std::size_t i = 0; i < k; ++i) {
      const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
      set.coords.push_back(std::cos(angle));
      set.coords.push_back(std::sin(angle));
    }
    set.separation = k > 1 ? chord_of_angle(2.0 * kPi / static_cast<double>(k)) : 2.0;
  } else {
    set.separation = chord_of_angle(0.5 * theta_c);
    set.coords = greedy_pack(d, set.separation);
    // Certification: every uncovered probe joins the set.
    const double reach2 = 2.0 / R * (1.0 + 1e-12);
    NeighborIndex index(d, std::sqrt(reach2));
    for (std::size_t i = 0; i < set.size(); ++i) index.insert(set.direction(i).data());
    const auto probes = probe_points(d, 100'000);
    for (std::size_t i = 0; i < probes.size() / d; ++i) {
      const double* p = probes.data() + i * d;
      if (index.any_within(p, reach2)) continue;
      index.insert(p);
      set.coords.insert(set.coords.end(), p, p + d);
      ++set.repaired;
    }
    if (set.repaired > 0) set.separation = min_pairwise_distance(set);
  }

  const double scale = std::pow(R, 0.5 * (d - 1));
  set.c_lower = 1.0 / cap_fraction_angle(d, theta_c) / scale;
  set.c_upper = d == 2 ? (kPi / theta_c + 1.0) / scale
                       : (1.0 / cap_fraction_angle(d, 0.25 * theta_c) + set.repaired) / scale;
  return set;
}

DirectionSet separated_grid(int d, double t, double A) {
  check_dimension(d);
  if (!(t >= 1.0) || !(A > 0.0)) raise(ErrorKind::InvalidArgument, "separated grid needs t >= 1, A > 0");
  DirectionSet set;
  set.d = d;
  set.kind = DirectionSet::Kind::SeparatedGrid;
  set.parameter = t;
  set.spread = A;
  set.separation = A / std::sqrt(t);
  set.coords = greedy_pack(d, set.separation);

  const double scale = std::pow(t, 0.5 * (d - 1));
  if (set.separation >= 2.0) {
    set.c_lower = set.c_upper = 1.0 / scale;
  } else {
    const double phi = 2.0 * std::asin(0.5 * set.separation);
    set.c_lower = 1.0 / cap_fraction_angle(d, phi) / scale;
    set.c_upper = 1.0 / cap_fraction_angle(d, 0.5 * phi) / scale;
  }
  return set;
}

double cover_fraction(const DirectionSet& set, std::size_t probes) {
  const int d = set.d;
  const double reach2 = 2.0 / set.parameter * (1.0 + 1e-12);
  NeighborIndex index(d, std::sqrt(reach2));
  for (std::size_t i = 0; i < set.size(); ++i) index.insert(set.direction(i).data());
  const auto pts = probe_points(d, probes);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < probes; ++i)
    if (index.any_within(pts.data() + i * d, reach2)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(probes);
}

double min_pairwise_distance(const DirectionSet& set) {
  const int d = set.d;
  const std::size_t n = set.size();
  double best2 = std::numeric_limits<double>::infinity();
  if (n <= 10'000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        best2 = std::min(best2, dist2(set.direction(i).data(), set.direction(j).data(), d));
    return std::sqrt(best2);
  }
  NeighborIndex index(d, set.separation);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = set.direction(i).data();
    index.visit(p, [&](std::size_t j) {
      best2 = std::min(best2, dist2(p, index.point(j), d));
      return false;
    });
    index.insert(p);
  }
  return std::sqrt(best2);
}

void write_direction_csv(std::ostream& out, const DirectionSet& set) {
  out << "index";
  for (int k = 1; k <= set.d; ++k) out << ",x" << k;
  out << '\n';
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << i;
    for (double v : set.direction(i)) out << ',' << v;
    out << '\n';
  }
  out.precision(old);
}

TrigBoundCheck verify_trig_bound(double a, double b, double alpha, std::size_t grid_size) {
  if (a < 0 || b < 0 || alpha < 0 || alpha > 0.5 * kPi + 1e-15)
    raise(ErrorKind::InvalidArgument, "trig bound needs a, b >= 0 and alpha in [0, pi/2]");
  grid_size = std::max<std::size_t>(grid_size, 2);
  // Scan in beta = asin x, where the objective is smooth up to x = 1.
  auto lhs = [&](double beta) { return a * (1.0 - std::cos(alpha - beta)) + b * std::sin(beta); };

  std::size_t best = 0;
  double best_val = lhs(0.0);
  const double step = 0.5 * kPi / static_cast<double>(grid_size - 1);
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double v = lhs(std::min(0.5 * kPi, static_cast<double>(i) * step));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double beta = std::min(0.5 * kPi, static_cast<double>(best) * step);
  TrigBoundCheck out;
  out.lhs_min = best_val;
  const auto refined = boost::math::tools::brent_find_minima(lhs, std::max(0.0, beta - step),
                                                             std::min(0.5 * kPi, beta + step), 52);
  if (refined.second < out.lhs_min) {
    beta = refined.first;
    out.lhs_min = refined.second;
  }
  out.argmin = beta >= 0.5 * kPi ? 1.0 : std::sin(beta);
  out.rhs = std::min(a * alpha * alpha, b * alpha) / kPi;
  out.pass = out.lhs_min >= out.rhs - 1e-12 * std::max(1.0, out.rhs);
  return out;
}

GainCostReport verify_gain_cost_optimum(const CumulantHandle& handle, double r, double s,
                                        double lambda, double epsilon,
                                        const GainCostOptions& options) {
  if (!(r > 0) || !(s > 0) || options.radial < 2 || options.angular < 1)
    raise(ErrorKind::InvalidArgument, "gain/cost scan needs r, s > 0 and a non-trivial grid");

  struct Point {
    double x0, x1, norm;
    int ring;
  };
  std::vector<Point> grid;
  grid.push_back({0.0, 0.0, 0.0, 0});
  for (int i = 1; i < options.radial; ++i) {
    const double rho = r * i / (options.radial - 1);
    for (int j = 0; j < options.angular; ++j) {
      const double phi = 2.0 * kPi * j / options.angular;
      grid.push_back({rho * std::cos(phi), rho * std::sin(phi), rho, i});
    }
  }
  std::vector<double> cost(options.radial);
  for (int i = 0; i < options.radial; ++i) {
    const auto rate = rate_function(handle, r * i / (options.radial - 1) / s);
    cost[i] = rate.infinite ? std::numeric_limits<double>::infinity() : s * rate.value;
  }
  const double slope = lambda - epsilon / 10.0;

  GainCostReport rep;
  rep.h_reference = 2.0 * lambda * r - cost.back();
  rep.grid_max = -std::numeric_limits<double>::infinity();
  rep.best_c = std::numeric_limits<double>::infinity();
  rep.alpha0_slack = std::numeric_limits<double>::infinity();

  struct Partial {
    double max = -std::numeric_limits<double>::infinity();
    std::array<double, 7> arg{};
    double c = std::numeric_limits<double>::infinity();
    double slack0 = std::numeric_limits<double>::infinity();
  };
  const std::size_t n = grid.size();
  for (double alpha : options.alphas) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    std::vector<double> gain1(n), gain2(n);
    for (std::size_t i = 0; i < n; ++i) {
      gain1[i] = lambda * (grid[i].x0 * ca + grid[i].x1 * sa);
      gain2[i] = lambda * (grid[i].x0 * ca - grid[i].x1 * sa);
    }
    auto parts = map_chunks(n, 8, [&](std::uint64_t begin, std::uint64_t end) {
      Partial part;
      std::vector<double> dist(n);
      for (std::uint64_t ix = begin; ix < end; ++ix) {
        const Point& x = grid[ix];
        const double base = cost[x.ring];
        for (std::size_t j = 0; j < n; ++j) dist[j] = std::hypot(grid[j].x0 - x.x0, grid[j].x1 - x.x1);
        for (std::size_t i = 0; i < n; ++i) {
          const double g1 = gain1[i] - base;
          for (std::size_t j = 0; j < n; ++j) {
            const double h = g1 + gain2[j] - (lambda + epsilon) * std::max(dist[i], dist[j]);
            if (h > part.max) {
              part.max = h;
              part.arg = {alpha, x.x0, x.x1, grid[i].x0, grid[i].x1, grid[j].x0, grid[j].x1};
            }
            const double slack = rep.h_reference - h - slope * (r - std::max(grid[i].norm, grid[j].norm));
            if (alpha > 0) {
              part.c = std::min(part.c, slack / (alpha * alpha));
            } else {
              part.slack0 = std::min(part.slack0, slack);
            }
          }
        }
      }
      return part;
    });
    for (const auto& part : parts) {
      if (part.max > rep.grid_max) {
        rep.grid_max = part.max;
        rep.argmax_alpha = part.arg[0];
        std::copy(part.arg.begin() + 1, part.arg.end(), rep.argmax);
      }
      rep.best_c = std::min(rep.best_c, part.c);
      rep.alpha0_slack = std::min(rep.alpha0_slack, part.slack0);
    }
  }

  const double tol = 1e-9 * std::max(1.0, std::fabs(rep.h_reference));
  rep.max_at_reference = rep.grid_max <= rep.h_reference + tol && rep.argmax_alpha == 0.0 &&
                         std::fabs(rep.argmax[0] - r) < 1e-12 * r && rep.argmax[1] == 0.0 &&
                         std::fabs(rep.argmax[2] - r) < 1e-12 * r && rep.argmax[3] == 0.0 &&
                         std::fabs(rep.argmax[4] - r) < 1e-12 * r && rep.argmax[5] == 0.0;

  const auto half = rate_function(handle, 0.5 * r / s);
  rep.half_radius_deficit = rep.h_reference - (lambda * r - s * half.value);
  rep.half_radius_bound = slope * 0.5 * r;

  rep.pass = rep.max_at_reference && rep.best_c > 0 && rep.alpha0_slack >= -tol &&
             rep.half_radius_deficit >= rep.half_radius_bound;
  return rep;
}

}  // namespace brwlab

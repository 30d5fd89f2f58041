// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "brwlab/error.hpp"
#include "internal.hpp"

namespace brwlab {

namespace cli {

void config_error(const std::string& field, const std::string& what) {
  raise(ErrorKind::Config, field + ": " + what);
}

Reader::Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) config_error(path_.empty() ? "config" : path_, "expected an object");
}

std::string Reader::path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

bool Reader::has(const char* key) const { return node_.contains(key); }

const json& Reader::at(const char* key) const {
  if (!node_.contains(key)) config_error(path(key), "missing required field");
  return node_.at(key);
}

void Reader::require(bool ok, const char* key, const std::string& what) const {
  if (!ok) config_error(path(key), what);
}

Reader Reader::child(const char* key) const { return Reader(at(key), path(key)); }

std::vector<Reader> Reader::children(const char* key) const {
  const json& arr = at(key);
  if (!arr.is_array()) config_error(path(key), "expected an array");
  std::vector<Reader> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.emplace_back(arr[i], path(key) + "[" + std::to_string(i) + "]");
  return out;
}

std::int64_t Reader::integer(const char* key) const {
  const json& v = at(key);
  if (!v.is_number_integer()) config_error(path(key), "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t Reader::integer(const char* key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

double Reader::number(const char* key) const {
  const json& v = at(key);
  if (!v.is_number()) config_error(path(key), "expected a number");
  return v.get<double>();
}

double Reader::number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

bool Reader::boolean(const char* key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) config_error(path(key), "expected true or false");
  return v.get<bool>();
}

std::string Reader::string(const char* key) const {
  const json& v = at(key);
  if (!v.is_string()) config_error(path(key), "expected a string");
  return v.get<std::string>();
}

std::string Reader::string(const char* key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

std::vector<std::int64_t> Reader::integers(const char* key) const {
  const json& v = at(key);
  if (!v.is_array() || v.empty()) config_error(path(key), "expected a non-empty array of integers");
  std::vector<std::int64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) config_error(path(key), "expected a non-empty array of integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<double> Reader::numbers(const char* key) const {
  const json& v = at(key);
  if (!v.is_array() || v.empty()) config_error(path(key), "expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) config_error(path(key), "expected a non-empty array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

OffspringLaw read_law(const Reader& root) {
  const Reader node = root.child("law");
  try {
    return node.raw().get<OffspringLaw>();
  } catch (const Error& e) {
    config_error(root.path("law"), e.what());
  }
}

WalkLaw read_walk(const Reader& root) {
  const Reader node = root.child("walk");
  const std::string kind = node.string("kind");
  try {
    if (kind == "normal") return WalkLaw::normal();
    if (kind == "laplace") return WalkLaw::laplace(node.number("beta", 1.0));
    if (kind == "shifted_exponential") return WalkLaw::shifted_exponential(node.number("rate", 1.0));
    if (kind == "student_t") return WalkLaw::student_t(node.number("nu", 5.0));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(node.path("kind"), e.what());
  }
  config_error(node.path("kind"), "unknown walk '" + kind + "'");
}

BarrierFamily read_barrier(const Reader& node) {
  const std::string kind = node.string("kind");
  if (kind == "zero") return ZeroBarrier{};
  if (kind == "log") return LogBarrier{node.number("c1", 1.0), node.number("c2", 0.0)};
  config_error(node.path("kind"), "unknown barrier '" + kind + "' (expected zero or log)");
}

std::string describe_barrier(const BarrierFamily& family) {
  if (std::holds_alternative<ZeroBarrier>(family)) return "zero";
  if (const auto* log = std::get_if<LogBarrier>(&family))
    return "log(c1=" + fmt(log->c1) + ";c2=" + fmt(log->c2) + ")";
  return "front";
}

PathFunctional read_functional(const Reader& node, int horizon, int dimension) {
  const std::string kind = node.string("kind");
  if (kind == "constant") return PathFunctional::constant(horizon, node.number("value", 1.0));
  if (kind == "norm_ball") {
    const double rho = node.number("radius");
    node.require(rho >= 0, "radius", "must be non-negative");
    return PathFunctional::endpoint_norm_ball(horizon, rho);
  }
  if (kind == "halfspace") {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dimension);
    theta[0] = 1.0;
    if (node.has("theta")) {
      const auto v = node.numbers("theta");
      node.require(static_cast<int>(v.size()) == dimension, "theta", "length must equal the law dimension");
      for (int i = 0; i < dimension; ++i) theta[i] = v[i];
      node.require(theta.norm() > 0, "theta", "must be non-zero");
    }
    return PathFunctional::endpoint_halfspace(horizon, theta, node.number("offset", 0.0));
  }
  if (kind == "barrier") {
    return PathFunctional::barrier_indicator(horizon, read_barrier(node.child("barrier")),
                                             node.number("slack", 0.0));
  }
  if (kind == "exp_projection") return PathFunctional::exp_projection(horizon, node.number("u"));
  config_error(node.path("kind"), "unknown functional '" + kind + "'");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

CheckResult check_le(std::string name, double statistic, double threshold) {
  return {std::move(name), statistic, "<=", threshold, statistic <= threshold};
}

CheckResult check_ge(std::string name, double statistic, double threshold) {
  return {std::move(name), statistic, ">=", threshold, statistic >= threshold};
}

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

}  // namespace cli

double CheckResult::margin() const {
  if (relation == ">=") return statistic - threshold;
  if (relation == "<=") return threshold - statistic;
  return -std::fabs(statistic - threshold);
}

bool RunOutcome::pass() const {
  return !interrupted && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

ExperimentConfig parse_config(nlohmann::json document, std::optional<std::uint64_t> seed_override) {
  using cli::config_error;
  if (!document.is_object()) config_error("config", "expected an object");
  if (seed_override) document["seed"] = *seed_override;

  const cli::Reader root(document, "");
  ExperimentConfig cfg;
  cfg.kind = root.string("kind");
  if (std::find(std::begin(kExperimentKinds), std::end(kExperimentKinds), cfg.kind) == std::end(kExperimentKinds))
    config_error("kind", "unknown experiment kind '" + cfg.kind + "'");
  if (!document.contains("seed")) config_error("seed", "missing required field");
  if (!document["seed"].is_number_unsigned() && !(document["seed"].is_number_integer() && document["seed"].get<std::int64_t>() >= 0))
    config_error("seed", "expected a non-negative integer");
  cfg.seed = document["seed"].get<std::uint64_t>();
  cfg.document = document;
  cfg.hash = cli::fnv1a_hex(document.dump());
  cli::validate_kind(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Config, path.string() + ": cannot open config file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return parse_config(std::move(doc), seed_override);
}

}  // namespace brwlab

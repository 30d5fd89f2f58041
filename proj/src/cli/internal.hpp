// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "brwlab/ballot.hpp"
#include "brwlab/cli.hpp"
#include "brwlab/manytofew.hpp"

namespace brwlab::cli {

using nlohmann::json;

/// Typed access to one JSON object with field paths in error messages.
class Reader {
 public:
  Reader(const json& node, std::string path);

  bool has(const char* key) const;
  const json& raw() const { return node_; }
  std::string path(const char* key) const;

  Reader child(const char* key) const;
  std::vector<Reader> children(const char* key) const;

  std::int64_t integer(const char* key) const;
  std::int64_t integer(const char* key, std::int64_t fallback) const;
  double number(const char* key) const;
  double number(const char* key, double fallback) const;
  bool boolean(const char* key, bool fallback) const;
  std::string string(const char* key) const;
  std::string string(const char* key, const std::string& fallback) const;
  std::vector<std::int64_t> integers(const char* key) const;
  std::vector<double> numbers(const char* key) const;

  /// Throws a Config error for `key` unless ok.
  void require(bool ok, const char* key, const std::string& what) const;

 private:
  const json& at(const char* key) const;

  const json& node_;
  std::string path_;
};

[[noreturn]] void config_error(const std::string& field, const std::string& what);

OffspringLaw read_law(const Reader& root);
WalkLaw read_walk(const Reader& root);
BarrierFamily read_barrier(const Reader& node);
PathFunctional read_functional(const Reader& node, int horizon, int dimension);
std::string describe_barrier(const BarrierFamily& family);

/// Number formatting shared by every table.
std::string fmt(double v);

/// CSV table whose rows start with the seed and config hash.
class Table {
 public:
  Table(std::string name, std::vector<std::string> columns);
  void row(std::vector<std::string> cells);
  const std::string& name() const { return name_; }
  std::size_t size() const { return rows_.size(); }
  void write(const std::filesystem::path& file, std::uint64_t seed, const std::string& hash) const;

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  ///< band, empty for none
  std::vector<double> hi;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

void write_svg(const std::filesystem::path& file, const Plot& plot);

/// What an experiment hands back to the runner.
struct Products {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, Plot>> plots;
  std::vector<CheckResult> checks;
};

CheckResult check_le(std::string name, double statistic, double threshold);
CheckResult check_ge(std::string name, double statistic, double threshold);

/// Validates the kind-specific part of a config; run_kind repeats the
/// parsing and does the work.
void validate_kind(const ExperimentConfig& config);
void run_kind(const ExperimentConfig& config, Products& out, const std::atomic<bool>* interrupt);

}  // namespace brwlab::cli

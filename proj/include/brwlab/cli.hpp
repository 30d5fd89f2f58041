// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "brwlab/cumulant.hpp"
#include "brwlab/model.hpp"

namespace brwlab {

inline constexpr const char* kExperimentKinds[] = {
    "front",          "tightness",        "many_to_one",  "many_to_two",
    "first_moment",   "ballot_scaling",   "barrier_survival", "hitting_tail",
    "ladder",         "geometry_suite",   "inequality_suite",
};

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  nlohmann::json document;  ///< effective config, overrides applied
  std::string hash;         ///< 16 hex digits of FNV-1a over the canonical dump
};

/// Validates kind, seed, replica counts and the kind's parameters. Throws
/// Error(Config) naming the offending field.
ExperimentConfig parse_config(nlohmann::json document, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = {});

struct CheckResult {
  std::string name;
  double statistic = 0.0;
  std::string relation;  ///< "<=", ">=" or "=="
  double threshold = 0.0;
  bool pass = false;
  /// Distance to the threshold, positive when passing.
  double margin() const;
};

struct RunOutcome {
  std::filesystem::path directory;
  std::vector<CheckResult> checks;
  std::vector<std::string> files;
  double wall_seconds = 0.0;
  bool interrupted = false;
  bool pass() const;
};

/// Runs one experiment into out_dir/<kind>-<hash>/: CSV tables, SVG plots
/// and manifest.json. A set `interrupt` flag stops between table rows and
/// flushes what has been computed.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          const std::atomic<bool>* interrupt = nullptr);

struct SummaryRow {
  std::string run;
  std::string kind;
  std::string check;
  std::string status;  ///< PASS, FAIL or SKIP
  double statistic = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  std::string reason;
};

/// One row per check of every run directory under `dir`; unreadable or
/// missing manifests give SKIP rows.
std::vector<SummaryRow> summarize(const std::filesystem::path& dir);
void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Radii of surviving runs at selected times.
struct FrontStudy {
  LambdaSolution solution;
  std::vector<int> times;
  std::vector<std::vector<double>> radii;  ///< radii[i][run] at times[i]
  double acceptance = 0.0;
};
FrontStudy front_study(const OffspringLaw& law, const std::vector<int>& times, std::uint64_t cap,
                       std::size_t runs, std::uint64_t seed);

struct DriftComparison {
  double slope_linear = 0.0;  ///< OLS slope of median(R_t - gamma t)
  double slope_front = 0.0;   ///< OLS slope of median(R_t - r_t)
  double reduction = 0.0;     ///< 1 - |slope_front| / |slope_linear|
};
/// Slopes over the study times t >= t_from.
DriftComparison drift_comparison(const FrontStudy& study, int t_from = 1);
/// Interquartile range of R_t - r_t at times[i].
double residual_iqr(const FrontStudy& study, std::size_t i);

/// Entry point of the brwlab tool; returns the process exit code
/// (0 pass, 1 acceptance failure, 2 config error, 3 runtime error).
int cli_main(int argc, char** argv);

}  // namespace brwlab

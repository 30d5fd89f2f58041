// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"
#include "internal.hpp"

namespace brwlab {

namespace {

std::atomic<bool> g_interrupt{false};

extern "C" void on_sigint(int) { g_interrupt.store(true); }

int do_run(const std::string& config_path, std::optional<std::uint64_t> seed, int threads,
           const std::string& out_dir) {
  const auto cfg = load_config(config_path, seed);
  if (threads > 0) set_thread_count(threads);
  g_interrupt.store(false);
  auto previous = std::signal(SIGINT, on_sigint);
  RunOutcome outcome;
  try {
    outcome = run_experiment(cfg, out_dir, &g_interrupt);
  } catch (...) {
    std::signal(SIGINT, previous);
    throw;
  }
  std::signal(SIGINT, previous);

  std::cout << "run " << outcome.directory.string() << " (" << cli::fmt(outcome.wall_seconds) << " s)\n";
  for (const auto& c : outcome.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << cli::fmt(c.statistic) << ' ' << c.relation << ' '
              << cli::fmt(c.threshold) << '\n';
  }
  if (outcome.interrupted) {
    std::cerr << "interrupted; partial results written\n";
    return 3;
  }
  return outcome.pass() ? 0 : 1;
}

int do_summarize(const std::string& dir) {
  const auto rows = summarize(dir);
  print_summary(std::cout, rows);
  for (const auto& r : rows)
    if (r.status == "FAIL") return 1;
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"brwlab: branching random walk experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs", summary_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--threads", threads, "Worker threads (default: BRWLAB_THREADS or hardware)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");

  auto* sum = app.add_subcommand("summarize", "Tabulate the checks of all runs in a directory");
  sum->add_option("dir", summary_dir, "Directory of runs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return do_run(config_path, seed, threads, out_dir);
    return do_summarize(summary_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace brwlab

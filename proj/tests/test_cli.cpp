// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "brwlab/cli.hpp"
#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"

namespace fs = std::filesystem;
using brwlab::ErrorKind;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("brwlab_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json gaussian_law() {
  return json::parse(R"({"dimension": 2, "count_law": {"kind": "fixed", "params": {"k": 2}},
                         "radial_law": {"kind": "chi", "params": {"sigma": 1.0}}, "coupling": "iid"})");
}

std::string config_error_message(const json& doc) {
  try {
    brwlab::parse_config(doc);
  } catch (const brwlab::Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "brwlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return brwlab::cli_main(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  json doc = {{"kind", "no_such_kind"}, {"seed", 1}};
  CHECK(config_error_message(doc).find("kind") != std::string::npos);

  doc = {{"kind", "many_to_one"}, {"law", gaussian_law()}, {"replicas", 1000}, {"params", {{"n", 2}}}};
  CHECK(config_error_message(doc).find("seed") != std::string::npos);

  doc["seed"] = -4;
  CHECK(config_error_message(doc).find("seed") != std::string::npos);

  doc["seed"] = 4;
  doc["replicas"] = 999;
  CHECK(config_error_message(doc).find("replicas: must be at least 1000") != std::string::npos);

  doc["replicas"] = 1000;
  doc["params"]["n"] = 13;
  CHECK(config_error_message(doc).find("params.n") != std::string::npos);

  doc["params"]["n"] = 2;
  doc["params"]["functionals"] = json::array({{{"kind", "norm_ball"}}});
  CHECK(config_error_message(doc).find("params.functionals[0].radius") != std::string::npos);

  doc = {{"kind", "tightness"}, {"seed", 1}, {"law", gaussian_law()}, {"replicas", 1000},
         {"params", {{"t_values", {200, 100}}}}};
  CHECK(config_error_message(doc).find("params.t_values") != std::string::npos);

  doc = {{"kind", "ballot_scaling"}, {"seed", 1}, {"walk", {{"kind", "cauchy"}}}, {"replicas", 1000},
         {"params", {{"n_values", {64}}}}};
  CHECK(config_error_message(doc).find("walk.kind") != std::string::npos);

  doc = {{"kind", "front"}, {"seed", 1}, {"replicas", 1000}, {"params", {{"t_max", 10}}},
         {"law", {{"dimension", 1}}}};
  CHECK(config_error_message(doc).find("law") != std::string::npos);

  const json ok = {{"kind", "many_to_one"}, {"seed", 9}, {"law", gaussian_law()}, {"replicas", 1000},
                   {"params", {{"n", 2}}}};
  const auto cfg = brwlab::parse_config(ok);
  CHECK(cfg.hash.size() == 16);
  CHECK(brwlab::parse_config(ok, 10).hash != cfg.hash);
  CHECK(brwlab::parse_config(ok, 10).seed == 10);
}

TEST_CASE("exit codes of the tool") {
  const auto dir = scratch_dir("exit");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"kind": "warp_drive", "seed": 1})";
  CHECK(run_main({"run", bad.string(), "--out", (dir / "out").string()}) == 2);
  CHECK(run_main({"run", (dir / "missing.json").string()}) == 2);
  CHECK(run_main({"frobnicate"}) == 2);
  CHECK(run_main({"summarize", (dir / "nope").string()}) == 2);

  const fs::path unseeded = dir / "unseeded.json";
  std::ofstream(unseeded) << R"({"kind": "geometry_suite"})";
  CHECK(run_main({"run", unseeded.string(), "--out", (dir / "out").string()}) == 2);
  CHECK(run_main({"run", unseeded.string(), "--seed", "5", "--out", (dir / "out").string()}) == 0);
}

TEST_CASE("many_to_one with f = 1 and two children reproduces m^n") {
  const auto dir = scratch_dir("mto");
  const json doc = {{"kind", "many_to_one"}, {"seed", 3}, {"law", gaussian_law()}, {"replicas", 1000},
                    {"params", {{"n", 2}, {"functionals", json::array({{{"kind", "constant"}}})}}}};
  const auto cfg = brwlab::parse_config(doc);
  const auto outcome = brwlab::run_experiment(cfg, dir);
  CHECK(outcome.pass());
  REQUIRE(outcome.checks.size() == 1);

  std::ifstream in(outcome.directory / "many_to_one.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "seed,config_hash,n,functional,lhs,lhs_se,rhs,rhs_se,z");
  const auto cells = split_csv_row(row);
  REQUIRE(cells.size() == 9);
  CHECK(cells[0] == "3");
  CHECK(cells[1] == cfg.hash);
  CHECK(cells[3] == "f0_constant");
  CHECK(std::stod(cells[4]) == 4.0);
  CHECK(std::stod(cells[6]) == 4.0);
  CHECK(std::stod(cells[8]) == 0.0);

  const json manifest = json::parse(slurp(outcome.directory / "manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["config_hash"] == cfg.hash);
  CHECK(manifest.contains("wall_seconds"));
  CHECK(manifest["versions"].contains("brwlab"));
  CHECK(manifest["pass"] == true);
}

TEST_CASE("summarize: empty directory, corrupted manifest, passing front run") {
  const auto empty = scratch_dir("sum_empty");
  CHECK(brwlab::summarize(empty).empty());
  CHECK(run_main({"summarize", empty.string()}) == 0);

  const auto corrupt = scratch_dir("sum_corrupt");
  fs::create_directories(corrupt / "broken");
  std::ofstream(corrupt / "broken" / "manifest.json") << "{ not json";
  auto rows = brwlab::summarize(corrupt);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "SKIP");
  CHECK(rows[0].reason.find("corrupted manifest") != std::string::npos);
  CHECK(run_main({"summarize", corrupt.string()}) == 0);

  const auto front = scratch_dir("sum_front");
  const json doc = {{"kind", "front"}, {"seed", 21}, {"law", gaussian_law()}, {"replicas", 1000},
                    {"params", {{"t_max", 12}, {"speed_tolerance", 0.3}}}};
  const auto outcome = brwlab::run_experiment(brwlab::parse_config(doc), front);
  CHECK(outcome.pass());
  rows = brwlab::summarize(front);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "PASS");
  CHECK(rows[0].kind == "front");
  CHECK(rows[0].margin > 0);
  CHECK(fs::exists(outcome.directory / "front_residual_quantiles.svg"));

  std::ifstream in(outcome.directory / "front.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "seed,config_hash,t,median_R,r_t,residual,q10,q25,q75,q90");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 12);

  std::ostringstream table;
  brwlab::print_summary(table, rows);
  CHECK(table.str().find("PASS") != std::string::npos);
}

TEST_CASE("an interrupted run still writes its manifest") {
  const auto dir = scratch_dir("interrupt");
  const json doc = {{"kind", "hitting_tail"}, {"seed", 2}, {"walk", {{"kind", "normal"}}}, {"replicas", 1000},
                    {"params", {{"n_values", {10, 20}}}}};
  std::atomic<bool> flag{true};
  const auto outcome = brwlab::run_experiment(brwlab::parse_config(doc), dir, &flag);
  CHECK(outcome.interrupted);
  CHECK_FALSE(outcome.pass());
  const json manifest = json::parse(slurp(outcome.directory / "manifest.json"));
  CHECK(manifest["interrupted"] == true);
  CHECK(manifest["pass"] == false);
}

TEST_CASE("CSV output does not depend on the thread count") {
  const std::vector<json> docs = {
      {{"kind", "many_to_two"}, {"seed", 5}, {"law", gaussian_law()}, {"replicas", 2000},
       {"params",
        {{"n", 2},
         {"pairs", json::array({{{"first", {{"kind", "halfspace"}, {"offset", 0.5}}},
                                 {"second", {{"kind", "halfspace"}, {"offset", 0.5}}}}})}}}},
      {{"kind", "first_moment"}, {"seed", 6}, {"law", gaussian_law()}, {"replicas", 2000},
       {"params", {{"t_values", {9, 16}}, {"y_values", {1.0}}}}},
      {{"kind", "ballot_scaling"}, {"seed", 7}, {"walk", {{"kind", "laplace"}}}, {"replicas", 4000},
       {"params", {{"n_values", {16, 300}}, {"block", 500}}}},
      {{"kind", "ladder"}, {"seed", 8}, {"walk", {{"kind", "normal"}}}, {"replicas", 1000},
       {"params", {{"levels", {0.0, 2.0}}}}},
  };
  const int saved = brwlab::thread_count();
  for (const auto& doc : docs) {
    CAPTURE(doc["kind"]);
    const auto cfg = brwlab::parse_config(doc);
    brwlab::set_thread_count(1);
    const auto one = brwlab::run_experiment(cfg, scratch_dir("threads1"));
    brwlab::set_thread_count(8);
    const auto eight = brwlab::run_experiment(cfg, scratch_dir("threads8"));
    REQUIRE(one.files == eight.files);
    for (const auto& f : one.files) {
      if (f.ends_with(".csv")) CHECK(slurp(one.directory / f) == slurp(eight.directory / f));
    }
  }
  brwlab::set_thread_count(saved);
}

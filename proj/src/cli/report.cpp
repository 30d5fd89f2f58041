// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "brwlab/error.hpp"
#include "brwlab/parallel.hpp"
#include "internal.hpp"

#ifndef BRWLAB_VERSION
#define BRWLAB_VERSION "0.0.0"
#endif

namespace brwlab {

namespace fs = std::filesystem;

namespace cli {

Table::Table(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void Table::row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) raise(ErrorKind::InvalidArgument, "table row width mismatch in " + name_);
  rows_.push_back(std::move(cells));
}

void Table::write(const fs::path& file, std::uint64_t seed, const std::string& hash) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) raise(ErrorKind::Config, file.string() + ": cannot write");
  out << "seed,config_hash";
  for (const auto& c : columns_) out << ',' << c;
  out << '\n';
  for (const auto& r : rows_) {
    out << seed << ',' << hash;
    for (const auto& c : r) out << ',' << c;
    out << '\n';
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_svg(const fs::path& file, const Plot& plot) {
  constexpr double W = 720, H = 460, L = 80, R = 180, T = 40, B = 60;
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable_x = [&](double v) { return std::isfinite(v) && (!plot.log_x || v > 0); };
  auto usable_y = [&](double v) { return std::isfinite(v) && (!plot.log_y || v > 0); };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable_x(s.x[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      for (const auto* v : {&s.y, &s.lo, &s.hi}) {
        if (i < v->size() && usable_y((*v)[i])) {
          y0 = std::min(y0, ty((*v)[i]));
          y1 = std::max(y1, ty((*v)[i]));
        }
      }
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ofstream out(file, std::ios::binary);
  if (!out) raise(ErrorKind::Config, file.string() + ": cannot write");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(plot.title) << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double vx = plot.log_x ? std::pow(10.0, fx) : fx, vy = plot.log_y ? std::pow(10.0, fy) : fy;
    out << "<text x=\"" << svg_num(px(vx)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
        << tick(vx) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << svg_num(py(vy) + 4) << "\" text-anchor=\"end\">"
        << tick(vy) << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << xml_escape(plot.x_label) << (plot.log_x ? " (log)" : "") << "</text>\n";
  out << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (T + H - B) / 2 << ")\">" << xml_escape(plot.y_label) << (plot.log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = colors[si % 6];
    if (!s.lo.empty() && s.lo.size() == s.x.size() && s.hi.size() == s.x.size()) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (usable_x(s.x[i]) && usable_y(s.hi[i])) pts += svg_num(px(s.x[i])) + "," + svg_num(py(s.hi[i])) + " ";
      for (std::size_t i = s.x.size(); i-- > 0;)
        if (usable_x(s.x[i]) && usable_y(s.lo[i])) pts += svg_num(px(s.x[i])) + "," + svg_num(py(s.lo[i])) + " ";
      out << "<polygon points=\"" << pts << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable_x(s.x[i]) && usable_y(s.y[i])) pts += svg_num(px(s.x[i])) + "," + svg_num(py(s.y[i])) + " ";
    out << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable_x(s.x[i]) && usable_y(s.y[i]))
        out << "<circle cx=\"" << svg_num(px(s.x[i])) << "\" cy=\"" << svg_num(py(s.y[i])) << "\" r=\"2.5\" fill=\""
            << color << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cli

RunOutcome run_experiment(const ExperimentConfig& config, const fs::path& out_dir,
                          const std::atomic<bool>* interrupt) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.directory = out_dir / (config.kind + "-" + config.hash.substr(0, 12));
  std::error_code ec;
  fs::create_directories(outcome.directory, ec);
  if (ec) raise(ErrorKind::Config, outcome.directory.string() + ": " + ec.message());

  cli::Products products;
  std::exception_ptr failure;
  try {
    cli::run_kind(config, products, interrupt);
  } catch (...) {
    failure = std::current_exception();
  }
  outcome.interrupted = interrupt != nullptr && interrupt->load();

  for (const auto& table : products.tables) {
    const std::string name = table.name() + ".csv";
    table.write(outcome.directory / name, config.seed, config.hash);
    outcome.files.push_back(name);
  }
  for (const auto& [name, plot] : products.plots) {
    cli::write_svg(outcome.directory / (name + ".svg"), plot);
    outcome.files.push_back(name + ".svg");
  }
  outcome.checks = products.checks;
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest;
  manifest["kind"] = config.kind;
  manifest["seed"] = config.seed;
  manifest["config_hash"] = config.hash;
  manifest["config"] = config.document;
  manifest["wall_seconds"] = outcome.wall_seconds;
  manifest["threads"] = thread_count();
  manifest["versions"] = {
      {"brwlab", BRWLAB_VERSION},
      {"compiler", __VERSION__},
      {"boost", BOOST_LIB_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
  manifest["files"] = outcome.files;
  manifest["checks"] = nlohmann::json::array();
  for (const auto& c : outcome.checks) {
    manifest["checks"].push_back({{"name", c.name},
                                  {"statistic", c.statistic},
                                  {"relation", c.relation},
                                  {"threshold", c.threshold},
                                  {"margin", c.margin()},
                                  {"pass", c.pass}});
  }
  manifest["interrupted"] = outcome.interrupted;
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      manifest["error"] = e.what();
    }
  }
  manifest["pass"] = !failure && outcome.pass();
  std::ofstream(outcome.directory / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';

  if (failure) std::rethrow_exception(failure);
  return outcome;
}

std::vector<SummaryRow> summarize(const fs::path& dir) {
  if (!fs::is_directory(dir)) raise(ErrorKind::Config, dir.string() + ": not a directory");
  std::vector<fs::path> runs;
  if (fs::exists(dir / "manifest.json")) runs.push_back(dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) runs.push_back(entry.path());
  std::sort(runs.begin(), runs.end());

  std::vector<SummaryRow> rows;
  for (const auto& run : runs) {
    SummaryRow skip;
    skip.run = run.filename().string();
    skip.status = "SKIP";
    const fs::path file = run / "manifest.json";
    if (!fs::exists(file)) {
      skip.reason = "missing manifest.json";
      rows.push_back(skip);
      continue;
    }
    nlohmann::json m;
    try {
      std::ifstream in(file);
      m = nlohmann::json::parse(in);
      skip.kind = m.at("kind").get<std::string>();
      const auto& checks = m.at("checks");
      if (!checks.is_array()) throw std::runtime_error("checks is not an array");
      if (checks.empty()) {
        skip.reason = m.contains("error") ? m["error"].get<std::string>() : "no checks recorded";
        rows.push_back(skip);
        continue;
      }
      std::vector<SummaryRow> parsed;
      for (const auto& c : checks) {
        SummaryRow r;
        r.run = skip.run;
        r.kind = skip.kind;
        r.check = c.at("name").get<std::string>();
        r.status = c.at("pass").get<bool>() ? "PASS" : "FAIL";
        auto num = [](const nlohmann::json& v) {
          return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
        };
        r.statistic = num(c.at("statistic"));
        r.threshold = num(c.at("threshold"));
        r.margin = num(c.at("margin"));
        if (m.value("interrupted", false)) r.reason = "interrupted";
        parsed.push_back(r);
      }
      rows.insert(rows.end(), parsed.begin(), parsed.end());
    } catch (const std::exception& e) {
      skip.reason = std::string("corrupted manifest: ") + e.what();
      rows.push_back(skip);
    }
  }
  return rows;
}

void print_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << std::left << std::setw(34) << "run" << std::setw(18) << "kind" << std::setw(40) << "check"
      << std::setw(7) << "status" << std::setw(14) << "statistic" << std::setw(14) << "threshold"
      << std::setw(14) << "margin" << "reason\n";
  for (const auto& r : rows) {
    const bool skipped = r.status == "SKIP";
    out << std::setw(34) << r.run << std::setw(18) << r.kind << std::setw(40) << r.check << std::setw(7)
        << r.status << std::setw(14) << (skipped ? "" : cli::fmt(r.statistic)) << std::setw(14)
        << (skipped ? "" : cli::fmt(r.threshold)) << std::setw(14) << (skipped ? "" : cli::fmt(r.margin))
        << r.reason << '\n';
  }
}

}  // namespace brwlab

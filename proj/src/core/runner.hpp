#pragma once
#include <filesystem>

#include "config.hpp"
#include "csv.hpp"
#include "pipeline.hpp"

namespace td {

inline constexpr const char *version_string = "0.1.0";

struct RunResult {
  std::vector<std::filesystem::path> files;
  TimescaleReport report;
};

// Experiment runners behind the CLI subcommands. Every artifact carries a
// header with the normalized config and the code version.
RunResult run_eigen(const SimConfig &cfg);
RunResult run_decay(const SimConfig &cfg);
RunResult run_detector(const SimConfig &cfg);
RunResult run_closing_scan(const SimConfig &cfg);

// Bundled datasets behind every figure of the reference study.
RunResult reproduce_figure(const std::string &name, const std::string &out_dir,
                           int threads);

std::vector<std::string> known_figures();

// flat key = value text plus a one-row CSV
void write_report(const TimescaleReport &rep, const SimConfig &cfg,
                  const std::filesystem::path &dir, RunResult &result);

} // namespace td

#pragma once
#include <optional>
#include <string>
#include <vector>

#include "kgrid.hpp"
#include "spectral.hpp"

namespace td {

// One experiment's worth of parameters; validated against every module
// precondition before any computation starts.
struct SimConfig {
  // potential
  double U0 = 16.0;
  double a1 = 1.0;
  double a2 = 1.4;
  InitialStateKind initial_state = InitialStateKind::BoundGround;
  std::optional<double> closing_time; // absent = the barrier never closes

  // grid accuracy
  std::optional<double> k_max;
  std::size_t phase_budget = 3000000; // node budget
  double convergence_tol = 1e-6;

  // probes
  bool edge_traces = true;
  std::vector<double> detector_positions{120.0};
  double detector_dt = 0.05;
  double time_horizon = 60.0;

  // closing-time scan
  std::vector<double> scan_t0_values;
  bool scan_with_detector = false;

  std::string output_dir = ".";
  int threads = 0; // 0 = hardware concurrency; never affects results

  GridConfig grid_config() const;
  void validate() const; // throws BadConfig
};

SimConfig parse_config(const std::string &json_text);
SimConfig load_config_file(const std::string &path);
std::string config_to_json(const SimConfig &cfg); // normalized, deterministic

} // namespace td

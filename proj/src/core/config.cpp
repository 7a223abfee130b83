#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace td {

using nlohmann::json;

GridConfig SimConfig::grid_config() const {
  GridConfig g;
  g.k_max_override = k_max;
  g.node_budget = phase_budget;
  g.convergence_tol = convergence_tol;
  return g;
}

void SimConfig::validate() const {
  if (!(U0 > 0.0))
    throw bad_config("potential.U0 must be > 0");
  if (!(a1 > 0.0))
    throw bad_config("potential.a1 must be > 0");
  if (!(a2 > a1))
    throw bad_config("potential.a2 must exceed a1");
  if (closing_time && !(*closing_time > 0.0))
    throw bad_config("closing_time must be > 0 when present");
  if (k_max && !(*k_max > std::sqrt(2.0 * U0)))
    throw bad_config("grid.k_max must exceed sqrt(2 U0)");
  if (phase_budget < 16)
    throw bad_config("grid.phase_budget is too small");
  if (!(convergence_tol > 0.0))
    throw bad_config("grid.convergence_tol must be > 0");
  for (const double X : detector_positions)
    if (!(X > a2))
      throw bad_config("detector positions must lie beyond a2");
  if (!(detector_dt > 0.0))
    throw bad_config("probes.detector_dt must be > 0");
  if (!(time_horizon > 0.0))
    throw bad_config("probes.time_horizon must be > 0");
  for (const double t0 : scan_t0_values)
    if (!(t0 > 0.0) && !std::isinf(t0))
      throw bad_config("closing_scan.t0_values must be positive or inf");
  if (threads < 0)
    throw bad_config("threads must be >= 0");
  if (initial_state == InitialStateKind::BoundExcited) {
    // the excited state must exist: sqrt(2 U0) a1 > 3 pi / 2
    if (std::sqrt(2.0 * U0) * a1 <= 1.5 * pi)
      throw bad_config("the well holds no excited bound state at these "
                       "parameters");
  }
}

namespace {

void reject_unknown(const json &j, const std::set<std::string> &known,
                    const std::string &where) {
  for (const auto &item : j.items())
    if (!known.count(item.key()))
      throw bad_config("unknown key '" + item.key() + "' in " + where);
}

double number_or_inf(const json &v, const std::string &where) {
  if (v.is_string() && (v == "inf" || v == "infinity"))
    return std::numeric_limits<double>::infinity();
  if (v.is_number())
    return v.get<double>();
  throw bad_config(where + " must be a number or \"inf\"");
}

} // namespace

SimConfig parse_config(const std::string &json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  SimConfig cfg;
  reject_unknown(j,
                 {"potential", "initial_state", "closing_time", "grid",
                  "probes", "closing_scan", "output_dir", "threads"},
                 "config");

  if (j.contains("potential")) {
    const auto &p = j["potential"];
    reject_unknown(p, {"U0", "a1", "a2"}, "potential");
    cfg.U0 = p.value("U0", cfg.U0);
    cfg.a1 = p.value("a1", cfg.a1);
    cfg.a2 = p.value("a2", cfg.a2);
  }
  if (j.contains("initial_state"))
    cfg.initial_state =
        initial_state_kind_from_string(j["initial_state"].get<std::string>());
  if (j.contains("closing_time") && !j["closing_time"].is_null()) {
    const double t0 = number_or_inf(j["closing_time"], "closing_time");
    if (!std::isinf(t0))
      cfg.closing_time = t0;
  }
  if (j.contains("grid")) {
    const auto &g = j["grid"];
    reject_unknown(g, {"k_max", "phase_budget", "convergence_tol"}, "grid");
    if (g.contains("k_max") && !g["k_max"].is_null())
      cfg.k_max = g["k_max"].get<double>();
    if (g.contains("phase_budget"))
      cfg.phase_budget = g["phase_budget"].get<std::size_t>();
    if (g.contains("convergence_tol"))
      cfg.convergence_tol = g["convergence_tol"].get<double>();
  }
  if (j.contains("probes")) {
    const auto &p = j["probes"];
    reject_unknown(
        p, {"edge_traces", "detector_positions", "detector_dt", "time_horizon"},
        "probes");
    cfg.edge_traces = p.value("edge_traces", cfg.edge_traces);
    if (p.contains("detector_positions"))
      cfg.detector_positions =
          p["detector_positions"].get<std::vector<double>>();
    cfg.detector_dt = p.value("detector_dt", cfg.detector_dt);
    cfg.time_horizon = p.value("time_horizon", cfg.time_horizon);
  }
  if (j.contains("closing_scan")) {
    const auto &s = j["closing_scan"];
    reject_unknown(s, {"t0_values", "with_detector"}, "closing_scan");
    if (s.contains("t0_values")) {
      for (const auto &v : s["t0_values"])
        cfg.scan_t0_values.push_back(number_or_inf(v, "t0_values"));
    }
    cfg.scan_with_detector = s.value("with_detector", cfg.scan_with_detector);
  }
  if (j.contains("output_dir"))
    cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("threads"))
    cfg.threads = j["threads"].get<int>();

  cfg.validate();
  return cfg;
}

SimConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const SimConfig &cfg) {
  json j;
  j["potential"] = {{"U0", cfg.U0}, {"a1", cfg.a1}, {"a2", cfg.a2}};
  j["initial_state"] = to_string(cfg.initial_state);
  if (cfg.closing_time)
    j["closing_time"] = *cfg.closing_time;
  json grid;
  if (cfg.k_max)
    grid["k_max"] = *cfg.k_max;
  grid["phase_budget"] = cfg.phase_budget;
  grid["convergence_tol"] = cfg.convergence_tol;
  j["grid"] = grid;
  j["probes"] = {{"edge_traces", cfg.edge_traces},
                 {"detector_positions", cfg.detector_positions},
                 {"detector_dt", cfg.detector_dt},
                 {"time_horizon", cfg.time_horizon}};
  if (!cfg.scan_t0_values.empty()) {
    json sv = json::array();
    for (const double v : cfg.scan_t0_values) {
      if (std::isinf(v))
        sv.push_back("inf");
      else
        sv.push_back(v);
    }
    j["closing_scan"] = {{"t0_values", sv},
                         {"with_detector", cfg.scan_with_detector}};
  }
  // threads and output_dir are execution details: they never change results
  // and stay out of the embedded header so reruns compare bit-identical
  return j.dump();
}

} // namespace td

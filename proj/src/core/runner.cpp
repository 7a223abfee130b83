#include "runner.hpp"

#include <cmath>

#include "threading.hpp"

namespace td {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> header_for(const SimConfig &cfg,
                                    const std::string &what) {
  return {std::string("generated-by: tunneldecay ") + version_string,
          "dataset: " + what, "config: " + config_to_json(cfg)};
}

void write_trace(const fs::path &path, const SimConfig &cfg,
                 const std::string &what, const TraceSeries &trace,
                 RunResult &result) {
  CsvWriter csv(path, header_for(cfg, what), {"t", trace.observable});
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double row[2] = {trace.times[i], trace.values[i]};
    csv.row(row);
  }
  csv.close();
  result.files.push_back(path);
}

std::vector<double> uniform_times(double lo, double hi, double dt) {
  std::vector<double> ts;
  for (double t = lo; t <= hi + 1e-12; t += dt)
    ts.push_back(t);
  return ts;
}

ModelSetup make_model(const SimConfig &cfg) {
  return ModelSetup::create(cfg.U0, cfg.a1, cfg.a2, cfg.initial_state,
                            cfg.grid_config(), effective_threads(cfg.threads));
}

} // namespace

void write_report(const TimescaleReport &rep, const SimConfig &cfg,
                  const fs::path &dir, RunResult &result) {
  fs::create_directories(dir);
  const fs::path txt = dir / "report.txt";
  {
    std::ofstream out(txt, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorCode::Io, "cannot write " + txt.string());
    out << "# tunneldecay " << version_string << "\n";
    out << "# config = " << config_to_json(cfg) << "\n";
    const auto line = [&](const char *key, double v) {
      out << key << " = " << format_value(v) << "\n";
    };
    line("t_l", rep.t_l);
    out << "t_l_method = "
        << (rep.t_l_method.empty() ? "none" : rep.t_l_method) << "\n";
    line("t_l_slope", rep.t_l_slope);
    line("t_pl", rep.t_pl);
    line("t_pl_estimate", rep.t_pl_estimate);
    line("t_BL", rep.t_bl);
    line("T_k0", rep.T_k0);
    line("A_fit", rep.A_fit);
    line("detector_X", rep.detector_X);
    line("t_X", rep.t_X);
    line("detector_peak", rep.detector_peak);
    line("v_X", rep.v_X);
    line("v_tilde_p", rep.v_tilde_p);
    line("E_tilde_0", rep.E_tilde_0);
    line("t_tun1", rep.t_tun1);
    line("t_tun2", rep.t_tun2);
  }
  result.files.push_back(txt);

  const fs::path csv_path = dir / "report.csv";
  CsvWriter csv(csv_path, header_for(cfg, "timescale report"),
                {"t_l", "t_l_slope", "t_pl", "t_pl_estimate", "t_BL", "T_k0",
                 "A_fit", "detector_X", "t_X", "detector_peak", "v_X",
                 "v_tilde_p", "E_tilde_0", "t_tun1", "t_tun2"});
  const double row[15] = {rep.t_l,   rep.t_l_slope, rep.t_pl,
                          rep.t_pl_estimate, rep.t_bl, rep.T_k0,
                          rep.A_fit, rep.detector_X, rep.t_X,
                          rep.detector_peak, rep.v_X, rep.v_tilde_p,
                          rep.E_tilde_0, rep.t_tun1, rep.t_tun2};
  csv.row(row);
  csv.close();
  result.files.push_back(csv_path);
}

RunResult run_eigen(const SimConfig &cfg) {
  cfg.validate();
  RunResult result;
  const fs::path dir(cfg.output_dir);
  const auto well = make_step_well(cfg.U0, cfg.a1);
  const auto barrier = make_barrier(cfg.U0, cfg.a1, cfg.a2);
  const auto bound = solve_bound_states(well);

  {
    CsvWriter csv(dir / "bound_states.csv", header_for(cfg, "bound states"),
                  {"j", "E", "k", "kappa", "matching_residual"});
    for (const auto &b : bound) {
      const double row[5] = {static_cast<double>(b.index), b.energy, b.k,
                             b.kappa, b.matching_residual};
      csv.row(row);
    }
    csv.close();
    result.files.push_back(dir / "bound_states.csv");
  }
  {
    CsvWriter csv(dir / "continuum_states.csv",
                  header_for(cfg, "barrier-basis continuum states"),
                  {"k", "E", "C", "D", "F", "theta"});
    const double k_top = std::sqrt(2.0 * cfg.U0);
    for (double k = 0.05; k <= 3.0 * k_top; k += 0.05) {
      if (std::abs(k - k_top) <= 2.0 * threshold_window)
        continue;
      const auto st = continuum_state(barrier, k);
      const bool tun = st.kappa_sq > 0.0;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const double row[6] = {k,
                             st.energy,
                             st.inner_amp,
                             tun ? st.coeff_D() : nan,
                             tun ? st.coeff_F() : nan,
                             st.tail_phase};
      csv.row(row);
    }
    csv.close();
    result.files.push_back(dir / "continuum_states.csv");
  }
  {
    const auto psi0 = InitialState::make(cfg.initial_state, well);
    CsvWriter csv(dir / "gk.csv",
                  header_for(cfg, "opening amplitude G(k)"), {"k", "G"});
    for (double k = 0.002; k <= 8.0 + 1e-12; k += 0.002) {
      const double g =
          overlap_with_initial(psi0, continuum_state(barrier, k));
      const double row[2] = {k, g};
      csv.row(row);
    }
    csv.close();
    result.files.push_back(dir / "gk.csv");
  }
  return result;
}

RunResult run_decay(const SimConfig &cfg) {
  cfg.validate();
  RunResult result;
  const fs::path dir(cfg.output_dir);
  const auto model = make_model(cfg);

  TimescaleInputs in;
  in.trace_horizon = cfg.time_horizon;
  in.trace_dt = cfg.detector_dt;
  in.with_detector = false;
  result.report = extract_timescales(model, in);

  // w1 trace
  {
    const auto ev = model.open_evolution(cfg.a2 + 0.5, cfg.time_horizon,
                                         cfg.closing_time);
    std::shared_ptr<const Wavefunction> wf = ev;
    std::shared_ptr<const CombinedEvolution> combined;
    if (cfg.closing_time && *cfg.closing_time < cfg.time_horizon) {
      const auto run = model.close_at(*cfg.closing_time, cfg.a2 + 0.5,
                                      cfg.time_horizon - *cfg.closing_time);
      combined = run.combined;
      wf = combined;
    }
    const auto ts = uniform_times(0.0, cfg.time_horizon, cfg.detector_dt);
    TraceSeries w1;
    w1.observable = "w1";
    w1.probe_x = cfg.a1;
    w1.times = ts;
    w1.values = WellIntegrator(*wf, cfg.a1).trace(ts, model.threads());
    write_trace(dir / "w1.csv", cfg, "well probability w1(t)", w1, result);

    TraceSeries lng;
    lng.observable = "ln_g";
    lng.times = ts;
    lng.values.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
      lng.values[i] = std::log(w1.values[i] / w1.values.front());
    write_trace(dir / "ln_g.csv", cfg, "log relative well probability", lng,
                result);
  }

  if (cfg.edge_traces) {
    const double horizon = std::min(10.0, cfg.time_horizon);
    const auto ev = model.open_evolution(cfg.a2 + 0.5, horizon);
    for (const double xe : {cfg.a1, cfg.a2}) {
      const auto traces = detector_trace(*ev, xe, 0.0, horizon, 0.002,
                                         model.threads());
      const std::string tag = xe == cfg.a1 ? "a1" : "a2";
      write_trace(dir / ("edge_rho_" + tag + ".csv"), cfg,
                  "density at the barrier edge", traces.rho, result);
      write_trace(dir / ("edge_J_" + tag + ".csv"), cfg,
                  "flux at the barrier edge", traces.current, result);
    }
  }

  write_report(result.report, cfg, dir, result);
  return result;
}

RunResult run_detector(const SimConfig &cfg) {
  cfg.validate();
  RunResult result;
  const fs::path dir(cfg.output_dir);
  const auto model = make_model(cfg);
  if (cfg.detector_positions.empty())
    throw bad_config("detector run needs at least one detector position");

  const double X_ref =
      *std::max_element(cfg.detector_positions.begin(),
                        cfg.detector_positions.end());

  TimescaleInputs in;
  in.trace_horizon = std::min(cfg.time_horizon, 30.0);
  in.detector_X = X_ref;
  in.detector_dt = cfg.detector_dt;
  in.detector_horizon = cfg.time_horizon;
  result.report = extract_timescales(model, in);

  std::shared_ptr<const Wavefunction> wf;
  if (cfg.closing_time) {
    const auto run = model.close_at(*cfg.closing_time, X_ref + 3.0,
                                    cfg.time_horizon - *cfg.closing_time);
    wf = run.combined;
  } else {
    wf = model.open_evolution(X_ref + 3.0, cfg.time_horizon);
  }
  for (const double X : cfg.detector_positions) {
    const auto traces = detector_trace(*wf, X, 0.0, cfg.time_horizon,
                                       cfg.detector_dt, model.threads());
    const std::string tag = format_value(X);
    write_trace(dir / ("detector_rho_X" + tag + ".csv"), cfg,
                "density at a remote detector", traces.rho, result);
    write_trace(dir / ("detector_J_X" + tag + ".csv"), cfg,
                "flux at a remote detector", traces.current, result);
  }
  write_report(result.report, cfg, dir, result);
  return result;
}

RunResult run_closing_scan(const SimConfig &cfg) {
  cfg.validate();
  RunResult result;
  const fs::path dir(cfg.output_dir);
  const auto model = make_model(cfg);

  ClosingScanConfig scan;
  scan.t0_values = cfg.scan_t0_values;
  if (scan.t0_values.empty()) {
    TimescaleInputs in;
    in.trace_horizon = 40.0;
    in.with_detector = false;
    const double t_l = extract_timescales(model, in).t_l;
    scan.t0_values = {t_l / 9.0, t_l / 6.0, t_l / 3.0,
                      std::numeric_limits<double>::infinity()};
  }
  if (cfg.scan_with_detector) {
    scan.detector_X = cfg.detector_positions.empty()
                          ? 120.0
                          : cfg.detector_positions.front();
    scan.detector_dt = cfg.detector_dt;
    scan.detector_horizon = cfg.time_horizon;
  }
  const auto rows = closing_time_scan(model, scan);
  CsvWriter csv(dir / "closing_scan.csv",
                header_for(cfg, "closing-time scan"),
                {"t0", "escaped_fraction", "t_X"});
  for (const auto &r : rows) {
    const double row[3] = {r.t0, r.escaped_fraction, r.t_X};
    csv.row(row);
  }
  csv.close();
  result.files.push_back(dir / "closing_scan.csv");
  return result;
}

// ---------------------------------------------------------------------------
// figures

namespace {

SimConfig base_config(const std::string &out_dir, int threads) {
  SimConfig cfg;
  cfg.output_dir = out_dir;
  cfg.threads = threads;
  return cfg;
}

void fig_gk(const SimConfig &base, RunResult &result) {
  struct Curve {
    InitialStateKind kind;
    const char *file;
  };
  for (const Curve curve : {Curve{InitialStateKind::BoundGround, "fig2_Gk_ground.csv"},
                            Curve{InitialStateKind::InfiniteWell, "fig2_Gk_box.csv"}}) {
    SimConfig cfg = base;
    cfg.initial_state = curve.kind;
    cfg.a2 = cfg.a1 + width_for_opacity(cfg.U0, cfg.a1, 2.0, curve.kind);
    const auto well = make_step_well(cfg.U0, cfg.a1);
    const auto barrier = make_barrier(cfg.U0, cfg.a1, cfg.a2);
    const auto psi0 = InitialState::make(curve.kind, well);
    CsvWriter csv(fs::path(cfg.output_dir) / curve.file,
                  header_for(cfg, "opening amplitude G(k)"), {"k", "G"});
    for (double k = 0.002; k <= 8.0 + 1e-12; k += 0.002) {
      const double row[2] = {
          k, overlap_with_initial(psi0, continuum_state(barrier, k))};
      csv.row(row);
    }
    csv.close();
    result.files.push_back(fs::path(cfg.output_dir) / curve.file);
  }
}

void fig_decay_traces(const SimConfig &base, RunResult &result) {
  struct Curve {
    InitialStateKind kind;
    double U0;
    const char *file;
    const char *inset; // ln g over the first two time units
  };
  const Curve curves[] = {
      {InitialStateKind::BoundGround, 16.0, "fig3a_w1_U16.csv",
       "fig3a_lng_U16.csv"},
      {InitialStateKind::BoundGround, 10.0, "fig3a_w1_U10.csv",
       "fig3a_lng_U10.csv"},
      {InitialStateKind::InfiniteWell, 16.0, "fig3b_w1_U16.csv",
       "fig3b_lng_U16.csv"},
      {InitialStateKind::InfiniteWell, 10.0, "fig3b_w1_U10.csv",
       "fig3b_lng_U10.csv"},
  };
  for (const auto &c : curves) {
    SimConfig cfg = base;
    cfg.U0 = c.U0;
    cfg.initial_state = c.kind;
    cfg.a2 = cfg.a1 + width_for_opacity(c.U0, cfg.a1, 2.0, c.kind);
    cfg.time_horizon = 60.0;
    const auto model = make_model(cfg);
    const auto ev = model.open_evolution(cfg.a2 + 0.5, cfg.time_horizon);
    const auto ts = uniform_times(0.0, cfg.time_horizon, 0.05);
    TraceSeries w1;
    w1.observable = "w1";
    w1.times = ts;
    w1.values = WellIntegrator(*ev, cfg.a1).trace(ts, model.threads());
    write_trace(fs::path(cfg.output_dir) / c.file, cfg,
                "well probability (opacity kappa d = 2)", w1, result);

    const auto ts_in = uniform_times(0.0, 2.0, 0.002);
    TraceSeries lng;
    lng.observable = "ln_g";
    lng.times = ts_in;
    lng.values = WellIntegrator(*ev, cfg.a1).trace(ts_in, model.threads());
    const double w10 = lng.values.front();
    for (auto &v : lng.values)
      v = std::log(v / w10);
    write_trace(fs::path(cfg.output_dir) / c.inset, cfg,
                "short-time log relative well probability", lng, result);
  }
}

void fig_edge_flux(const SimConfig &base, RunResult &result) {
  // (a)/(b): edge fluxes across barrier heights at fixed opacity
  for (const double U0 : {24.0, 16.0, 10.0}) {
    SimConfig cfg = base;
    cfg.U0 = U0;
    cfg.a2 = cfg.a1 + width_for_opacity(U0, cfg.a1, 2.0);
    const auto model = make_model(cfg);
    const auto ev = model.open_evolution(cfg.a2 + 0.5, 4.0);
    for (const double xe : {cfg.a1, cfg.a2}) {
      const auto traces =
          detector_trace(*ev, xe, 0.0, 4.0, 0.002, model.threads());
      const std::string tag = xe == cfg.a1 ? "a1" : "a2";
      const std::string name =
          "fig4_J_" + tag + "_U" + std::to_string(static_cast<int>(U0)) +
          ".csv";
      write_trace(fs::path(cfg.output_dir) / name, cfg,
                  "edge flux (kappa d = 2)", traces.current, result);
      if (U0 == 16.0) {
        const std::string rho_name = "fig4_rho_" + tag + "_U16.csv";
        write_trace(fs::path(cfg.output_dir) / rho_name, cfg,
                    "edge density (kappa d = 2)", traces.rho, result);
      }
    }
  }
}

void fig_plateau_sweeps(const SimConfig &base, RunResult &result) {
  for (const double kd : {1.5, 2.0, 2.5}) {
    { // width sweep at fixed height
      SimConfig cfg = base;
      cfg.a2 = cfg.a1 + width_for_opacity(cfg.U0, cfg.a1, kd);
      const auto model = make_model(cfg);
      const auto ev = model.open_evolution(cfg.a2 + 0.5, 4.0);
      const auto traces =
          detector_trace(*ev, cfg.a2, 0.0, 4.0, 0.002, model.threads());
      const std::string name =
          "fig5a_J_a2_kd" + std::to_string(kd).substr(0, 3) + ".csv";
      write_trace(fs::path(cfg.output_dir) / name, cfg,
                  "exit flux, width sweep", traces.current, result);
    }
    { // height sweep at fixed a2
      SimConfig cfg = base;
      cfg.U0 = height_for_opacity(cfg.a1, cfg.a2, kd);
      const auto model = make_model(cfg);
      const auto ev = model.open_evolution(cfg.a2 + 0.5, 4.0);
      const auto traces =
          detector_trace(*ev, cfg.a2, 0.0, 4.0, 0.002, model.threads());
      const std::string name =
          "fig5b_J_a2_kd" + std::to_string(kd).substr(0, 3) + ".csv";
      write_trace(fs::path(cfg.output_dir) / name, cfg,
                  "exit flux, height sweep", traces.current, result);
    }
  }
}

void fig_transparent(const SimConfig &base, RunResult &result) {
  struct Case {
    double U0, a2;
    const char *file;
  };
  for (const Case c : {Case{16.0, 1.05, "fig6_J_a2_U16.csv"},
                       Case{10.0, 1.06, "fig6_J_a2_U10.csv"}}) {
    SimConfig cfg = base;
    cfg.U0 = c.U0;
    cfg.a2 = c.a2;
    const auto model = make_model(cfg);
    const auto ev = model.open_evolution(cfg.a2 + 0.5, 4.0);
    const auto traces =
        detector_trace(*ev, cfg.a2, 0.0, 4.0, 0.002, model.threads());
    write_trace(fs::path(cfg.output_dir) / c.file, cfg,
                "exit flux, transparent barrier", traces.current, result);
  }
}

void fig_box_edges(const SimConfig &base, RunResult &result) {
  SimConfig cfg = base;
  cfg.U0 = 10.0;
  cfg.a2 = 1.63;
  cfg.initial_state = InitialStateKind::InfiniteWell;
  const auto model = make_model(cfg);
  const auto ev = model.open_evolution(cfg.a2 + 0.5, 4.0);
  for (const double xe : {cfg.a1, cfg.a2}) {
    const auto traces =
        detector_trace(*ev, xe, 0.0, 4.0, 0.002, model.threads());
    const std::string tag = xe == cfg.a1 ? "a1" : "a2";
    write_trace(fs::path(cfg.output_dir) / ("fig7_rho_" + tag + ".csv"), cfg,
                "edge density, box initial state", traces.rho, result);
  }
}

void fig_detectors(const SimConfig &base, RunResult &result) {
  SimConfig cfg = base;
  cfg.time_horizon = 80.0;
  const auto model = make_model(cfg);
  const auto ev = model.open_evolution(121.0, cfg.time_horizon);
  for (const double X : {60.0, 90.0, 120.0}) {
    const auto traces = detector_trace(*ev, X, 0.0, cfg.time_horizon, 0.05,
                                       model.threads());
    const std::string name =
        "fig8_rho_X" + std::to_string(static_cast<int>(X)) + ".csv";
    write_trace(fs::path(cfg.output_dir) / name, cfg,
                "density at a remote detector", traces.rho, result);
  }
}

void fig_flux_mesh(const SimConfig &base, RunResult &result) {
  SimConfig cfg = base;
  const auto model = make_model(cfg);
  struct Window {
    double x0, x1, dx, t0, t1, dt;
    const char *file;
  };
  const Window windows[] = {
      {0.0, 6.0, 0.05, 0.0, 3.0, 0.05, "fig9a_J_mesh.csv"},
      {80.0, 130.0, 0.5, 30.0, 60.0, 0.25, "fig9b_J_mesh.csv"},
  };
  for (const auto &w : windows) {
    const auto ev = model.open_evolution(w.x1 + 0.5, w.t1);
    std::vector<double> xs, ts;
    for (double x = w.x0; x <= w.x1 + 1e-12; x += w.dx)
      xs.push_back(x);
    for (double t = w.t0; t <= w.t1 + 1e-12; t += w.dt)
      ts.push_back(t);
    std::vector<WaveSample> smp(xs.size() * ts.size());
    ev->sample_matrix(xs, ts, smp, model.threads());
    CsvWriter csv(fs::path(cfg.output_dir) / w.file,
                  header_for(cfg, "flux on the (x, t) mesh"), {"x", "t", "J"});
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
      for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        const double row[3] = {xs[xi], ts[ti],
                               flux(smp[xi * ts.size() + ti])};
        csv.row(row);
      }
    csv.close();
    result.files.push_back(fs::path(cfg.output_dir) / w.file);
  }
}

void fig_closing(const SimConfig &base, RunResult &result) {
  SimConfig cfg = base;
  cfg.time_horizon = 80.0;
  const auto model = make_model(cfg);

  TimescaleInputs in;
  in.trace_horizon = 40.0;
  in.with_detector = false;
  const double t_l = extract_timescales(model, in).t_l;

  struct Case {
    double t0;
    const char *file;
  };
  const Case cases[] = {
      {std::numeric_limits<double>::infinity(), "fig10_J_X120_open.csv"},
      {t_l / 3.0, "fig10_J_X120_tl3.csv"},
      {t_l / 6.0, "fig10_J_X120_tl6.csv"},
      {t_l / 9.0, "fig10_J_X120_tl9.csv"},
  };
  for (const auto &c : cases) {
    std::shared_ptr<const Wavefunction> wf;
    if (std::isinf(c.t0)) {
      wf = model.open_evolution(121.0, cfg.time_horizon);
    } else {
      wf = model.close_at(c.t0, 121.0, cfg.time_horizon - c.t0).combined;
    }
    const auto traces =
        detector_trace(*wf, 120.0, 0.0, cfg.time_horizon, 0.05,
                       model.threads());
    SimConfig labeled = cfg;
    if (!std::isinf(c.t0))
      labeled.closing_time = c.t0;
    write_trace(fs::path(cfg.output_dir) / c.file, labeled,
                "detector flux with a closing barrier", traces.current,
                result);
  }
}

} // namespace

std::vector<std::string> known_figures() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6",
          "fig7", "fig8", "fig9", "fig10"};
}

RunResult reproduce_figure(const std::string &name, const std::string &out_dir,
                           int threads) {
  RunResult result;
  const SimConfig base = base_config(out_dir, threads);
  if (name == "fig2")
    fig_gk(base, result);
  else if (name == "fig3")
    fig_decay_traces(base, result);
  else if (name == "fig4")
    fig_edge_flux(base, result);
  else if (name == "fig5")
    fig_plateau_sweeps(base, result);
  else if (name == "fig6")
    fig_transparent(base, result);
  else if (name == "fig7")
    fig_box_edges(base, result);
  else if (name == "fig8")
    fig_detectors(base, result);
  else if (name == "fig9")
    fig_flux_mesh(base, result);
  else if (name == "fig10")
    fig_closing(base, result);
  else
    throw bad_config("unknown figure '" + name + "'");
  return result;
}

} // namespace td

#include "pipeline.hpp"

#include <cmath>

namespace td {

ModelSetup ModelSetup::create(double U0, double a1, double a2,
                              InitialStateKind kind, const GridConfig &cfg,
                              int threads) {
  ModelSetup m;
  m.U0_ = U0;
  m.a1_ = a1;
  m.a2_ = a2;
  m.cfg_ = cfg;
  m.threads_ = threads;
  m.well_ = make_step_well(U0, a1);
  m.barrier_ = make_barrier(U0, a1, a2);
  m.bound_ = solve_bound_states(m.well_);
  m.psi0_ = InitialState::make(kind, m.well_);
  m.open_ = std::make_shared<const SpectralDecomposition>(
      project_open(m.psi0_, m.barrier_, cfg));
  return m;
}

double ModelSetup::kappa() const {
  return std::sqrt(2.0 * (U0_ - psi0_.energy()));
}

std::shared_ptr<const SpectralEvolution>
ModelSetup::open_evolution(double x_max, double t_max,
                           std::optional<double> t_close) const {
  return std::make_shared<const SpectralEvolution>(
      SpectralEvolution::open(open_, x_max, t_max, cfg_, t_close, threads_));
}

ModelSetup::ClosedRun ModelSetup::close_at(double t0, double x_max,
                                           double t_max_after) const {
  if (!(t0 > 0.0))
    throw invalid_parameter("closing time must be positive");
  ClosedRun run;

  // the frozen field must be known wherever components above ~1e-4 of the
  // spectral peak have reached; beyond that the lost mass is < 1e-6
  const double k_field = open_->survey.k_effective(1e-4) * 1.3;
  const double extent = std::max(k_field * t0 * 1.15 + 60.0, 200.0);
  run.open_phase = open_evolution(extent, t0, t0);

  ClosedProjectionRequest req;
  req.t0 = t0;
  req.x_max = x_max;
  req.t_max = t_max_after;
  req.barrier_a2 = a2_;
  req.field_extent = extent;
  req.field_max_wavenumber = open_->survey.k_effective(1e-4) * 1.3;
  req.threads = threads_;

  const auto field = [ev = run.open_phase, t0,
                      threads = threads_](std::span<const double> xs,
                                          std::span<complex> psi) {
    // xs is uniform by construction of the projector
    const double h = xs.size() > 1 ? xs[1] - xs[0] : 1.0;
    ev->sample_uniform(xs[0], h, xs.size(), t0, psi, threads);
  };
  run.decomposition = std::make_shared<const SpectralDecomposition>(
      project_closed(field, well_, open_->survey, req, cfg_));
  run.closed_phase = std::make_shared<const SpectralEvolution>(
      SpectralEvolution::closed(run.decomposition, t0));
  run.combined = std::make_shared<const CombinedEvolution>(
      run.open_phase, run.closed_phase, t0);
  return run;
}

// ---------------------------------------------------------------------------

namespace {

double ground_energy(double U0, double a1, InitialStateKind kind) {
  if (kind == InitialStateKind::InfiniteWell)
    return 0.5 * pi * pi / (a1 * a1);
  const auto bound = solve_bound_states(make_step_well(U0, a1));
  const std::size_t j = kind == InitialStateKind::BoundExcited ? 1 : 0;
  if (bound.size() <= j)
    throw invalid_parameter("well too shallow for the requested state");
  return bound[j].energy;
}

} // namespace

double width_for_opacity(double U0, double a1, double kappa_d,
                         InitialStateKind kind) {
  const double E0 = ground_energy(U0, a1, kind);
  return kappa_d / std::sqrt(2.0 * (U0 - E0));
}

double height_for_opacity(double a1, double a2, double kappa_d,
                          InitialStateKind kind) {
  const double d = a2 - a1;
  if (!(d > 0.0))
    throw invalid_parameter("height_for_opacity needs a2 > a1");
  // solve kappa(U0) d = kappa_d by bisection; E0(U0) is monotone and slow
  double lo = 0.5 * kappa_d * kappa_d / (d * d) / 2.0 + 0.1;
  double hi = 2.0 * (kappa_d * kappa_d / (2.0 * d * d)) + 50.0;
  const auto f = [&](double U0) {
    return std::sqrt(2.0 * (U0 - ground_energy(U0, a1, kind))) * d - kappa_d;
  };
  while (f(lo) > 0.0)
    lo *= 0.5;
  while (f(hi) < 0.0)
    hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<ClosingScanRow> closing_time_scan(const ModelSetup &model,
                                              const ClosingScanConfig &scan) {
  if (scan.t0_values.empty())
    throw invalid_parameter("closing scan needs at least one t0");
  std::vector<ClosingScanRow> rows;
  for (const double t0 : scan.t0_values) {
    ClosingScanRow row;
    row.t0 = t0;
    if (std::isinf(t0)) {
      row.escaped_fraction = 1.0; // never closed: everything escapes
      if (scan.detector_X) {
        const auto ev = model.open_evolution(*scan.detector_X + 2.0,
                                             scan.detector_horizon);
        const auto traces =
            detector_trace(*ev, *scan.detector_X, 0.0, scan.detector_horizon,
                           scan.detector_dt, model.threads());
        row.t_X = first_peak(traces.current).t;
      }
      rows.push_back(row);
      continue;
    }
    const double x_max = scan.detector_X ? *scan.detector_X + 2.0 : 10.0;
    const double t_after = scan.detector_X ? scan.detector_horizon - t0 : 1.0;
    const auto run = model.close_at(t0, x_max, std::max(t_after, 1.0));
    double bound_mass = 0.0;
    for (const auto &b : run.decomposition->bound_coeffs)
      bound_mass += std::norm(b);
    row.escaped_fraction = 1.0 - bound_mass;
    if (scan.detector_X) {
      const auto traces =
          detector_trace(*run.combined, *scan.detector_X, 0.0,
                         scan.detector_horizon, scan.detector_dt,
                         model.threads());
      row.t_X = first_peak(traces.current).t;
    }
    rows.push_back(row);
  }
  return rows;
}

TimescaleReport extract_timescales(const ModelSetup &model,
                                   const TimescaleInputs &in) {
  TimescaleReport rep;
  const double E0 = model.E0();
  const double d = model.barrier_width();
  const double kappa = model.kappa();
  const double k0 = std::sqrt(2.0 * E0);
  rep.T_k0 = 2.0 / k0;
  rep.t_bl = bl_time(model.U0(), E0, d);
  rep.t_pl_estimate = pi / (2.0 * E0);

  // decay trace in the well
  {
    const auto ev = model.open_evolution(model.a2() + 0.5, in.trace_horizon);
    std::vector<double> ts;
    for (double t = 0.0; t <= in.trace_horizon + 1e-12; t += in.trace_dt)
      ts.push_back(t);
    TraceSeries w1;
    w1.observable = "w1";
    w1.times = ts;
    w1.values = WellIntegrator(*ev, model.a1()).trace(ts, model.threads());
    const auto lt = lifetime(w1);
    rep.t_l = lt.t_l;
    rep.t_l_method = lt.method;
    rep.t_l_slope = lt.t_l_slope;
    rep.A_fit = rep.t_l / lifetime_estimate(model.U0(), E0, d, 1.0);

    // plateau onset from the flux at a2 over a short window
    const double plateau_horizon = std::min(8.0, in.trace_horizon);
    const auto edge = detector_trace(*ev, model.a2(), 0.0, plateau_horizon,
                                     0.002, model.threads());
    if (const auto pl = plateau_onset(edge.current, E0))
      rep.t_pl = *pl;
  }

  if (in.with_detector) {
    const double X = in.detector_X;
    const double X_far = X + in.detector_dx;
    const auto ev = model.open_evolution(X_far + 1.0, in.detector_horizon);
    const auto near_traces = detector_trace(*ev, X, 0.0, in.detector_horizon,
                                            in.detector_dt, model.threads());
    const auto pk_coarse = first_peak(near_traces.current);
    // refined scan around the peak pins t_X to the reported precision
    const double lo = std::max(0.0, pk_coarse.t - 2.0);
    const double hi = std::min(in.detector_horizon, pk_coarse.t + 2.0);
    const auto near_fine =
        detector_trace(*ev, X, lo, hi, 0.005, model.threads());
    const auto far_fine =
        detector_trace(*ev, X_far, lo + in.detector_dx / k0,
                       hi + in.detector_dx / k0, 0.005, model.threads());

    const auto pk = first_peak(near_fine.current);
    rep.detector_X = X;
    rep.t_X = pk.t;
    rep.detector_peak = pk.value;

    const auto &ground = model.psi0().bound_origin();
    if (ground) {
      const auto exit = effective_exit_energy(*ground, model.U0(), model.a2());
      rep.E_tilde_0 = exit.E_tilde_0;
      rep.v_tilde_p = exit.v_tilde_p;
      rep.t_tun1 =
          tunneling_time_extrapolated(rep.t_X, X, model.a2(), exit.v_tilde_p);
    }
    const auto pv =
        tunneling_time_peak(near_fine.current, X, far_fine.current, X_far,
                            model.a2());
    rep.v_X = pv.v_X;
    rep.t_tun2 = pv.t_tun2;
  }
  return rep;
}

} // namespace td

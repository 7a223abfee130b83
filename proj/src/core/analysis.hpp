#pragma once
#include <optional>
#include <string>

#include "observables.hpp"

namespace td {

// Every timescale the simulator extracts, with extraction metadata.
struct TimescaleReport {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  double t_l = unset;          // lifetime (primary extraction)
  std::string t_l_method;      // "first_crossing" | "slope_fit"
  double t_l_slope = unset;    // secondary estimate
  double t_pl = unset;         // plateau onset of J(a2, t)
  double t_pl_estimate = unset; // pi / (2 E0)
  double t_bl = unset;         // d / kappa
  double T_k0 = unset;         // 2 / k0
  double A_fit = unset;        // t_l / (T_k0 exp(2 kappa d))
  double detector_X = unset;
  double t_X = unset;
  double detector_peak = unset;
  double v_X = unset;
  double v_tilde_p = unset;
  double E_tilde_0 = unset;
  double t_tun1 = unset;
  double t_tun2 = unset;
};

struct LifetimeResult {
  double t_l = 0.0;         // reported value (first crossing when it exists)
  std::string method;       // "first_crossing"
  double t_l_slope = 0.0;   // least-squares slope of ln g on [t_l/2, 2 t_l]
};

// Lifetime from a w1(t) trace: first crossing of w1/w1(0) below 1/e with
// linear interpolation; the slope of ln g over [t_l/2, 2 t_l] is reported
// alongside (more robust for oscillatory decays). Throws
// InsufficientHorizon when the trace never reaches 1/e.
LifetimeResult lifetime(const TraceSeries &w1_trace);

// A T_{k0} exp(2 kappa d) with T_{k0} = 2/k0, kappa = sqrt(2 (U0 - E0)).
double lifetime_estimate(double U0, double E0, double d, double A);

// Buttiker-Landauer traversal time d / kappa.
double bl_time(double U0, double E0, double d);

// Plateau detector tuning (module constants, pinned by tests): the flux has
// stabilized once every sample in a window of three estimated plateau times
// stays within 25% of the window median, and the median carries at least 2%
// of the trace maximum (rules out the decayed tail of transparent barriers).
struct PlateauParams {
  double band = 0.25;
  double window_factor = 3.0; // window = factor * pi / (2 E0)
  double min_median_rel = 0.02;
};

// Earliest stabilization time of J(a2, t); nullopt when no plateau forms
// (transparent barriers).
std::optional<double> plateau_onset(const TraceSeries &flux_at_a2, double E0,
                                    const PlateauParams &params = {});

// rho and J at a remote detector, uniformly sampled.
EdgeTraces detector_trace(const Wavefunction &wf, double X, double t_lo,
                          double t_hi, double dt, int threads);

struct PeakInfo {
  double t = 0.0;
  double value = 0.0;
};

// First local maximum reaching 90% of the global maximum, refined by
// quadratic interpolation. Throws TruncatedTrace when the maximum sits on
// either end of the trace, InvalidMeasurement on a flat trace.
PeakInfo first_peak(const TraceSeries &trace);

struct ExitEnergy {
  double E_tilde_0 = 0.0;
  double v_tilde_p = 0.0;
};

// Etilde_0 = E0 - U0 * (bound-state mass beyond a2); the sudden opening
// leaves the escaping packet slightly slower than sqrt(2 E0).
ExitEnergy effective_exit_energy(const BoundState &phi0, double U0, double a2);

// t_tun1 = t_X - (X - a2) / v_tilde_p.
double tunneling_time_extrapolated(double t_X, double X, double a2,
                                   double v_tilde_p);

struct PeakVelocityResult {
  double v_X = 0.0;
  double t_tun2 = 0.0;
  double t_near = 0.0;
  double t_far = 0.0;
};

// Peak velocity from two nearby detectors and the corresponding
// extrapolated time t_tun2 = t_X - (X - a2) / v_X. Throws
// InvalidMeasurement when the far peak does not trail the near one.
PeakVelocityResult tunneling_time_peak(const TraceSeries &flux_near, double X,
                                       const TraceSeries &flux_far,
                                       double X_far, double a2);

// Gaussian stationary-phase estimate of |Psi(x, t)|^2 from the outgoing
// branch of the spectral integral: |G(K)|^2 / |theta''(K) - t| at the
// stationary wavenumber K solving theta'(K) + x - K t = 0. nullopt when no
// stationary point lies inside the grid support.
std::optional<double> stationary_phase_density(const SpectralEvolution &ev,
                                               double x, double t);

} // namespace td

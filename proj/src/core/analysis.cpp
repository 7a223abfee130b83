#include "analysis.hpp"

#include <algorithm>
#include <cmath>

namespace td {

LifetimeResult lifetime(const TraceSeries &w1_trace) {
  const auto &ts = w1_trace.times;
  const auto &w = w1_trace.values;
  if (ts.size() < 4)
    throw invalid_parameter("lifetime needs a populated w1 trace");
  const double w0 = w.front();
  if (!(w0 > 0.0))
    throw invalid_parameter("w1(0) must be positive");
  const double target = w0 * std::exp(-1.0);

  LifetimeResult out;
  bool crossed = false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] < target) {
      const double f = (w[i - 1] - target) / (w[i - 1] - w[i]);
      out.t_l = ts[i - 1] + f * (ts[i] - ts[i - 1]);
      out.method = "first_crossing";
      crossed = true;
      break;
    }
  }
  if (!crossed)
    throw Error(ErrorCode::InsufficientHorizon,
                "w1/w1(0) never decays to 1/e inside the trace");

  // least-squares slope of ln g on [t_l/2, 2 t_l]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < 0.5 * out.t_l || ts[i] > 2.0 * out.t_l || w[i] <= 0.0)
      continue;
    const double y = std::log(w[i] / w0);
    sx += ts[i];
    sy += y;
    sxx += ts[i] * ts[i];
    sxy += ts[i] * y;
    ++n;
  }
  if (n >= 2) {
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    out.t_l_slope = slope < 0.0 ? -1.0 / slope : 0.0;
  }
  return out;
}

double lifetime_estimate(double U0, double E0, double d, double A) {
  if (!(U0 > E0))
    throw invalid_parameter("lifetime estimate needs E0 < U0");
  const double k0 = std::sqrt(2.0 * E0);
  const double kappa = std::sqrt(2.0 * (U0 - E0));
  return A * (2.0 / k0) * std::exp(2.0 * kappa * d);
}

double bl_time(double U0, double E0, double d) {
  if (!(U0 > E0))
    throw invalid_parameter("Buttiker-Landauer time needs E0 < U0");
  return d / std::sqrt(2.0 * (U0 - E0));
}

std::optional<double> plateau_onset(const TraceSeries &flux_at_a2, double E0,
                                    const PlateauParams &params) {
  const auto &ts = flux_at_a2.times;
  const auto &j = flux_at_a2.values;
  if (ts.size() < 8)
    throw invalid_parameter("plateau detector needs a populated trace");
  const double window = params.window_factor * pi / (2.0 * E0);
  const double j_max =
      *std::max_element(j.begin(), j.end(),
                        [](double a, double b) { return std::abs(a) < std::abs(b); });

  std::vector<double> buf;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t_end = ts[i] + window;
    if (t_end > ts.back())
      break;
    buf.clear();
    for (std::size_t m = i; m < ts.size() && ts[m] <= t_end; ++m)
      buf.push_back(j[m]);
    if (buf.size() < 4)
      continue;
    std::vector<double> sorted = buf;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double med = sorted[sorted.size() / 2];
    if (!(std::abs(med) >= params.min_median_rel * std::abs(j_max)))
      continue;
    bool inside = true;
    for (const double v : buf) {
      if (std::abs(v - med) > params.band * std::abs(med)) {
        inside = false;
        break;
      }
    }
    if (inside)
      return ts[i];
  }
  return std::nullopt;
}

EdgeTraces detector_trace(const Wavefunction &wf, double X, double t_lo,
                          double t_hi, double dt, int threads) {
  if (!(t_hi > t_lo) || !(dt > 0.0))
    throw invalid_parameter("detector trace needs t_hi > t_lo and dt > 0");
  std::vector<double> ts;
  for (double t = t_lo; t <= t_hi + 1e-12; t += dt)
    ts.push_back(t);
  return probe_traces(wf, X, ts, threads);
}

PeakInfo first_peak(const TraceSeries &trace) {
  const auto &ts = trace.times;
  const auto &v = trace.values;
  if (ts.size() < 3)
    throw invalid_parameter("first_peak needs at least three samples");
  const std::size_t i_max = static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
  if (i_max == 0 || i_max + 1 == v.size())
    throw Error(ErrorCode::TruncatedTrace,
                "global maximum sits on the trace boundary; extend the "
                "time window");
  const double global_max = v[i_max];
  if (!(global_max > 0.0))
    throw Error(ErrorCode::InvalidMeasurement, "trace has no positive peak");

  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] >= v[i - 1] && v[i] >= v[i + 1] && v[i] >= 0.9 * global_max) {
      const double off = quadratic_peak_offset(v[i - 1], v[i], v[i + 1]);
      PeakInfo pk;
      pk.t = ts[i] + off * (ts[i] - ts[i - 1]);
      // quadratic model value at the refined abscissa
      pk.value = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * off;
      return pk;
    }
  }
  throw Error(ErrorCode::InvalidMeasurement,
              "no interior local maximum reaches 90% of the global maximum");
}

ExitEnergy effective_exit_energy(const BoundState &phi0, double U0,
                                 double a2) {
  if (!(a2 > phi0.a1))
    throw invalid_parameter("a2 must lie beyond the well edge");
  ExitEnergy out;
  out.E_tilde_0 = phi0.energy - U0 * phi0.tail_mass(a2);
  out.v_tilde_p = std::sqrt(2.0 * out.E_tilde_0);
  return out;
}

double tunneling_time_extrapolated(double t_X, double X, double a2,
                                   double v_tilde_p) {
  if (!(X > a2) || !(v_tilde_p > 0.0))
    throw invalid_parameter("extrapolation needs X > a2 and v > 0");
  return t_X - (X - a2) / v_tilde_p;
}

PeakVelocityResult tunneling_time_peak(const TraceSeries &flux_near, double X,
                                       const TraceSeries &flux_far,
                                       double X_far, double a2) {
  if (!(X_far > X))
    throw invalid_parameter("the far detector must lie beyond the near one");
  PeakVelocityResult out;
  out.t_near = first_peak(flux_near).t;
  out.t_far = first_peak(flux_far).t;
  if (out.t_far <= out.t_near)
    throw Error(ErrorCode::InvalidMeasurement,
                "flux peak order inverted between the two detectors");
  out.v_X = (X_far - X) / (out.t_far - out.t_near);
  out.t_tun2 = out.t_near - (X - a2) / out.v_X;
  return out;
}

std::optional<double> stationary_phase_density(const SpectralEvolution &ev,
                                               double x, double t) {
  if (!(t > 0.0))
    throw invalid_parameter("stationary phase needs t > 0");
  const auto &dec = ev.decomposition();
  const double k_lo = std::max(ev.grid().k_min(), 5e-4);
  const double k_hi = ev.grid().k_max();

  // unwrapped tail phase of the basis state and its derivatives
  const auto theta = [&](double k) {
    return continuum_state(dec.pot, k).tail_phase;
  };
  const double dk = 1e-4;
  const auto unwrap = [](double base, double v) {
    return v - 2.0 * pi * std::round((v - base) / (2.0 * pi));
  };
  const auto dtheta = [&](double k) {
    const double t0 = theta(k);
    const double tp = unwrap(t0, theta(k + dk));
    const double tm = unwrap(t0, theta(k - dk));
    return (tp - tm) / (2.0 * dk);
  };
  const auto d2theta = [&](double k) {
    const double t0 = theta(k);
    const double tp = unwrap(t0, theta(k + dk));
    const double tm = unwrap(t0, theta(k - dk));
    return (tp - 2.0 * t0 + tm) / (dk * dk);
  };
  // stationary point of theta(k) + k x - k^2 t / 2
  const auto f = [&](double k) { return dtheta(k) + x - k * t; };

  double lo = k_lo + 2.0 * dk;
  double hi = k_hi - 2.0 * dk;
  // keep clear of the barrier-top branch point where theta' is singular
  const double k_thr = std::sqrt(2.0 * dec.pot.barrier_top());
  double f_lo = f(lo);
  if (f_lo < 0.0)
    return std::nullopt; // x/t below the support of the expansion
  double k_root = -1.0;
  const int n_scan = 400;
  double prev_k = lo, prev_f = f_lo;
  for (int i = 1; i <= n_scan; ++i) {
    const double k =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_scan);
    if (std::abs(k - k_thr) < 0.02)
      continue;
    const double fk = f(k);
    if (prev_f > 0.0 && fk <= 0.0) {
      // bisect then Newton-polish
      double a = prev_k, b = k;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        (f(m) > 0.0 ? a : b) = m;
      }
      k_root = 0.5 * (a + b);
      break;
    }
    prev_k = k;
    prev_f = fk;
  }
  if (k_root < 0.0)
    return std::nullopt;

  const double curvature = d2theta(k_root) - t;
  if (curvature == 0.0)
    return std::nullopt;
  const double g = std::abs(dec.coeff(k_root));
  return g * g / std::abs(curvature);
}

} // namespace td

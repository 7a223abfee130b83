#include "observables.hpp"

#include <cmath>

#include "threading.hpp"

namespace td {

double density(const WaveSample &ws) { return std::norm(ws.psi); }

double flux(const WaveSample &ws) {
  return std::imag(std::conj(ws.psi) * ws.dpsi_dx);
}

double local_velocity(const WaveSample &ws) {
  const double rho = density(ws);
  if (rho <= velocity_density_floor)
    return std::numeric_limits<double>::quiet_NaN();
  return flux(ws) / rho;
}

EdgeTraces probe_traces(const Wavefunction &wf, double x,
                        std::span<const double> ts, int threads) {
  std::vector<WaveSample> smp(ts.size());
  const double xs[1] = {x};
  wf.sample_matrix(std::span<const double>{xs, 1}, ts, smp, threads);
  EdgeTraces out;
  out.rho.observable = "rho";
  out.current.observable = "J";
  out.rho.probe_x = out.current.probe_x = x;
  out.rho.times.assign(ts.begin(), ts.end());
  out.current.times.assign(ts.begin(), ts.end());
  out.rho.values.resize(ts.size());
  out.current.values.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out.rho.values[i] = density(smp[i]);
    out.current.values[i] = flux(smp[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

WellIntegrator::WellIntegrator(const Wavefunction &wf, double a1)
    : wf_(wf), a1_(a1) {
  // |Psi|^2 oscillates at most at twice the fastest wavenumber; keep the
  // per-panel phase under ~8 rad for Gauss-Legendre 16
  const double freq = 2.0 * wf.max_wavenumber();
  const std::size_t panels =
      std::max<std::size_t>(4, static_cast<std::size_t>(
                                   std::ceil(freq * a1 / 8.0)));
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a1 * static_cast<double>(p) / panels;
    const double hi = a1 * static_cast<double>(p + 1) / panels;
    const double c = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int i = 0; i < 16; ++i) {
      x_.push_back(c + half * GaussLegendre16::nodes[i]);
      w_.push_back(half * GaussLegendre16::weights[i]);
    }
  }
}

double WellIntegrator::operator()(double t, int threads) const {
  std::vector<WaveSample> smp(x_.size());
  const double ts[1] = {t};
  wf_.sample_matrix(x_, std::span<const double>{ts, 1}, smp, threads);
  std::vector<double> terms(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i)
    terms[i] = w_[i] * density(smp[i]);
  return pairwise_sum(terms);
}

std::vector<double> WellIntegrator::trace(std::span<const double> ts,
                                          int threads) const {
  std::vector<WaveSample> smp(x_.size() * ts.size());
  wf_.sample_matrix(x_, ts, smp, threads);
  std::vector<double> out(ts.size());
  std::vector<double> terms(x_.size());
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    for (std::size_t xi = 0; xi < x_.size(); ++xi)
      terms[xi] = w_[xi] * density(smp[xi * ts.size() + ti]);
    out[ti] = pairwise_sum(terms);
  }
  return out;
}

double well_probability(const Wavefunction &wf, double a1, double t,
                        int threads) {
  return WellIntegrator(wf, a1)(t, threads);
}

// ---------------------------------------------------------------------------

namespace {

// uniform end-corrected quadrature of |Psi|^2 over [lo, hi]
double density_box_integral(const Wavefunction &wf, double lo, double hi,
                            double t, int threads) {
  const double freq = 2.0 * wf.max_wavenumber();
  const double ppw = 14.0;
  const std::size_t n = std::max<std::size_t>(
      32, static_cast<std::size_t>(std::ceil((hi - lo) * freq * ppw /
                                             (2.0 * pi))));
  const double h = (hi - lo) / static_cast<double>(n);
  std::vector<complex> psi(n + 1);
  wf.sample_uniform(lo, h, n + 1, t, psi, threads);
  auto w = EndCorrectedUniform::weights(n + 1);
  std::vector<double> terms(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    terms[i] = h * w[i] * std::norm(psi[i]);
  return pairwise_sum(terms);
}

} // namespace

OutsideProbability outside_probability(const SpectralEvolution &ev, double a2,
                                       double E0, double t, int threads) {
  OutsideProbability out;
  out.x_box = std::max(4.0 * std::sqrt(2.0 * E0) * t, 200.0);
  // components faster than ~0.9 X/t have had time to leave the box
  out.tail_bound = t > 0.0 ? ev.mass_above(0.9 * out.x_box / t) : 0.0;
  if (out.tail_bound > 1e-4)
    throw accuracy_failure(
        "outside-probability tail bound " + std::to_string(out.tail_bound) +
        " exceeds 1e-4; enlarge the box");
  out.value = density_box_integral(ev, a2, out.x_box, t, threads);
  return out;
}

NormCheck total_norm(const SpectralEvolution &ev, double E0, double t,
                     int threads) {
  NormCheck out;
  out.x_box = std::max(4.0 * std::sqrt(2.0 * E0) * t, 200.0);
  out.tail_estimate = t > 0.0 ? ev.mass_above(0.9 * out.x_box / t) : 0.0;
  out.box_integral = density_box_integral(ev, 0.0, out.x_box, t, threads);
  return out;
}

double continuity_residual(const Wavefunction &wf, double x, double t,
                           double h_x, double h_t) {
  const auto residual = [&](double hx, double ht) {
    const double rho_p = density(wf.sample(x, t + ht));
    const double rho_m = density(wf.sample(x, t - ht));
    const double j_p = flux(wf.sample(x + hx, t));
    const double j_m = flux(wf.sample(x - hx, t));
    return (rho_p - rho_m) / (2.0 * ht) + (j_p - j_m) / (2.0 * hx);
  };
  const double r1 = residual(h_x, h_t);
  const double r2 = residual(0.5 * h_x, 0.5 * h_t);
  return std::abs((4.0 * r2 - r1) / 3.0);
}

} // namespace td

#include <doctest.h>

#include "core/analysis.hpp"
#include "core/pipeline.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace td;

TEST_CASE("lifetime of a pure exponential is exact") {
  TraceSeries w1;
  w1.observable = "w1";
  const double tau = 7.3;
  for (double t = 0.0; t <= 40.0; t += 0.01) {
    w1.times.push_back(t);
    w1.values.push_back(0.83 * std::exp(-t / tau));
  }
  const auto lt = lifetime(w1);
  CHECK(lt.t_l == doctest::Approx(tau).epsilon(1e-5));
  CHECK(lt.method == "first_crossing");
  CHECK(lt.t_l_slope == doctest::Approx(tau).epsilon(1e-6));
}

TEST_CASE("lifetime requires the trace to reach 1/e") {
  TraceSeries w1;
  for (double t = 0.0; t <= 2.0; t += 0.1) {
    w1.times.push_back(t);
    w1.values.push_back(std::exp(-t / 50.0));
  }
  CHECK_THROWS_AS((void)lifetime(w1), Error);
}

TEST_CASE("semiclassical estimate and its limits") {
  // flagship numbers: T_k0 e^{2 kappa d} with A = 1
  const double E0 = 3.52;
  const double est = lifetime_estimate(16.0, E0, 0.4, 1.0);
  const double k0 = std::sqrt(2.0 * E0);
  const double kappa = std::sqrt(2.0 * (16.0 - E0));
  CHECK(est == doctest::Approx((2.0 / k0) * std::exp(2.0 * kappa * 0.4))
                   .epsilon(1e-12));
  CHECK(est == doctest::Approx(41.2).epsilon(0.01));

  // transparent limit d -> 0 leaves the bounce period
  CHECK(lifetime_estimate(16.0, E0, 0.0, 1.0) ==
        doctest::Approx(2.0 / k0).epsilon(1e-12));

  CHECK_THROWS_AS((void)lifetime_estimate(16.0, 17.0, 0.4, 1.0), Error);
}

TEST_CASE("traversal time d / kappa") {
  CHECK(bl_time(16.0, 3.52, 0.4) == doctest::Approx(0.0801).epsilon(2e-3));
  CHECK(bl_time(16.0, 3.52, 0.0) == 0.0);
  CHECK_THROWS_AS((void)bl_time(3.0, 3.5, 0.4), Error);

  // at fixed kappa d the traversal time scales like 1 / kappa^2
  const double kd = 2.0;
  for (const double U0 : {10.0, 16.0, 24.0}) {
    const auto bound = solve_bound_states(make_step_well(U0, 1.0));
    const double kappa = std::sqrt(2.0 * (U0 - bound[0].energy));
    const double t_bl = bl_time(U0, bound[0].energy, kd / kappa);
    CHECK(t_bl == doctest::Approx(kd / (kappa * kappa)).epsilon(1e-12));
  }
}

TEST_CASE("first peak detection with quadratic refinement") {
  TraceSeries tr;
  tr.observable = "J";
  for (double t = 0.0; t <= 20.0; t += 0.05) {
    tr.times.push_back(t);
    tr.values.push_back(std::exp(-0.5 * (t - 7.0) * (t - 7.0)));
  }
  const auto pk = first_peak(tr);
  CHECK(pk.t == doctest::Approx(7.0).epsilon(0.05 / 7.0));
  CHECK(pk.value == doctest::Approx(1.0).epsilon(1e-3));

  // monotone trace puts the maximum on the boundary
  TraceSeries mono;
  for (double t = 0.0; t <= 5.0; t += 0.1) {
    mono.times.push_back(t);
    mono.values.push_back(t);
  }
  CHECK_THROWS_AS((void)first_peak(mono), Error);
}

TEST_CASE("peak velocity from two detectors: rigid pulse is exact") {
  // a pulse translating rigidly at speed v: the intercept reproduces the
  // launch time exactly
  const double v = 2.4, t_launch = 3.0, a2 = 1.4;
  const double X = 60.0, X_far = 62.0;
  const auto make = [&](double pos) {
    TraceSeries tr;
    for (double t = 0.0; t <= 60.0; t += 0.02) {
      tr.times.push_back(t);
      const double arg = t - t_launch - (pos - a2) / v;
      tr.values.push_back(std::exp(-0.25 * arg * arg));
    }
    return tr;
  };
  const auto pv = tunneling_time_peak(make(X), X, make(X_far), X_far, a2);
  CHECK(pv.v_X == doctest::Approx(v).epsilon(1e-3));
  CHECK(pv.t_tun2 == doctest::Approx(t_launch).epsilon(1e-3));

  // inverted peak order must be flagged
  CHECK_THROWS_AS(
      (void)tunneling_time_peak(make(X_far), X, make(X), X_far, a2), Error);
}

TEST_CASE("extrapolated tunneling time identities") {
  CHECK(tunneling_time_extrapolated(50.3, 120.0, 1.4, 2.6517) ==
        doctest::Approx(50.3 - 118.6 / 2.6517).epsilon(1e-12));
  // a peak exactly at the ballistic arrival time extrapolates to zero
  const double v = 1.7;
  CHECK(tunneling_time_extrapolated((120.0 - 1.4) / v, 120.0, 1.4, v) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("effective exit energy from the bound tail") {
  const auto well = make_step_well(16.0, 1.0);
  const auto bound = solve_bound_states(well);
  const auto exit = effective_exit_energy(bound[0], 16.0, 1.4);

  // closed form against the quadrature oracle
  const auto &phi0 = bound[0];
  const double tail = oracle::integrate(
      [&](double x) { return phi0.value(x) * phi0.value(x); }, 1.4, 20.0);
  CHECK(exit.E_tilde_0 ==
        doctest::Approx(phi0.energy - 16.0 * tail).epsilon(1e-9));
  CHECK(exit.E_tilde_0 < phi0.energy);
  CHECK(exit.E_tilde_0 > 3.0);
  CHECK(exit.v_tilde_p == doctest::Approx(std::sqrt(2.0 * exit.E_tilde_0))
                              .epsilon(1e-14));

  // a distant edge recovers the full energy
  const auto far = effective_exit_energy(bound[0], 16.0, 30.0);
  CHECK(far.E_tilde_0 == doctest::Approx(phi0.energy).epsilon(1e-12));
}

TEST_CASE("plateau detector on synthetic traces") {
  const double E0 = 3.52;
  // flux that rises and settles onto a slowly decaying plateau
  TraceSeries tr;
  for (double t = 0.0; t <= 6.0; t += 0.002) {
    tr.times.push_back(t);
    const double rise = 1.0 - std::exp(-t / 0.2);
    tr.values.push_back(0.05 * rise * std::exp(-t / 17.5));
  }
  const auto pl = plateau_onset(tr, E0);
  REQUIRE(pl.has_value());
  CHECK(*pl < 2.0);

  // a single transient pulse never stabilizes
  TraceSeries pulse;
  for (double t = 0.0; t <= 6.0; t += 0.002) {
    pulse.times.push_back(t);
    pulse.values.push_back(std::exp(-8.0 * (t - 0.4) * (t - 0.4)));
  }
  CHECK(!plateau_onset(pulse, E0).has_value());
}

TEST_CASE("stationary phase on a smooth synthetic spectrum") {
  // transparent barrier (smooth theta) with a handcrafted Gaussian G: the
  // saddle estimate must approach the exact quadrature at long times
  const auto barrier = make_barrier(16.0, 1.0, 1.05);
  const auto well = make_step_well(16.0, 1.0);
  const auto psi0 = InitialState::make(InitialStateKind::BoundGround, well);
  GridConfig cfg;
  auto dec = std::make_shared<SpectralDecomposition>(
      project_open(psi0, barrier, cfg));
  const double kc = 2.5, sigma = 0.7;
  dec->coeff = [kc, sigma](double k) -> complex {
    const double u = (k - kc) / sigma;
    return std::exp(-0.5 * u * u);
  };
  for (std::size_t i = 0; i < dec->grid.size(); ++i)
    dec->values[i] = dec->coeff(dec->grid.nodes()[i]);
  dec->survey.resonances.clear(); // the synthetic spectrum is smooth
  dec->survey.k_cut = 8.0;        // the Gaussian has support well below 8

  const double x = 100.0, t = 40.0; // x/t sits at the spectral center
  const auto ev = SpectralEvolution::open(dec, x + 1.0, t, cfg,
                                          std::nullopt, 4);
  const auto sp = stationary_phase_density(ev, x, t);
  REQUIRE(sp.has_value());
  const double exact = density(ev.sample(x, t));
  CHECK(*sp == doctest::Approx(exact).epsilon(0.05));

  // relative error shrinks as t grows at fixed x/t
  double prev_err = 1e9;
  for (const double tt : {20.0, 40.0, 80.0}) {
    const double xx = 2.5 * tt;
    const auto evt = SpectralEvolution::open(dec, xx + 1.0, tt, cfg,
                                             std::nullopt, 4);
    const auto est = stationary_phase_density(evt, xx, tt);
    REQUIRE(est.has_value());
    const double err =
        std::abs(*est - density(evt.sample(xx, tt))) / density(evt.sample(xx, tt));
    CHECK(err < prev_err);
    prev_err = err;
  }

  // far outside the support there is no stationary point
  CHECK(!stationary_phase_density(ev, 100.0, 2.0).has_value());
}

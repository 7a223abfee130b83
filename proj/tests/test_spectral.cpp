#include <doctest.h>

#include "core/spectral.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace td;

namespace {
const auto WELL16 = make_step_well(16.0, 1.0);
const auto BARRIER16 = make_barrier(16.0, 1.0, 1.4);
} // namespace

TEST_CASE("initial states are unit normalized and vanish at the wall") {
  for (const auto kind : {InitialStateKind::BoundGround,
                          InitialStateKind::InfiniteWell,
                          InitialStateKind::BoundExcited}) {
    const auto psi0 = InitialState::make(kind, WELL16);
    CHECK(overlap(psi0.psi(), psi0.psi()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi0(0.0) == 0.0);
  }
  const auto box = InitialState::make(InitialStateKind::InfiniteWell, WELL16);
  CHECK(box.energy() == doctest::Approx(0.5 * pi * pi).epsilon(1e-14));
  CHECK(box(1.5) == 0.0); // zero outside the box
}

TEST_CASE("bound-state overlaps: normalization and orthogonality") {
  const auto states = solve_bound_states(WELL16);
  CHECK(overlap(states[0].psi, states[0].psi) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(overlap(states[0].psi, states[1].psi)) < 1e-10);
}

TEST_CASE("analytic overlaps match adaptive quadrature on random pairs") {
  // random states from both bases, both regimes, against a Simpson oracle
  oracle::Rng rng;
  const auto psi_g = InitialState::make(InitialStateKind::BoundGround, WELL16);
  const auto psi_b = InitialState::make(InitialStateKind::InfiniteWell, WELL16);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    double k = rng.uniform(0.15, 10.0);
    if (std::abs(k - std::sqrt(32.0)) < 1e-3)
      k += 0.01;
    const auto st = continuum_state(BARRIER16, k);
    const bool use_ground = trial % 2 == 0;
    const auto &psi0 = use_ground ? psi_g : psi_b;
    const double got = overlap_with_initial(psi0, st);
    const auto f = [&](double x) { return psi0(x) * st.value(x); };
    // the integrand decays like the initial state: the box state ends at 1,
    // the bound state at exp(-kappa x)
    const double reach = use_ground ? 10.0 : 1.0;
    const double expected = oracle::integrate_piecewise(
        f, 0.0, reach, {1.0, 1.4}, 1e-13);
    CHECK(got == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    ++checked;
  }
  CHECK(checked == 100);

  // generic path (piecewise engine) agrees with the fast path
  for (int trial = 0; trial < 10; ++trial) {
    const double k = rng.uniform(0.3, 7.0);
    const auto st = continuum_state(BARRIER16, k);
    CHECK(overlap_with_initial(psi_g, st) ==
          doctest::Approx(overlap(psi_g.psi(), st.to_piecewise()))
              .epsilon(1e-12));
  }
}

TEST_CASE("opening amplitude: resonance structure and completeness") {
  GridConfig cfg;
  const auto psi0 = InitialState::make(InitialStateKind::BoundGround, WELL16);
  const auto dec = project_open(psi0, BARRIER16, cfg);

  // single dominant peak near k0 = sqrt(2 E0) ~ 2.65
  CHECK(dec.survey.peak_k == doctest::Approx(2.65).epsilon(0.02));
  REQUIRE(!dec.survey.resonances.empty());
  CHECK(dec.survey.resonances.front().center ==
        doctest::Approx(2.65).epsilon(0.02));

  // Parseval: the initial state is fully contained in the barrier basis
  CHECK(dec.completeness_defect() < 1e-3);

  // every sampled amplitude is real by construction
  for (const auto &v : dec.values)
    CHECK(v.imag() == 0.0);
}

TEST_CASE("box initial state produces two resonant contributions") {
  GridConfig cfg;
  const auto barrier = make_barrier(16.0, 1.0, 1.42);
  const auto psi0 = InitialState::make(InitialStateKind::InfiniteWell, WELL16);
  const auto dec = project_open(psi0, barrier, cfg);
  CHECK(dec.survey.resonances.size() >= 2);
  CHECK(dec.survey.k_cut == doctest::Approx(40.0)); // pinned default
  CHECK(dec.completeness_defect() < 1e-3);
}

TEST_CASE("completeness holds across barrier heights") {
  GridConfig cfg;
  for (const double U0 : {10.0, 16.0, 24.0}) {
    const auto well = make_step_well(U0, 1.0);
    const auto bound = solve_bound_states(well);
    const double kappa = std::sqrt(2.0 * (U0 - bound[0].energy));
    const auto barrier = make_barrier(U0, 1.0, 1.0 + 2.0 / kappa);
    const auto psi0 = InitialState::make(InitialStateKind::BoundGround, well);
    const auto dec = project_open(psi0, barrier, cfg);
    CHECK(dec.completeness_defect() < 1e-3);
  }
}

TEST_CASE("smeared overlap check of the delta normalization") {
  // Truncated overlaps of two barrier-basis states behave like a nascent
  // delta: integrating against a Gaussian window wider than 2 pi / L must
  // return the window height at the diagonal within 1%.
  const double L = 200.0;
  const double k_ref = 3.1;
  const auto st_ref = continuum_state(BARRIER16, k_ref);
  const double sigma = 3.0 * 2.0 * pi / L;

  // quadrature over k' of w(k') <phi_k | phi_k'>_L
  const double span = 8.0 * sigma;
  const std::size_t n = 2400;
  const double h = 2.0 * span / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double kp = k_ref - span + h * static_cast<double>(i);
    const auto st = continuum_state(BARRIER16, kp);
    const double w = std::exp(-0.5 * (kp - k_ref) * (kp - k_ref) /
                              (sigma * sigma));
    const double ov = overlap_on(st_ref.to_piecewise(), st.to_piecewise(),
                                 0.0, L);
    const double trap = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += trap * w * ov * h;
  }
  CHECK(acc == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("immediate reclosure reproduces the initial state") {
  GridConfig cfg;
  const auto psi0 = InitialState::make(InitialStateKind::BoundGround, WELL16);

  // frozen field at t0 -> 0+ is the initial state itself
  const FieldAccessor field = [&](std::span<const double> xs,
                                  std::span<complex> out) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = complex{psi0(xs[i]), 0.0};
  };
  SpectrumSurvey survey = survey_open_coefficient(psi0, BARRIER16, cfg);
  ClosedProjectionRequest req;
  req.t0 = 1e-9;
  req.x_max = 5.0;
  req.t_max = 1.0;
  req.barrier_a2 = 1.4;
  req.field_extent = 220.0;
  req.field_max_wavenumber = survey.k_effective(1e-4);
  req.threads = 4;
  const auto dec = project_closed(field, WELL16, survey, req, cfg);

  REQUIRE(dec.bound_coeffs.size() == 2);
  CHECK(std::abs(dec.bound_coeffs[0] - complex{1.0, 0.0}) < 1e-3);
  CHECK(std::abs(dec.bound_coeffs[1]) < 1e-3);
  CHECK(dec.continuum_norm() < 1e-3);
  CHECK(dec.completeness_defect() < 2e-3);
}

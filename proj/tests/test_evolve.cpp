#include <doctest.h>

#include "core/evolve.hpp"
#include "core/pipeline.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace td;

namespace {

ModelSetup flagship() {
  static const ModelSetup model = ModelSetup::create(
      16.0, 1.0, 1.4, InitialStateKind::BoundGround, GridConfig{}, 4);
  return model;
}

} // namespace

TEST_CASE("grid builder honors the phase and resonance contracts") {
  const auto model = flagship();
  const auto dec = model.open_decomposition();
  const double x_max = 30.0, t_max = 10.0;
  const auto grid = build_k_grid(*dec, x_max, t_max, GridConfig{}, 4);

  // self-check converged
  CHECK(grid.convergence_residual < 1e-6);

  // panel gaps: dk (x_max + k t_max) < pi/8, dk < width/20 inside cores
  const auto &res = dec->survey.resonances;
  for (const auto &p : grid.panels()) {
    const double gap = GaussLegendre16::max_node_gap * (p.hi - p.lo);
    CHECK(gap * (x_max + p.hi * t_max) < pi / 8.0 + 1e-12);
    for (const auto &r : res) {
      if (p.lo >= r.center - 5.0 * r.width && p.hi <= r.center + 5.0 * r.width)
        CHECK(gap < r.width / 20.0 + 1e-12);
    }
  }
  // panels tile (k_min, k_cut) without gaps or overlap, excluding the
  // barrier-top window
  for (std::size_t i = 0; i + 1 < grid.panels().size(); ++i) {
    const double hi = grid.panels()[i].hi;
    const double lo = grid.panels()[i + 1].lo;
    const bool contiguous = lo == hi;
    const bool skips_threshold =
        std::abs(hi - (std::sqrt(32.0) - 1e-8)) < 1e-12 &&
        std::abs(lo - (std::sqrt(32.0) + 1e-8)) < 1e-12;
    CHECK((contiguous || skips_threshold));
  }
}

TEST_CASE("t = 0 resynthesis reproduces the initial state") {
  const auto model = flagship();
  const auto ev = model.open_evolution(10.0, 1.0);
  const auto &psi0 = model.psi0();
  double worst = 0.0;
  for (double x = 0.05; x < 6.0; x += 0.23) {
    const auto ws = ev->sample(x, 0.0);
    worst = std::max(worst, std::abs(ws.psi - complex{psi0(x), 0.0}));
  }
  CHECK(worst < 1e-4);

  // L2 error of the resynthesis
  const auto f = [&](double x) {
    const auto ws = ev->sample(x, 0.0);
    return std::norm(ws.psi - complex{psi0(x), 0.0});
  };
  const double l2 = std::sqrt(oracle::integrate_piecewise(
      f, 1e-6, 12.0, {1.0, 1.4}, 1e-14));
  CHECK(l2 < 1e-3);
}

TEST_CASE("quasi-stationary decay of the density in the well") {
  const auto model = flagship();
  const auto ev = model.open_evolution(2.0, 20.0);
  const double rho0 = std::norm(ev->sample(0.5, 0.0).psi);
  const double rho = std::norm(ev->sample(0.5, 17.5).psi);
  // |psi|^2 ~ |phi0|^2 e^{-1} at one lifetime, within 10%
  CHECK(rho / rho0 == doctest::Approx(std::exp(-1.0)).epsilon(0.10));
}

TEST_CASE("evolution is linear in the decomposition") {
  // psi evolved from alpha G equals alpha times psi evolved from G
  const auto model = flagship();
  const auto dec = model.open_decomposition();
  const auto ev = model.open_evolution(5.0, 3.0);

  auto scaled = std::make_shared<SpectralDecomposition>(*dec);
  const double alpha = 0.37;
  scaled->coeff = [inner = dec->coeff, alpha](double k) {
    return alpha * inner(k);
  };
  for (auto &v : scaled->values)
    v *= alpha;
  const auto ev2 = SpectralEvolution::open(scaled, 5.0, 3.0, GridConfig{},
                                           std::nullopt, 4);
  for (const double x : {0.4, 1.2, 3.3}) {
    const auto a = ev->sample(x, 2.5);
    const auto b = ev2.sample(x, 2.5);
    CHECK(std::abs(b.psi - alpha * a.psi) < 1e-12);
    CHECK(std::abs(b.dpsi_dx - alpha * a.dpsi_dx) < 1e-12);
  }
}

TEST_CASE("real spectrum gives time-reversal symmetry") {
  // G real implies Psi(x, -t) = conj Psi(x, t); evaluate the quadrature sum
  // with both phase signs over the evolution's own nodes
  const auto model = flagship();
  const auto ev = model.open_evolution(5.0, 4.0);
  oracle::Rng rng;
  for (int trial = 0; trial < 10; ++trial) {
    const double x = rng.uniform(0.1, 4.5);
    const double t = rng.uniform(0.1, 4.0);
    const auto plus = ev->sample(x, t);

    const auto &grid = ev->grid();
    const auto dec = model.open_decomposition();
    complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double k = grid.nodes()[i];
      const auto st = continuum_state(model.barrier(), k);
      const double ph = st.energy * t; // reversed sign
      acc += grid.weights()[i] * dec->coeff(k).real() * st.value(x) *
             complex{std::cos(ph), std::sin(ph)};
    }
    CHECK(std::abs(acc - std::conj(plus.psi)) < 1e-9);
  }
}

TEST_CASE("deterministic results across thread counts") {
  const auto model = flagship();
  const auto ev = model.open_evolution(6.0, 5.0);
  std::vector<double> xs{0.3, 1.2, 2.0, 4.8};
  std::vector<double> ts;
  for (double t = 0.0; t <= 5.0; t += 0.25)
    ts.push_back(t);
  std::vector<WaveSample> one(xs.size() * ts.size());
  std::vector<WaveSample> eight(xs.size() * ts.size());
  ev->sample_matrix(xs, ts, one, 1);
  ev->sample_matrix(xs, ts, eight, 8);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].psi.real() == eight[i].psi.real());
    CHECK(one[i].psi.imag() == eight[i].psi.imag());
    CHECK(one[i].dpsi_dx.real() == eight[i].dpsi_dx.real());
    CHECK(one[i].dpsi_dx.imag() == eight[i].dpsi_dx.imag());
  }
}

TEST_CASE("uniform kernel agrees with the generic kernel") {
  const auto model = flagship();
  const auto ev = model.open_evolution(40.0, 6.0);
  const double h = 0.0173, x0 = 0.4;
  const std::size_t n = 2000;
  std::vector<complex> psi(n);
  ev->sample_uniform(x0, h, n, 5.0, psi, 4);
  for (const std::size_t i : {std::size_t{0}, std::size_t{33},
                              std::size_t{600}, std::size_t{1999}}) {
    const auto ws = ev->sample(x0 + h * static_cast<double>(i), 5.0);
    CHECK(std::abs(psi[i] - ws.psi) < 1e-11);
  }
}

TEST_CASE("phase windows are enforced") {
  const auto model = flagship();
  const auto ev = model.open_evolution(3.0, 5.0, 4.0); // closes at t0 = 4
  CHECK_NOTHROW((void)ev->sample(1.0, 4.0)); // t = t0 still open
  CHECK_THROWS_AS((void)ev->sample(1.0, 4.2), Error);
  CHECK_THROWS_AS((void)ev->sample(1.0, -0.1), Error);
}

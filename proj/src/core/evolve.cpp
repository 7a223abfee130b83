#include "evolve.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "threading.hpp"

namespace td {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
} // namespace

// state value and x-derivative at one point from cached coefficients
static inline void state_at(double x, double a1, double a2, double inner_k,
                            double tail_q, double c_inner, double v_a1,
                            double d_a1, double kappa_sq, double theta,
                            double &val, double &der) {
  if (x < a1) {
    val = c_inner * std::sin(inner_k * x);
    der = c_inner * inner_k * std::cos(inner_k * x);
    return;
  }
  if (x <= a2 && a2 > a1) {
    const double dx = x - a1;
    if (kappa_sq > 0.0) {
      const double kp = std::sqrt(kappa_sq);
      const double ch = std::cosh(kp * dx);
      const double sh = std::sinh(kp * dx);
      val = v_a1 * ch + d_a1 / kp * sh;
      der = v_a1 * kp * sh + d_a1 * ch;
    } else {
      const double q = std::sqrt(-kappa_sq);
      const double c = std::cos(q * dx);
      const double s = std::sin(q * dx);
      val = v_a1 * c + d_a1 / q * s;
      der = -v_a1 * q * s + d_a1 * c;
    }
    return;
  }
  val = delta_norm_amp * std::sin(tail_q * x + theta);
  der = delta_norm_amp * tail_q * std::cos(tail_q * x + theta);
}

void SpectralEvolution::cache_nodes(int threads) {
  const auto &nodes = grid_.nodes();
  const std::size_t n = nodes.size();
  inner_k_.resize(n);
  tail_q_.resize(n);
  energy_.resize(n);
  c_inner_.resize(n);
  v_a1_.resize(n);
  d_a1_.resize(n);
  kappa_sq_.resize(n);
  theta_.resize(n);
  coeff_.resize(n);

  const bool closed = dec_->basis == ContinuumState::Basis::StepWell;
  const double U0 = dec_->pot.barrier_top();

  parallel_for(n, threads, [&](std::size_t i) {
    const double label = nodes[i]; // k for the barrier basis, q for the well
    const double k = closed ? std::sqrt(label * label + 2.0 * U0) : label;
    const auto st = continuum_state(dec_->pot, k);
    inner_k_[i] = st.k;
    tail_q_[i] = st.tail_wavenumber;
    energy_[i] = st.energy;
    c_inner_[i] = st.inner_amp;
    v_a1_[i] = st.value_a1;
    d_a1_[i] = st.deriv_a1;
    kappa_sq_[i] = st.kappa_sq;
    theta_[i] = st.tail_phase;
  });
  a1_ = dec_->pot.barrier_left();
  a2_ = dec_->pot.is_barrier() ? dec_->pot.barrier_right() : a1_;
}

SpectralEvolution
SpectralEvolution::open(std::shared_ptr<const SpectralDecomposition> dec,
                        double x_max, double t_max, const GridConfig &cfg,
                        std::optional<double> t_close, int threads) {
  if (dec->basis != ContinuumState::Basis::Barrier)
    throw invalid_parameter("open evolution expects the barrier basis");
  SpectralEvolution ev;
  ev.dec_ = dec;
  ev.grid_ = build_k_grid(*dec, x_max, t_max, cfg, threads);
  ev.t_offset_ = 0.0;
  ev.window_lo_ = 0.0;
  ev.window_hi_ = t_close.value_or(inf);
  ev.cache_nodes(threads);
  parallel_for(ev.grid_.size(), threads, [&](std::size_t i) {
    ev.coeff_[i] = ev.grid_.weights()[i] * dec->coeff(ev.grid_.nodes()[i]);
  });
  return ev;
}

SpectralEvolution
SpectralEvolution::closed(std::shared_ptr<const SpectralDecomposition> dec,
                          double t0) {
  if (dec->basis != ContinuumState::Basis::StepWell)
    throw invalid_parameter("closed evolution expects the step-well basis");
  SpectralEvolution ev;
  ev.dec_ = dec;
  ev.grid_ = dec->grid;
  ev.t_offset_ = t0;
  ev.window_lo_ = t0;
  ev.window_hi_ = inf;
  ev.cache_nodes(1);
  for (std::size_t i = 0; i < ev.grid_.size(); ++i)
    ev.coeff_[i] = ev.grid_.weights()[i] * dec->values[i];
  ev.bound_ = dec->bound;
  ev.bound_coeff_ = dec->bound_coeffs;
  return ev;
}

void SpectralEvolution::check_window(double t) const {
  if (t < window_lo_ || t > window_hi_)
    throw Error(ErrorCode::PhaseViolation,
                "t = " + std::to_string(t) +
                    " lies outside this evolution phase [" +
                    std::to_string(window_lo_) + ", " +
                    std::to_string(window_hi_) + "]");
  const double horizon = t_offset_ + grid_.built_t_max;
  if (t > horizon * (1.0 + 1e-9) + 1e-12)
    throw accuracy_failure("t = " + std::to_string(t) +
                           " exceeds the grid accuracy horizon " +
                           std::to_string(horizon));
}

void SpectralEvolution::check_reach(double x) const {
  if (x > grid_.built_x_max * (1.0 + 1e-9) + 1e-12)
    throw accuracy_failure(
        "x = " + std::to_string(x) + " exceeds the grid phase contract (" +
        std::to_string(grid_.built_x_max) + "); build a wider evolution");
}

double SpectralEvolution::max_wavenumber() const {
  const bool closed = dec_->basis == ContinuumState::Basis::StepWell;
  if (!closed)
    return grid_.k_max();
  const double U0 = dec_->pot.barrier_top();
  return std::sqrt(grid_.k_max() * grid_.k_max() + 2.0 * U0);
}

double SpectralEvolution::mass_above(double v) const {
  std::vector<double> terms;
  terms.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i)
    if (tail_q_[i] > v)
      terms.push_back(std::norm(coeff_[i]) / grid_.weights()[i]);
  return pairwise_sum(terms);
}

WaveSample SpectralEvolution::sample(double x, double t) const {
  WaveSample out;
  sample_matrix(std::span<const double>{&x, 1}, std::span<const double>{&t, 1},
                std::span<WaveSample>{&out, 1}, 1);
  return out;
}

// Core kernel: chunk the nodes, cache phi(x) and phi'(x) per chunk, sweep
// the times. Chunk boundaries depend only on the grid, and every (x, t)
// output is accumulated in fixed panel order, so results are independent of
// the thread count.
void SpectralEvolution::sample_matrix(std::span<const double> xs,
                                      std::span<const double> ts,
                                      std::span<WaveSample> out,
                                      int threads) const {
  for (const double t : ts)
    check_window(t);
  for (const double x : xs)
    check_reach(x);
  const std::size_t n_nodes = grid_.size();
  const std::size_t n_x = xs.size();
  const std::size_t n_t = ts.size();
  assert(out.size() == n_x * n_t);

  constexpr std::size_t chunk = 16 * 1024; // multiple of the panel size
  const std::size_t buf = std::min(chunk, n_nodes);
  std::vector<double> phi(n_x * buf);
  std::vector<double> dphi(n_x * buf);
  std::vector<complex> phases(buf * n_t);

  for (std::size_t xi = 0; xi < n_x; ++xi)
    for (std::size_t ti = 0; ti < n_t; ++ti)
      out[xi * n_t + ti] = WaveSample{xs[xi], ts[ti], {0, 0}, {0, 0}};

  const std::size_t n_chunks = (n_nodes + chunk - 1) / chunk;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t i0 = c * chunk;
    const std::size_t m = std::min(chunk, n_nodes - i0);

    parallel_for(n_x, threads, [&](std::size_t xi) {
      const double x = xs[xi];
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = i0 + j;
        state_at(x, a1_, a2_, inner_k_[i], tail_q_[i], c_inner_[i], v_a1_[i],
                 d_a1_[i], kappa_sq_[i], theta_[i], phi[xi * m + j],
                 dphi[xi * m + j]);
      }
    });
    parallel_for(n_t, threads, [&](std::size_t ti) {
      const double dt = ts[ti] - t_offset_;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = i0 + j;
        const double ph = -energy_[i] * dt;
        const double c = std::cos(ph), s = std::sin(ph);
        const double cr = coeff_[i].real(), ci = coeff_[i].imag();
        phases[j * n_t + ti] = complex{cr * c - ci * s, cr * s + ci * c};
      }
    });
    parallel_for(n_t, threads, [&](std::size_t ti) {
      const std::size_t panels = (m + 15) / 16;
      std::vector<complex> part_psi(panels), part_dpsi(panels);
      for (std::size_t xi = 0; xi < n_x; ++xi) {
        for (std::size_t p = 0; p < panels; ++p) {
          complex ps{0, 0}, dps{0, 0};
          const std::size_t j_end = std::min(m, (p + 1) * 16);
          for (std::size_t j = p * 16; j < j_end; ++j) {
            const complex ph = phases[j * n_t + ti];
            ps += phi[xi * m + j] * ph;
            dps += dphi[xi * m + j] * ph;
          }
          part_psi[p] = ps;
          part_dpsi[p] = dps;
        }
        out[xi * n_t + ti].psi += pairwise_sum(part_psi);
        out[xi * n_t + ti].dpsi_dx += pairwise_sum(part_dpsi);
      }
    });
  }

  if (!bound_.empty()) {
    parallel_for(n_t, threads, [&](std::size_t ti) {
      const double dt = ts[ti] - t_offset_;
      for (std::size_t xi = 0; xi < n_x; ++xi) {
        for (std::size_t j = 0; j < bound_.size(); ++j) {
          const double ph = -bound_[j].energy * dt;
          const complex f =
              bound_coeff_[j] * complex{std::cos(ph), std::sin(ph)};
          out[xi * n_t + ti].psi += f * bound_[j].value(xs[xi]);
          out[xi * n_t + ti].dpsi_dx += f * bound_[j].derivative(xs[xi]);
        }
      }
    });
  }
}

// Uniform-x kernel: beyond a2 every basis state is a pure sinusoid, so the
// x-sweep costs one complex rotation per node and point. Points below a2
// (a handful) go through the generic kernel.
void SpectralEvolution::sample_uniform(double x0, double h, std::size_t n,
                                       double t, std::span<complex> psi,
                                       int threads) const {
  check_window(t);
  check_reach(x0 + h * static_cast<double>(n - 1));
  assert(psi.size() == n);
  const double dt = t - t_offset_;
  const std::size_t n_nodes = grid_.size();

  std::vector<complex> amp(n_nodes);
  parallel_for(n_nodes, threads, [&](std::size_t i) {
    const double ph = -energy_[i] * dt;
    const double c = std::cos(ph), s = std::sin(ph);
    const double cr = coeff_[i].real(), ci = coeff_[i].imag();
    amp[i] = complex{cr * c - ci * s, cr * s + ci * c};
  });

  std::size_t n_low = 0;
  while (n_low < n && x0 + h * static_cast<double>(n_low) < a2_)
    ++n_low;

  if (n_low > 0) {
    std::vector<double> xs(n_low);
    for (std::size_t i = 0; i < n_low; ++i)
      xs[i] = x0 + h * static_cast<double>(i);
    const double t_arr[1] = {t};
    std::vector<WaveSample> smp(n_low);
    sample_matrix(xs, std::span<const double>{t_arr, 1}, smp, threads);
    for (std::size_t i = 0; i < n_low; ++i)
      psi[i] = smp[i].psi;
  }

  const std::size_t n_high = n - n_low;
  if (n_high > 0) {
    const double x_start = x0 + h * static_cast<double>(n_low);
    complex *out = psi.data() + n_low;

    // explicit real/imaginary arithmetic: the rotation trick must not fall
    // back to the checked library complex multiply
    constexpr std::size_t block = 4096;
    const std::size_t n_blocks = (n_high + block - 1) / block;
    parallel_for(n_blocks, threads, [&](std::size_t b) {
      const std::size_t j0 = b * block;
      const std::size_t bn = std::min(block, n_high - j0);
      const double xb = x_start + h * static_cast<double>(j0);
      std::vector<double> acc_re(bn, 0.0), acc_im(bn, 0.0);
      for (std::size_t i = 0; i < n_nodes; ++i) {
        const double q = tail_q_[i];
        const double ar = amp[i].real() * delta_norm_amp;
        const double ai = amp[i].imag() * delta_norm_amp;
        const double rr = std::cos(q * h), ri = std::sin(q * h);
        double ur = std::cos(q * xb + theta_[i]);
        double ui = std::sin(q * xb + theta_[i]);
        for (std::size_t j = 0; j < bn; ++j) {
          acc_re[j] += ar * ui; // sin(q x + theta) carries the state value
          acc_im[j] += ai * ui;
          const double nr = ur * rr - ui * ri;
          ui = ur * ri + ui * rr;
          ur = nr;
        }
      }
      for (std::size_t j = 0; j < bn; ++j)
        out[j0 + j] = complex{acc_re[j], acc_im[j]};
    });

    for (std::size_t j = 0; j < bound_.size(); ++j) {
      const double ph = -bound_[j].energy * dt;
      const complex f = bound_coeff_[j] * complex{std::cos(ph), std::sin(ph)};
      for (std::size_t i = 0; i < n_high; ++i) {
        const double x = x_start + h * static_cast<double>(i);
        out[i] += f * bound_[j].value(x);
      }
    }
  }
}

// ---------------------------------------------------------------------------

CombinedEvolution::CombinedEvolution(
    std::shared_ptr<const SpectralEvolution> open_phase,
    std::shared_ptr<const SpectralEvolution> closed_phase, double t0)
    : open_(std::move(open_phase)), closed_(std::move(closed_phase)), t0_(t0) {}

WaveSample CombinedEvolution::sample(double x, double t) const {
  return t <= t0_ ? open_->sample(x, t) : closed_->sample(x, t);
}

void CombinedEvolution::sample_matrix(std::span<const double> xs,
                                      std::span<const double> ts,
                                      std::span<WaveSample> out,
                                      int threads) const {
  std::vector<double> open_ts, closed_ts;
  std::vector<std::size_t> open_idx, closed_idx;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= t0_) {
      open_ts.push_back(ts[i]);
      open_idx.push_back(i);
    } else {
      closed_ts.push_back(ts[i]);
      closed_idx.push_back(i);
    }
  }
  const auto scatter = [&](const Wavefunction &wf,
                           const std::vector<double> &sub_ts,
                           const std::vector<std::size_t> &idx) {
    if (sub_ts.empty())
      return;
    std::vector<WaveSample> sub(xs.size() * sub_ts.size());
    wf.sample_matrix(xs, sub_ts, sub, threads);
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
      for (std::size_t ti = 0; ti < sub_ts.size(); ++ti)
        out[xi * ts.size() + idx[ti]] = sub[xi * sub_ts.size() + ti];
  };
  scatter(*open_, open_ts, open_idx);
  scatter(*closed_, closed_ts, closed_idx);
}

void CombinedEvolution::sample_uniform(double x0, double h, std::size_t n,
                                       double t, std::span<complex> psi,
                                       int threads) const {
  (t <= t0_ ? *open_ : *closed_).sample_uniform(x0, h, n, t, psi, threads);
}

double CombinedEvolution::max_wavenumber() const {
  return std::max(open_->max_wavenumber(), closed_->max_wavenumber());
}

// ---------------------------------------------------------------------------

namespace {

// lightweight node cache for the doubling self-check
struct ProbeCache {
  std::vector<double> inner_k, tail_q, energy, c_inner, v_a1, d_a1, kappa_sq,
      theta;
  std::vector<complex> wcoeff;
  double a1 = 0.0, a2 = 0.0;

  static ProbeCache build(const SpectralDecomposition &dec, const KGrid &grid,
                          int threads) {
    ProbeCache pc;
    const std::size_t n = grid.size();
    pc.inner_k.resize(n);
    pc.tail_q.resize(n);
    pc.energy.resize(n);
    pc.c_inner.resize(n);
    pc.v_a1.resize(n);
    pc.d_a1.resize(n);
    pc.kappa_sq.resize(n);
    pc.theta.resize(n);
    pc.wcoeff.resize(n);
    const bool closed = dec.basis == ContinuumState::Basis::StepWell;
    const double U0 = dec.pot.barrier_top();
    parallel_for(n, threads, [&](std::size_t i) {
      const double label = grid.nodes()[i];
      const double k = closed ? std::sqrt(label * label + 2.0 * U0) : label;
      const auto st = continuum_state(dec.pot, k);
      pc.inner_k[i] = st.k;
      pc.tail_q[i] = st.tail_wavenumber;
      pc.energy[i] = st.energy;
      pc.c_inner[i] = st.inner_amp;
      pc.v_a1[i] = st.value_a1;
      pc.d_a1[i] = st.deriv_a1;
      pc.kappa_sq[i] = st.kappa_sq;
      pc.theta[i] = st.tail_phase;
      pc.wcoeff[i] = grid.weights()[i] * dec.coeff(label);
    });
    pc.a1 = dec.pot.barrier_left();
    pc.a2 = dec.pot.is_barrier() ? dec.pot.barrier_right() : pc.a1;
    return pc;
  }

  complex psi(double x, double t) const {
    const std::size_t panels = (wcoeff.size() + 15) / 16;
    std::vector<complex> parts(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      double sr = 0.0, si = 0.0;
      const std::size_t j_end = std::min(wcoeff.size(), (p + 1) * 16);
      for (std::size_t i = p * 16; i < j_end; ++i) {
        double v, d;
        state_at(x, a1, a2, inner_k[i], tail_q[i], c_inner[i], v_a1[i],
                 d_a1[i], kappa_sq[i], theta[i], v, d);
        const double ph = -energy[i] * t;
        const double c = std::cos(ph), s = std::sin(ph);
        const double wr = wcoeff[i].real() * v, wi = wcoeff[i].imag() * v;
        sr += wr * c - wi * s;
        si += wr * s + wi * c;
      }
      parts[p] = complex{sr, si};
    }
    return pairwise_sum(parts);
  }
};

} // namespace

KGrid build_k_grid(const SpectralDecomposition &dec, double x_max,
                   double t_max, const GridConfig &cfg, int threads) {
  if (!(x_max > 0.0) || t_max < 0.0)
    throw invalid_parameter("build_k_grid needs x_max > 0 and t_max >= 0");

  GridRecipe recipe;
  recipe.k_cut = dec.survey.k_cut;
  recipe.threshold_k = dec.basis == ContinuumState::Basis::Barrier
                           ? std::sqrt(2.0 * dec.pot.barrier_top())
                           : 0.0;
  recipe.resonances = dec.survey.resonances;
  recipe.x_max = x_max;
  recipe.t_max = t_max;

  KGrid grid = KGrid::build(recipe, cfg);

  std::vector<double> px(cfg.probe_count), pt(cfg.probe_count);
  for (int i = 0; i < cfg.probe_count; ++i) {
    px[i] = golden_sequence(static_cast<std::size_t>(i)) * x_max;
    pt[i] = golden_sequence(static_cast<std::size_t>(i) + 1000) * t_max;
  }
  px[0] = x_max;
  pt[0] = t_max;

  auto coarse = ProbeCache::build(dec, grid, threads);
  for (int round = 0; round <= cfg.max_refine_rounds; ++round) {
    KGrid fine_grid = grid.refined();
    if (fine_grid.size() > cfg.node_budget)
      throw accuracy_failure(
          "node budget exceeded before the k-grid self-check converged "
          "(last residual " + std::to_string(grid.convergence_residual) + ")");
    auto fine = ProbeCache::build(dec, fine_grid, threads);

    std::vector<complex> psi_c(cfg.probe_count), psi_f(cfg.probe_count);
    parallel_for(static_cast<std::size_t>(cfg.probe_count), threads,
                 [&](std::size_t i) {
                   psi_c[i] = coarse.psi(px[i], pt[i]);
                   psi_f[i] = fine.psi(px[i], pt[i]);
                 });
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < cfg.probe_count; ++i) {
      worst = std::max(worst, std::abs(psi_f[i] - psi_c[i]));
      scale = std::max(scale, std::abs(psi_f[i]));
    }
    const double residual = scale > 0.0 ? worst / scale : worst;
    grid.convergence_residual = residual;
    if (residual < cfg.convergence_tol)
      return grid;
    fine_grid.refine_rounds = grid.refine_rounds + 1;
    fine_grid.convergence_residual = residual;
    grid = std::move(fine_grid);
    coarse = std::move(fine);
  }
  throw accuracy_failure("k-grid self-check failed to reach " +
                         std::to_string(cfg.convergence_tol) + " (achieved " +
                         std::to_string(grid.convergence_residual) + ")");
}

} // namespace td

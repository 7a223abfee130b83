#include "spectral.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "threading.hpp"

namespace td {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

std::string to_string(InitialStateKind kind) {
  switch (kind) {
  case InitialStateKind::BoundGround:
    return "bound_ground";
  case InitialStateKind::InfiniteWell:
    return "infinite_well";
  case InitialStateKind::BoundExcited:
    return "bound_excited";
  }
  return "?";
}

InitialStateKind initial_state_kind_from_string(const std::string &name) {
  if (name == "bound_ground")
    return InitialStateKind::BoundGround;
  if (name == "infinite_well")
    return InitialStateKind::InfiniteWell;
  if (name == "bound_excited")
    return InitialStateKind::BoundExcited;
  throw bad_config("unknown initial state '" + name +
                   "' (bound_ground | infinite_well | bound_excited)");
}

InitialState InitialState::make(InitialStateKind kind,
                                const PiecewisePotential &well) {
  if (!well.is_step_well())
    throw invalid_parameter("initial states are prepared in the step well");
  InitialState st;
  st.kind_ = kind;
  const double a1 = well.well_width();

  if (kind == InitialStateKind::InfiniteWell) {
    const double amp = std::sqrt(2.0 / a1);
    const double om = pi / a1;
    Segment box{0.0, a1, {{amp, om, 0.0}}, {}};
    Segment outside{a1, inf, {}, {}};
    st.psi_ = PiecewiseFunction({box, outside});
    st.energy_ = 0.5 * om * om;
    return st;
  }

  const auto bound = solve_bound_states(well);
  const std::size_t j = kind == InitialStateKind::BoundGround ? 0 : 1;
  if (bound.size() <= j)
    throw invalid_parameter("the step well holds no bound state with index " +
                            std::to_string(j));
  st.psi_ = bound[j].psi;
  st.energy_ = bound[j].energy;
  st.origin_ = bound[j];
  return st;
}

double overlap_with_initial(const InitialState &psi0,
                            const ContinuumState &state) {
  const auto &segs = psi0.psi().segments();
  // fast path: initial state = one trig term on [0, a1] plus an exponential
  // (or empty) tail starting exactly at the well edge of the basis state
  const bool aligned = segs.size() == 2 && segs[0].hi == state.a1 &&
                       segs[0].trig.size() == 1 && segs[0].expo.empty() &&
                       segs[1].trig.empty() && segs[1].expo.size() <= 1;
  if (!aligned)
    return overlap(psi0.psi(), state.to_piecewise());

  const TrigTerm inner0 = segs[0].trig[0];
  const TrigTerm inner_k{state.inner_amp, state.k, 0.0};
  double sum = integrate_pair(inner0, inner_k, 0.0, state.a1);

  if (segs[1].expo.empty())
    return sum; // box state: nothing beyond a1

  const ExpTerm tail0 = segs[1].expo[0];
  const TrigTerm tail_k{delta_norm_amp, state.tail_wavenumber,
                        state.tail_phase};
  if (state.a2 > state.a1) {
    if (state.kappa_sq > 0.0) {
      const double kp = std::sqrt(state.kappa_sq);
      const ExpTerm dn{0.5 * (state.value_a1 - state.deriv_a1 / kp), -kp,
                       state.a1};
      const ExpTerm up{0.5 * (state.value_a1 + state.deriv_a1 / kp), kp,
                       state.a1};
      sum += integrate_pair(dn, tail0, state.a1, state.a2);
      sum += integrate_pair(up, tail0, state.a1, state.a2);
    } else {
      const double q = std::sqrt(-state.kappa_sq);
      const TrigTerm c{state.value_a1, q, pi / 2.0 - q * state.a1};
      const TrigTerm s{state.deriv_a1 / q, q, -q * state.a1};
      sum += integrate_pair(c, tail0, state.a1, state.a2);
      sum += integrate_pair(s, tail0, state.a1, state.a2);
    }
  }
  sum += integrate_pair(tail_k, tail0, state.a2, inf);
  return sum;
}

// ---------------------------------------------------------------------------
// survey: scan |coeff|, locate resonances, find the trailing cutoff

namespace {

// walk outward from a local peak of |f| to the |peak|/sqrt(2) crossings
// (half height of |f|^2); returns the FWHM in k
double half_width(const std::function<double(double)> &absf, double k_pk,
                  double pk, double step, double k_lo, double k_hi) {
  const double target = pk / std::sqrt(2.0);
  const auto cross = [&](double dir) {
    double prev = k_pk;
    for (double k = k_pk + dir * step;; k += dir * step) {
      if (k <= k_lo || k >= k_hi)
        return std::abs(k - k_pk);
      if (absf(k) < target) {
        // bisect the crossing
        double a = prev, b = k;
        for (int it = 0; it < 40; ++it) {
          const double m = 0.5 * (a + b);
          (absf(m) >= target ? a : b) = m;
        }
        return std::abs(0.5 * (a + b) - k_pk);
      }
      prev = k;
    }
  };
  return cross(+1.0) + cross(-1.0);
}

} // namespace

namespace detail {

SpectrumSurvey survey_coefficient(const std::function<double(double)> &absf,
                                  double k_lo, const GridConfig &cfg,
                                  double threshold_k) {
  SpectrumSurvey sv;
  const double step = cfg.survey_step;
  for (double k = std::max(k_lo, 0.5 * step); k < cfg.hard_span; k += step) {
    double kk = k;
    if (threshold_k > 0.0 && std::abs(kk - threshold_k) <= threshold_window)
      kk = threshold_k + 2.0 * threshold_window;
    sv.k.push_back(kk);
    sv.abs_coeff.push_back(absf(kk));
  }
  const auto it = std::max_element(sv.abs_coeff.begin(), sv.abs_coeff.end());
  sv.peak_abs = *it;
  sv.peak_k = sv.k[static_cast<std::size_t>(it - sv.abs_coeff.begin())];

  // resonance candidates: local maxima of |coeff|^2 above 1e-4 of the peak
  const double floor_abs = 1e-2 * sv.peak_abs;
  std::vector<std::pair<double, double>> cand; // (abs, k)
  for (std::size_t i = 1; i + 1 < sv.k.size(); ++i) {
    if (sv.abs_coeff[i] >= floor_abs && sv.abs_coeff[i] > sv.abs_coeff[i - 1] &&
        sv.abs_coeff[i] >= sv.abs_coeff[i + 1])
      cand.emplace_back(sv.abs_coeff[i], sv.k[i]);
  }
  std::sort(cand.rbegin(), cand.rend());
  if (cand.size() > 8)
    cand.resize(8);

  for (const auto &[amp, k_c] : cand) {
    // refine the peak location on a 50x finer local scan
    double k_pk = k_c;
    double pk = amp;
    for (double k = k_c - 2.0 * step; k <= k_c + 2.0 * step; k += step / 50.0) {
      if (k <= k_lo)
        continue;
      const double v = absf(k);
      if (v > pk) {
        pk = v;
        k_pk = k;
      }
    }
    const double w =
        half_width(absf, k_pk, pk, step / 25.0, k_lo, cfg.hard_span);
    if (w > 0.0 && w < 10.0)
      sv.resonances.push_back({k_pk, w});
  }
  std::sort(sv.resonances.begin(), sv.resonances.end(),
            [](const ResonanceWindow &a, const ResonanceWindow &b) {
              return a.center < b.center;
            });

  // trailing cutoff: smallest K with max |coeff| over [K - W, K] below
  // cutoff_rel * peak (the window guards against cutting at a zero of coeff)
  const double thr_abs = cfg.cutoff_rel * sv.peak_abs;
  const std::size_t win =
      std::max<std::size_t>(1, static_cast<std::size_t>(cfg.cutoff_window / step));
  std::size_t below = 0;
  sv.k_cut = cfg.hard_span;
  sv.cut_capped = true;
  for (std::size_t i = 0; i < sv.k.size(); ++i) {
    below = sv.abs_coeff[i] < thr_abs ? below + 1 : 0;
    if (below >= win && sv.k[i] > sv.peak_k) {
      sv.k_cut = sv.k[i];
      sv.cut_capped = false;
      break;
    }
  }
  return sv;
}

} // namespace detail

SpectrumSurvey survey_open_coefficient(const InitialState &psi0,
                                       const PiecewisePotential &barrier,
                                       const GridConfig &cfg) {
  const auto absf = [&](double k) {
    return std::abs(overlap_with_initial(psi0, continuum_state(barrier, k)));
  };
  const double threshold_k = std::sqrt(2.0 * barrier.barrier_top());
  auto sv = detail::survey_coefficient(absf, 1e-8, cfg, threshold_k);
  // the box state has a broad momentum tail; its cutoff is pinned
  if (psi0.kind() == InitialStateKind::InfiniteWell && !cfg.k_max_override) {
    sv.k_cut = std::min(40.0, cfg.hard_span);
    sv.cut_capped = false;
  }
  if (cfg.k_max_override)
    sv.k_cut = *cfg.k_max_override;
  return sv;
}

// ---------------------------------------------------------------------------

double SpectrumSurvey::k_effective(double rel) const {
  const double thr = rel * peak_abs;
  const double step = k.size() > 1 ? k[1] - k[0] : 1.0;
  const std::size_t win =
      std::max<std::size_t>(1, static_cast<std::size_t>(2.0 / step));
  std::size_t below = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    below = abs_coeff[i] < thr ? below + 1 : 0;
    if (below >= win && k[i] > peak_k)
      return std::min(k[i], k_cut);
  }
  return k_cut;
}

double SpectralDecomposition::bound_norm() const {
  double s = 0.0;
  for (const auto &b : bound_coeffs)
    s += std::norm(b);
  return s;
}

double SpectralDecomposition::continuum_norm() const {
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    terms[i] = grid.weights()[i] * std::norm(values[i]);
  return pairwise_sum(terms);
}

double SpectralDecomposition::completeness_defect() const {
  return std::abs(1.0 - bound_norm() - continuum_norm());
}

SpectralDecomposition project_open(const InitialState &psi0,
                                   const PiecewisePotential &barrier,
                                   const GridConfig &cfg) {
  if (!barrier.is_barrier())
    throw invalid_parameter("project_open expands over the barrier basis");

  SpectralDecomposition dec{ContinuumState::Basis::Barrier, barrier};
  dec.survey = survey_open_coefficient(psi0, barrier, cfg);
  dec.coeff = [psi0, barrier](double k) -> complex {
    return overlap_with_initial(psi0, continuum_state(barrier, k));
  };

  // the decomposition's own grid only needs the spectral structure (no
  // propagation phases): x_max ~ a2, t_max = 0
  GridRecipe recipe;
  recipe.k_cut = dec.survey.k_cut;
  recipe.threshold_k = std::sqrt(2.0 * barrier.barrier_top());
  recipe.resonances = dec.survey.resonances;
  recipe.x_max = barrier.barrier_right();
  recipe.t_max = 0.0;
  dec.grid = KGrid::build(recipe, cfg);

  dec.values.resize(dec.grid.size());
  for (std::size_t i = 0; i < dec.grid.size(); ++i)
    dec.values[i] = dec.coeff(dec.grid.nodes()[i]);

  if (dec.completeness_defect() > 1e-2)
    throw accuracy_failure(
        "open projection completeness defect " +
        std::to_string(dec.completeness_defect()) +
        " exceeds 1e-2; the k-grid cannot represent the initial state");
  return dec;
}

// ---------------------------------------------------------------------------
// closed projection: B_j and B(q) from the frozen field at t0

namespace {

// uniform grid with end-corrected weights over [lo, hi]
struct UniformRegion {
  double lo = 0.0, hi = 0.0, h = 0.0;
  std::vector<double> x;
  std::vector<double> w; // weight * h, ready to multiply samples
  std::vector<complex> wpsi; // w * Psi(x, t0)

  UniformRegion(double lo_, double hi_, double max_freq) : lo(lo_), hi(hi_) {
    // 12 points per wavelength of the fastest integrand component
    const double ppw = 12.0;
    const std::size_t n = std::max<std::size_t>(
        24, static_cast<std::size_t>(std::ceil((hi - lo) * max_freq * ppw /
                                               (2.0 * pi))));
    h = (hi - lo) / static_cast<double>(n);
    x.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      x[i] = lo + h * static_cast<double>(i);
    w = EndCorrectedUniform::weights(n + 1);
    for (auto &v : w)
      v *= h;
  }

  void load_field(const FieldAccessor &field) {
    std::vector<complex> psi(x.size());
    field(x, psi);
    wpsi.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      wpsi[i] = w[i] * psi[i];
  }

  // sum_l w_l Psi_l sin(om x_l + phase) via one phase rotation per step
  complex project_sin(double om, double phase) const {
    complex acc_p{0.0, 0.0};
    complex acc_m{0.0, 0.0};
    const complex rot{std::cos(om * h), std::sin(om * h)};
    complex u{std::cos(om * lo), std::sin(om * lo)};
    for (std::size_t i = 0; i < wpsi.size(); ++i) {
      acc_p += wpsi[i] * u;
      acc_m += wpsi[i] * std::conj(u);
      u *= rot;
    }
    const complex eip{std::cos(phase), std::sin(phase)};
    return (eip * acc_p - std::conj(eip) * acc_m) / complex{0.0, 2.0};
  }

  // direct weighted sum against an arbitrary real function
  complex project_fn(const std::function<double(double)> &f) const {
    complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < wpsi.size(); ++i)
      acc += wpsi[i] * f(x[i]);
    return acc;
  }
};

} // namespace

SpectralDecomposition project_closed(const FieldAccessor &field,
                                     const PiecewisePotential &well,
                                     const SpectrumSurvey &open_survey,
                                     const ClosedProjectionRequest &req,
                                     const GridConfig &cfg) {
  if (!well.is_step_well())
    throw invalid_parameter("project_closed re-expands over the step well");
  const double U0 = well.tail_height();
  const double a1 = well.well_width();

  SpectralDecomposition dec{ContinuumState::Basis::StepWell, well};
  dec.bound = solve_bound_states(well);

  // q-range: the frozen field inherits the open spectral content, so the
  // open-basis resonance windows are reused, and |B| tracks |G| up to
  // cross-basis mixing; coefficients below ~1e-4 of the peak change the
  // re-expansion by less than the completeness tolerance.
  double q_cut = std::min({open_survey.k_cut, cfg.hard_span,
                           open_survey.k_effective(1e-4) * 1.2 + 2.0});
  if (cfg.k_max_override)
    q_cut = *cfg.k_max_override;

  const double field_freq = req.field_max_wavenumber;
  const double a2 = req.barrier_a2;
  if (!(a2 > a1) || !(req.field_extent > a2 + 1.0))
    throw invalid_parameter("closed projection needs a1 < a2 < field_extent");
  // integration regions split at the field's curvature kinks a1 and a2
  auto regions = std::make_shared<std::vector<UniformRegion>>();
  regions->emplace_back(0.0, a1,
                        field_freq + std::sqrt(q_cut * q_cut + 2.0 * U0));
  regions->emplace_back(a1, a2, field_freq + q_cut);
  regions->emplace_back(a2, req.field_extent, field_freq + q_cut);
  for (auto &r : *regions)
    r.load_field(field);

  // bound amplitudes B_j
  for (const auto &b : dec.bound) {
    complex acc{0.0, 0.0};
    for (const auto &r : *regions)
      acc += r.project_fn([&](double x) { return b.psi(x); });
    dec.bound_coeffs.push_back(acc);
  }

  const auto b_of_q = [regions, well, U0](double q) -> complex {
    const double k_full = std::sqrt(q * q + 2.0 * U0);
    const auto st = continuum_state(well, k_full);
    // inner piece C1 sin(k_full x) on [0, a1]
    complex acc = (*regions)[0].project_sin(k_full, 0.0) * st.inner_amp;
    // free outer piece on [a1, field_extent]
    for (std::size_t r = 1; r < regions->size(); ++r)
      acc += (*regions)[r].project_sin(q, st.tail_phase) * delta_norm_amp;
    return acc;
  };
  dec.coeff = b_of_q;

  GridRecipe recipe;
  recipe.k_min = 1e-8;
  recipe.k_cut = q_cut;
  recipe.threshold_k = 0.0; // the q-parameterization has no degeneracy
  recipe.resonances = open_survey.resonances;
  recipe.x_max = req.x_max;
  recipe.t_max = req.t_max;
  dec.grid = KGrid::build(recipe, cfg);

  dec.values.resize(dec.grid.size());
  parallel_for(dec.grid.size(), req.threads, [&](std::size_t i) {
    dec.values[i] = b_of_q(dec.grid.nodes()[i]);
  });

  // trailing trim on |B| (relative 1e-4 keeps the L2 truncation under 1e-3)
  double peak = 0.0;
  for (const auto &v : dec.values)
    peak = std::max(peak, std::abs(v));
  const double thr = 1e-4 * peak;
  std::size_t keep_panels = dec.grid.panels().size();
  {
    std::size_t last_vital = 0;
    for (std::size_t p = 0; p < dec.grid.panels().size(); ++p) {
      for (std::size_t i = p * 16; i < (p + 1) * 16; ++i)
        if (std::abs(dec.values[i]) >= thr)
          last_vital = p;
    }
    keep_panels = std::min(keep_panels, last_vital + 2);
  }
  if (keep_panels < dec.grid.panels().size()) {
    GridRecipe trimmed = recipe;
    trimmed.k_cut = dec.grid.panels()[keep_panels - 1].hi;
    dec.grid = KGrid::build(trimmed, cfg);
    dec.values.resize(dec.grid.size());
    parallel_for(dec.grid.size(), req.threads, [&](std::size_t i) {
      dec.values[i] = b_of_q(dec.grid.nodes()[i]);
    });
  }

  if (dec.completeness_defect() > 1e-2)
    throw accuracy_failure(
        "closed projection completeness defect " +
        std::to_string(dec.completeness_defect()) + " exceeds 1e-2");
  return dec;
}

} // namespace td

#include "eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numeric.hpp"

namespace td {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// matching function for bound states of the step well
double bound_f(double k, double a1, double two_U0) {
  return k * std::cos(k * a1) / std::sin(k * a1) + std::sqrt(two_U0 - k * k);
}

double refine_root(double lo, double hi, double a1, double two_U0) {
  double flo = bound_f(lo, a1, two_U0);
  // bisection to a narrow bracket, then Newton polish
  for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bound_f(mid, a1, two_U0);
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double k = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double f = bound_f(k, a1, two_U0);
    const double h = 1e-7;
    const double df =
        (bound_f(k + h, a1, two_U0) - bound_f(k - h, a1, two_U0)) / (2.0 * h);
    if (df == 0.0)
      break;
    const double step = f / df;
    if (!(std::abs(step) < (hi - lo) + 1e-9))
      break;
    k -= step;
    k = std::clamp(k, lo - 1e-9, hi + 1e-9);
  }
  return k;
}

} // namespace

double BoundState::tail_mass(double x0) const {
  return tail_amp * tail_amp * std::exp(-2.0 * kappa * x0) / (2.0 * kappa);
}

std::vector<BoundState> solve_bound_states(const PiecewisePotential &pot) {
  if (!pot.is_step_well())
    throw invalid_parameter("bound states are solved in the step well U1");
  const double U0 = pot.tail_height();
  const double a1 = pot.well_width();
  const double two_U0 = 2.0 * U0;
  const double k_top = std::sqrt(two_U0);

  // f(k) = k cot(k a1) + kappa falls from +inf to -inf between consecutive
  // cotangent poles m pi / a1, so every full pole interval below k_top holds
  // exactly one root; the last partial interval holds one when f is already
  // negative at k_top. Deep wells put roots within ~k/ (kappa a1) of the
  // poles, which a uniform scan can miss, so bracket by pole intervals.
  std::vector<double> roots;
  const double pole_gap = pi / a1;
  for (double lo = 0.0; lo < k_top; lo += pole_gap) {
    const double hi = std::min(lo + pole_gap, k_top);
    double a = lo + 1e-9 * pole_gap;
    double b = hi - 1e-12 * std::max(1.0, hi);
    if (hi < lo + pole_gap)
      b = hi * (1.0 - 1e-14) - 1e-300;
    if (!(b > a))
      continue;
    const double fa = bound_f(a, a1, two_U0);
    const double fb = bound_f(b, a1, two_U0);
    if (!(fa > 0.0) || !(fb < 0.0))
      continue;
    roots.push_back(refine_root(a, b, a1, two_U0));
  }

  std::vector<BoundState> states;
  states.reserve(roots.size());
  for (std::size_t j = 0; j < roots.size(); ++j) {
    const double k = roots[j];
    const double kappa = std::sqrt(two_U0 - k * k);
    const double s = std::sin(k * a1);
    // A^2 [a1/2 - sin(2 k a1)/(4k) + sin^2(k a1)/(2 kappa)] = 1
    const double norm2 =
        a1 / 2.0 - std::sin(2.0 * k * a1) / (4.0 * k) + s * s / (2.0 * kappa);
    const double A = 1.0 / std::sqrt(norm2);
    const double B = A * s * std::exp(kappa * a1);

    BoundState st;
    st.index = static_cast<int>(j);
    st.k = k;
    st.energy = 0.5 * k * k;
    st.kappa = kappa;
    st.a1 = a1;
    st.inner_amp = A;
    st.tail_amp = B;
    st.matching_residual = std::abs(bound_f(k, a1, two_U0));

    Segment well{0.0, a1, {{A, k, 0.0}}, {}};
    Segment tail{a1, inf, {}, {{A * s, -kappa, a1}}};
    st.psi = PiecewiseFunction({well, tail});
    states.push_back(std::move(st));
  }
  return states;
}

double ContinuumState::value(double x) const {
  if (x < 0.0)
    throw invalid_parameter("x < 0 lies behind the hard wall");
  if (x < a1)
    return inner_amp * std::sin(k * x);
  if (x <= a2 && a2 > a1) {
    const double dx = x - a1;
    if (kappa_sq > 0.0) {
      const double kp = std::sqrt(kappa_sq);
      return value_a1 * std::cosh(kp * dx) + deriv_a1 / kp * std::sinh(kp * dx);
    }
    const double q = std::sqrt(-kappa_sq);
    return value_a1 * std::cos(q * dx) + deriv_a1 / q * std::sin(q * dx);
  }
  return delta_norm_amp * std::sin(tail_wavenumber * x + tail_phase);
}

double ContinuumState::derivative(double x) const {
  if (x < 0.0)
    throw invalid_parameter("x < 0 lies behind the hard wall");
  if (x < a1)
    return inner_amp * k * std::cos(k * x);
  if (x <= a2 && a2 > a1) {
    const double dx = x - a1;
    if (kappa_sq > 0.0) {
      const double kp = std::sqrt(kappa_sq);
      return value_a1 * kp * std::sinh(kp * dx) + deriv_a1 * std::cosh(kp * dx);
    }
    const double q = std::sqrt(-kappa_sq);
    return -value_a1 * q * std::sin(q * dx) + deriv_a1 * std::cos(q * dx);
  }
  return delta_norm_amp * tail_wavenumber *
         std::cos(tail_wavenumber * x + tail_phase);
}

double ContinuumState::coeff_D() const {
  if (kappa_sq <= 0.0)
    throw invalid_parameter("D is defined in the tunneling regime only");
  const double kp = std::sqrt(kappa_sq);
  return 0.5 * (value_a1 - deriv_a1 / kp) * std::exp(kp * a1);
}

double ContinuumState::coeff_F() const {
  if (kappa_sq <= 0.0)
    throw invalid_parameter("F is defined in the tunneling regime only");
  const double kp = std::sqrt(kappa_sq);
  return 0.5 * (value_a1 + deriv_a1 / kp) * std::exp(-kp * a1);
}

PiecewiseFunction ContinuumState::to_piecewise() const {
  std::vector<Segment> segs;
  segs.push_back({0.0, a1, {{inner_amp, k, 0.0}}, {}});
  if (a2 > a1) {
    Segment bar{a1, a2, {}, {}};
    if (kappa_sq > 0.0) {
      const double kp = std::sqrt(kappa_sq);
      // cosh/sinh Cauchy data as two exponentials anchored at a1
      bar.expo.push_back({0.5 * (value_a1 - deriv_a1 / kp), -kp, a1});
      bar.expo.push_back({0.5 * (value_a1 + deriv_a1 / kp), kp, a1});
    } else {
      const double q = std::sqrt(-kappa_sq);
      bar.trig.push_back({value_a1, q, pi / 2.0 - q * a1});
      bar.trig.push_back({deriv_a1 / q, q, -q * a1});
    }
    segs.push_back(std::move(bar));
  }
  segs.push_back(
      {a2, inf, {{delta_norm_amp, tail_wavenumber, tail_phase}}, {}});
  return PiecewiseFunction(std::move(segs));
}

ContinuumState continuum_state(const PiecewisePotential &pot, double k) {
  if (!(k > 0.0))
    throw invalid_parameter("continuum state needs k > 0");
  const double U0 = pot.barrier_top();
  const double k_top = std::sqrt(2.0 * U0);

  ContinuumState st;
  st.k = k;
  st.energy = 0.5 * k * k;
  st.a1 = pot.barrier_left();

  if (pot.is_step_well()) {
    if (!(k > k_top))
      throw invalid_parameter(
          "step-well continuum requires k > sqrt(2 U0) (propagating tail)");
    st.basis = ContinuumState::Basis::StepWell;
    st.a2 = st.a1;
    const double q = std::sqrt(k * k - 2.0 * U0);
    // match C1 sin(k x) to sqrt(2/pi) sin(q x + theta1) at a1
    const double s = std::sin(k * st.a1);
    const double c = std::cos(k * st.a1);
    const double r = std::hypot(s, k * c / q);
    st.inner_amp = delta_norm_amp / r;
    st.tail_wavenumber = q;
    st.tail_phase = std::atan2(s, k * c / q) - q * st.a1;
    st.value_a1 = st.inner_amp * s;
    st.deriv_a1 = st.inner_amp * k * c;
    st.kappa_sq = 2.0 * U0 - k * k; // negative by construction
    return st;
  }

  if (!pot.is_barrier())
    throw invalid_parameter("continuum_state needs a step well or a barrier");
  if (std::abs(k - k_top) <= threshold_window)
    throw Error(ErrorCode::DegenerateThreshold,
                "k coincides with the barrier top sqrt(2 U0); offset the "
                "grid around the degenerate point");

  st.basis = ContinuumState::Basis::Barrier;
  st.a2 = pot.barrier_right();
  const double d = st.a2 - st.a1;
  st.kappa_sq = 2.0 * U0 - k * k;

  // propagate sin(k x) through the barrier with provisional unit amplitude
  const double v1 = std::sin(k * st.a1);
  const double d1 = k * std::cos(k * st.a1);
  double v2, d2;
  if (st.kappa_sq > 0.0) {
    const double kp = std::sqrt(st.kappa_sq);
    v2 = v1 * std::cosh(kp * d) + d1 / kp * std::sinh(kp * d);
    d2 = v1 * kp * std::sinh(kp * d) + d1 * std::cosh(kp * d);
  } else {
    const double q = std::sqrt(-st.kappa_sq);
    v2 = v1 * std::cos(q * d) + d1 / q * std::sin(q * d);
    d2 = -v1 * q * std::sin(q * d) + d1 * std::cos(q * d);
  }
  // the free tail is r sin(k x + theta); rescale everything to sqrt(2/pi)
  const double r = std::hypot(v2, d2 / k);
  const double scale = delta_norm_amp / r;
  st.inner_amp = scale;
  st.value_a1 = v1 * scale;
  st.deriv_a1 = d1 * scale;
  st.tail_wavenumber = k;
  st.tail_phase = std::atan2(v2, d2 / k) - k * st.a2;
  return st;
}

double eval_state(const ContinuumState &state, double x) {
  return state.value(x);
}
double eval_state_deriv(const ContinuumState &state, double x) {
  return state.derivative(x);
}
double eval_state(const BoundState &state, double x) { return state.value(x); }
double eval_state_deriv(const BoundState &state, double x) {
  return state.derivative(x);
}

} // namespace td

#pragma once
#include <vector>

#include "piecewise.hpp"
#include "potential.hpp"

namespace td {

// Bound state of the step well U1, unit L2 norm. Inside the well the state
// is inner_amp * sin(k x); beyond a1 it is tail_amp * exp(-kappa x).
struct BoundState {
  int index = 0;
  double energy = 0.0;
  double k = 0.0;     // sqrt(2 E)
  double kappa = 0.0; // sqrt(2 U0 - k^2)
  double a1 = 0.0;
  double inner_amp = 0.0;
  double tail_amp = 0.0;
  double matching_residual = 0.0; // |k cot(k a1) + kappa|
  PiecewiseFunction psi;

  double value(double x) const { return psi(x); }
  double derivative(double x) const { return psi.derivative(x); }
  // closed-form probability beyond x0 >= a1
  double tail_mass(double x0) const;
};

// All bound states of a step well, sorted by energy. The count equals the
// number of sign changes of f(k) = k cot(k a1) + sqrt(2 U0 - k^2) between
// the cotangent poles on (0, sqrt(2 U0)).
std::vector<BoundState> solve_bound_states(const PiecewisePotential &pot);

// Delta-normalized continuum eigenstate. Both bases share the asymptotic
// form sqrt(2/pi) sin(q_tail x + tail_phase); the normalization variable is
// the tail wavenumber (q for the step-well basis, k for the barrier basis).
struct ContinuumState {
  enum class Basis { StepWell, Barrier };

  Basis basis = Basis::Barrier;
  double k = 0.0;      // inner wavenumber, E = k^2 / 2
  double energy = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;     // == a1 for the step-well basis
  double inner_amp = 0.0;      // C(k) resp. C1(k)
  double tail_wavenumber = 0.0;
  double tail_phase = 0.0;
  // barrier-segment Cauchy data at a1 (value and derivative); with
  // kappa_sq = 2 U0 - k^2 they define the interior piece in the stable
  // cosh/sinh (or cos/sin) form for either sign of kappa_sq
  double value_a1 = 0.0;
  double deriv_a1 = 0.0;
  double kappa_sq = 0.0;

  double value(double x) const;
  double derivative(double x) const;

  // exponential coefficients of the barrier segment D e^{-kappa x} +
  // F e^{kappa x}, rescaled to the segment anchor a1 (tunneling regime only)
  double coeff_D() const;
  double coeff_F() const;

  PiecewiseFunction to_piecewise() const;
};

// Continuum state of either model potential at inner wavenumber k.
// Step well: requires k > sqrt(2 U0). Barrier: any k > 0 except within
// the degenerate window |k - sqrt(2 U0)| <= 1e-8 (see continuum_threshold).
ContinuumState continuum_state(const PiecewisePotential &pot, double k);

// half-width of the excluded window around the barrier-top degeneracy
inline constexpr double threshold_window = 1e-8;

double eval_state(const ContinuumState &state, double x);
double eval_state_deriv(const ContinuumState &state, double x);
double eval_state(const BoundState &state, double x);
double eval_state_deriv(const BoundState &state, double x);

} // namespace td

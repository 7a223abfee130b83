#pragma once
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eigensolve.hpp"
#include "kgrid.hpp"
#include "numeric.hpp"
#include "potential.hpp"

namespace td {

enum class InitialStateKind { BoundGround, InfiniteWell, BoundExcited };

std::string to_string(InitialStateKind kind);
InitialStateKind initial_state_kind_from_string(const std::string &name);

// State prepared in the step well before the barrier opens: one of its bound
// states, or the hard-box ground state sqrt(2/a1) sin(pi x / a1) cut at a1.
class InitialState {
public:
  static InitialState make(InitialStateKind kind,
                           const PiecewisePotential &well);

  InitialStateKind kind() const { return kind_; }
  double energy() const { return energy_; }
  const PiecewiseFunction &psi() const { return psi_; }
  double operator()(double x) const { return psi_(x); }
  // bound state the initial state came from (nullopt for the box state)
  const std::optional<BoundState> &bound_origin() const { return origin_; }

private:
  InitialStateKind kind_ = InitialStateKind::BoundGround;
  double energy_ = 0.0;
  PiecewiseFunction psi_;
  std::optional<BoundState> origin_;
};

// closed form of <psi0 | phi_k>, allocation-free (hot path of grid builds)
double overlap_with_initial(const InitialState &psi0,
                            const ContinuumState &state);

// |coeff(k)| scan used for cutoff and resonance detection.
struct SpectrumSurvey {
  std::vector<double> k;
  std::vector<double> abs_coeff;
  double peak_abs = 0.0;
  double peak_k = 0.0;
  std::vector<ResonanceWindow> resonances;
  double k_cut = 0.0;
  bool cut_capped = false; // trailing criterion never met inside hard_span

  // smallest k beyond which |coeff| stays under rel * peak (trailing window
  // of width 2); k_cut when never reached
  double k_effective(double rel) const;
};

// Spectral content of the wavefunction in one eigenbasis: exact coefficient
// evaluator plus samples on the decomposition's own resonance-resolved grid.
struct SpectralDecomposition {
  ContinuumState::Basis basis = ContinuumState::Basis::Barrier;
  PiecewisePotential pot; // potential whose eigenstates span the basis
  std::function<complex(double)> coeff; // G(k) resp. B(q); exact, reusable
  SpectrumSurvey survey;
  KGrid grid;
  std::vector<complex> values; // coeff at grid nodes (imag == 0 for open)

  // closed basis extras: bound states of pot and their amplitudes
  std::vector<BoundState> bound;
  std::vector<complex> bound_coeffs;

  double bound_norm() const; // sum |B_j|^2
  double continuum_norm() const; // quadrature of |coeff|^2 over the grid
  double completeness_defect() const; // |1 - bound_norm - continuum_norm|

  ContinuumState state_at(double k) const { return continuum_state(pot, k); }
};

// Expansion of the initial state over the barrier continuum (opening step).
// Throws AccuracyFailure when the completeness defect exceeds 1e-2.
SpectralDecomposition project_open(const InitialState &psi0,
                                   const PiecewisePotential &barrier,
                                   const GridConfig &cfg);

// Batch accessor for the frozen wavefunction at the closing time: fills
// psi[i] = Psi(x[i], t0). Supplied by the evolve module.
using FieldAccessor =
    std::function<void(std::span<const double>, std::span<complex>)>;

struct ClosedProjectionRequest {
  double t0 = 0.0;
  double x_max = 1.0;  // evolution window the closed grid must support
  double t_max = 0.0;  // measured from t0
  double barrier_a2 = 1.4;     // kink of the frozen field (open potential)
  double field_extent = 200.0; // where |Psi(.,t0)| is negligible
  double field_max_wavenumber = 40.0; // spectral content of the frozen field
  int threads = 1;
};

// Re-expansion over the step-well basis after the barrier closes at t0.
// The continuum is parameterized by the outer wavenumber q (the basis is
// normalized to delta(q - q')), with energies E = (q^2 + 2 U0) / 2.
SpectralDecomposition project_closed(const FieldAccessor &field,
                                     const PiecewisePotential &well,
                                     const SpectrumSurvey &open_survey,
                                     const ClosedProjectionRequest &req,
                                     const GridConfig &cfg);

// Survey of the open-basis coefficient (exposed for reuse and tests).
SpectrumSurvey survey_open_coefficient(const InitialState &psi0,
                                       const PiecewisePotential &barrier,
                                       const GridConfig &cfg);

} // namespace td

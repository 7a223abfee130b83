#pragma once
#include <optional>
#include <string>
#include <vector>

#include "evolve.hpp"

namespace td {

// rho(x, t) = |Psi|^2
double density(const WaveSample &ws);

// J(x, t) = Im[Psi* dPsi/dx]
double flux(const WaveSample &ws);

// densities below this are treated as empty space when dividing J / rho
inline constexpr double velocity_density_floor = 1e-12;

// J / rho; quiet NaN where rho <= the floor
double local_velocity(const WaveSample &ws);

// Time series of one scalar observable at a fixed probe.
struct TraceSeries {
  std::string observable; // "rho" | "J" | "w1" | "w2" | "vB"
  double probe_x = 0.0;
  std::vector<double> times;
  std::vector<double> values;
};

// rho and J at a probe for a batch of times
struct EdgeTraces {
  TraceSeries rho;
  TraceSeries current;
};
EdgeTraces probe_traces(const Wavefunction &wf, double x,
                        std::span<const double> ts, int threads);

// Probability in the well [0, a1], by composite Gauss quadrature whose panel
// count resolves the expansion's spectral content (self-checked to 1e-6).
class WellIntegrator {
public:
  WellIntegrator(const Wavefunction &wf, double a1);
  double operator()(double t, int threads = 1) const;
  std::vector<double> trace(std::span<const double> ts, int threads) const;

private:
  const Wavefunction &wf_;
  double a1_;
  std::vector<double> x_, w_;
};

double well_probability(const Wavefunction &wf, double a1, double t,
                        int threads = 1);

struct OutsideProbability {
  double value = 0.0;      // box integral over [a2, X_box]
  double tail_bound = 0.0; // spectral estimate of the mass beyond the box
  double x_box = 0.0;
};

// Probability beyond the barrier, finite box plus a group-velocity tail
// estimate; the box is max(4 sqrt(2 E0) t, 200). Throws AccuracyFailure when
// the tail bound exceeds 1e-4.
OutsideProbability outside_probability(const SpectralEvolution &ev, double a2,
                                       double E0, double t, int threads = 1);

// Norm in [0, X_box] plus the spectral tail estimate (conservation check).
struct NormCheck {
  double box_integral = 0.0;
  double tail_estimate = 0.0;
  double x_box = 0.0;
  double total() const { return box_integral + tail_estimate; }
};
NormCheck total_norm(const SpectralEvolution &ev, double E0, double t,
                     int threads = 1);

// |d rho/dt + dJ/dx| at a smooth point, central differences with one
// Richardson refinement (diagnostic; the evolution itself is spectral).
double continuity_residual(const Wavefunction &wf, double x, double t,
                           double h_x = 1e-4, double h_t = 1e-4);

} // namespace td

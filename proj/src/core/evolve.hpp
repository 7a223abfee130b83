#pragma once
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spectral.hpp"

namespace td {

struct WaveSample {
  double x = 0.0;
  double t = 0.0;
  complex psi{0.0, 0.0};
  complex dpsi_dx{0.0, 0.0};
};

// Complex wavefunction of one evolution phase, evaluable anywhere.
class Wavefunction {
public:
  virtual ~Wavefunction() = default;
  virtual WaveSample sample(double x, double t) const = 0;

  // Psi at fixed probes for many times; out is row-major [xs.size][ts.size].
  virtual void sample_matrix(std::span<const double> xs,
                             std::span<const double> ts,
                             std::span<WaveSample> out, int threads) const = 0;

  // Psi on a uniform x grid at one time (no spatial derivatives).
  virtual void sample_uniform(double x0, double h, std::size_t n, double t,
                              std::span<complex> psi,
                              int threads) const = 0;

  // largest wavenumber carried by the expansion (sizes spatial quadratures)
  virtual double max_wavenumber() const = 0;
};

// Quadrature evolution of a spectral decomposition,
//   Psi(x, t) = sum_j B_j phi_j(x) e^{-i E_j (t - t_off)}
//             + int coeff(k) phi_k(x) e^{-i E_k (t - t_off)} dmu(k),
// covering both the open phase (no bound part, t_off = 0, valid on
// [0, t_close]) and the closed phase (t_off = t0, valid on (t0, inf)).
class SpectralEvolution : public Wavefunction {
public:
  // Open-phase evolution able to evaluate on [0, x_max] x [0, t_max].
  // t_close bounds the valid window, not the grid (pass the closing time).
  static SpectralEvolution
  open(std::shared_ptr<const SpectralDecomposition> dec, double x_max,
       double t_max, const GridConfig &cfg,
       std::optional<double> t_close = std::nullopt, int threads = 1);

  // Closed-phase evolution from a step-well decomposition built by
  // project_closed (the grid inside the decomposition is reused as-is).
  static SpectralEvolution
  closed(std::shared_ptr<const SpectralDecomposition> dec, double t0);

  WaveSample sample(double x, double t) const override;
  void sample_matrix(std::span<const double> xs, std::span<const double> ts,
                     std::span<WaveSample> out, int threads) const override;
  void sample_uniform(double x0, double h, std::size_t n, double t,
                      std::span<complex> psi, int threads) const override;
  double max_wavenumber() const override;

  const KGrid &grid() const { return grid_; }
  const SpectralDecomposition &decomposition() const { return *dec_; }
  std::span<const double> node_k() const { return inner_k_; }
  std::span<const complex> node_coeff() const { return coeff_; }
  std::span<const double> node_tail_phase() const { return theta_; }

  // spectral mass carried by nodes with tail wavenumber above v
  double mass_above(double v) const;

private:
  SpectralEvolution() = default;
  void cache_nodes(int threads);
  void check_window(double t) const;
  void check_reach(double x) const;
  // contribution sums at one x for a batch of phases
  void accumulate_point(double x, std::span<const complex> phases_begin,
                        std::size_t n_t, std::span<const double> dts,
                        WaveSample *out) const;

  std::shared_ptr<const SpectralDecomposition> dec_;
  KGrid grid_;
  double t_offset_ = 0.0;
  double window_lo_ = 0.0;
  double window_hi_ = 0.0; // inf when the phase never ends

  // per-node state data (struct of arrays)
  std::vector<double> inner_k_, tail_q_, energy_;
  std::vector<double> c_inner_, v_a1_, d_a1_, kappa_sq_, theta_;
  std::vector<complex> coeff_; // quadrature weight * coefficient
  double a1_ = 0.0, a2_ = 0.0;

  // bound part (closed phase)
  std::vector<BoundState> bound_;
  std::vector<complex> bound_coeff_;
};

// Open evolution for 0 <= t <= t0 stitched to the closed evolution beyond.
class CombinedEvolution : public Wavefunction {
public:
  CombinedEvolution(std::shared_ptr<const SpectralEvolution> open_phase,
                    std::shared_ptr<const SpectralEvolution> closed_phase,
                    double t0);

  WaveSample sample(double x, double t) const override;
  void sample_matrix(std::span<const double> xs, std::span<const double> ts,
                     std::span<WaveSample> out, int threads) const override;
  void sample_uniform(double x0, double h, std::size_t n, double t,
                      std::span<complex> psi, int threads) const override;
  double max_wavenumber() const override;

private:
  std::shared_ptr<const SpectralEvolution> open_;
  std::shared_ptr<const SpectralEvolution> closed_;
  double t0_;
};

// Spec-facing grid builder: panels satisfying the phase-resolution and
// resonance contracts for the decomposition, validated by the doubling
// self-check at probe points.
KGrid build_k_grid(const SpectralDecomposition &dec, double x_max,
                   double t_max, const GridConfig &cfg, int threads = 1);

} // namespace td

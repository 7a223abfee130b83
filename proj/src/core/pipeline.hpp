#pragma once
#include <memory>

#include "analysis.hpp"

namespace td {

// Solved model for one (U0, a1, a2, initial state) choice: both potentials,
// the step-well spectrum, and the opening-step decomposition. Evolutions for
// specific windows are derived from it.
class ModelSetup {
public:
  static ModelSetup create(double U0, double a1, double a2,
                           InitialStateKind kind, const GridConfig &cfg,
                           int threads);

  const PiecewisePotential &well() const { return well_; }
  const PiecewisePotential &barrier() const { return barrier_; }
  const std::vector<BoundState> &bound_states() const { return bound_; }
  const InitialState &psi0() const { return psi0_; }
  std::shared_ptr<const SpectralDecomposition> open_decomposition() const {
    return open_;
  }
  const GridConfig &grid_config() const { return cfg_; }
  int threads() const { return threads_; }
  double U0() const { return U0_; }
  double a1() const { return a1_; }
  double a2() const { return a2_; }
  double E0() const { return psi0_.energy(); }
  double barrier_width() const { return a2_ - a1_; }
  double kappa() const; // sqrt(2 (U0 - E0)) of the initial state

  // open-phase evolution accurate on [0, x_max] x [0, t_max]
  std::shared_ptr<const SpectralEvolution>
  open_evolution(double x_max, double t_max,
                 std::optional<double> t_close = std::nullopt) const;

  // full time evolution with the barrier closing at t0: projection onto the
  // step-well basis at t0 plus the stitched evolution
  struct ClosedRun {
    std::shared_ptr<const SpectralDecomposition> decomposition;
    std::shared_ptr<const SpectralEvolution> open_phase;
    std::shared_ptr<const SpectralEvolution> closed_phase;
    std::shared_ptr<const CombinedEvolution> combined;
  };
  ClosedRun close_at(double t0, double x_max, double t_max_after) const;

private:
  PiecewisePotential well_{{{0.0, 1.0, 0.0},
                            {1.0, std::numeric_limits<double>::infinity(),
                             1.0}}};
  PiecewisePotential barrier_{{{0.0, 1.0, 0.0},
                               {1.0, 1.4, 1.0},
                               {1.4, std::numeric_limits<double>::infinity(),
                                0.0}}};
  std::vector<BoundState> bound_;
  InitialState psi0_;
  std::shared_ptr<const SpectralDecomposition> open_;
  GridConfig cfg_;
  int threads_ = 1;
  double U0_ = 0.0, a1_ = 0.0, a2_ = 0.0;
};

// Barrier geometry helpers used by the bundled experiments: the width that
// realizes a given opacity kappa d at fixed U0, and the height realizing it
// at fixed a2 (E0 re-solved per U0).
double width_for_opacity(double U0, double a1, double kappa_d,
                         InitialStateKind kind = InitialStateKind::BoundGround);
double height_for_opacity(double a1, double a2, double kappa_d,
                          InitialStateKind kind = InitialStateKind::BoundGround);

struct ClosingScanRow {
  double t0 = 0.0;
  double escaped_fraction = 0.0; // 1 - sum_j |B_j|^2
  double t_X = std::numeric_limits<double>::quiet_NaN();
};

struct ClosingScanConfig {
  std::vector<double> t0_values;
  std::optional<double> detector_X; // compute t_X(t0) when set
  double detector_dt = 0.05;
  double detector_horizon = 80.0;
};

// Escaped fraction (and optionally the detector peak time) as a function of
// the closing time.
std::vector<ClosingScanRow> closing_time_scan(const ModelSetup &model,
                                              const ClosingScanConfig &scan);

// A full decay characterization at the flagship observables; drives the
// decay and detector experiments.
struct TimescaleInputs {
  double trace_horizon = 60.0;
  double trace_dt = 0.05;
  double detector_X = 120.0;
  double detector_dx = 2.0; // near/far separation for the peak velocity
  double detector_dt = 0.05;
  double detector_horizon = 80.0;
  bool with_detector = true;
};

TimescaleReport extract_timescales(const ModelSetup &model,
                                   const TimescaleInputs &in);

} // namespace td

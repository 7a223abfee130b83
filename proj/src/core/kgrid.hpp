#pragma once
#include <cstddef>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace td {

// Lorentzian-like peak of the spectral coefficient: fine panels across the
// core, geometrically growing panels along the algebraic tails.
struct ResonanceWindow {
  double center = 0.0;
  double width = 0.0; // FWHM of |coeff|^2 in the wavenumber variable
};

struct GridConfig {
  std::optional<double> k_max_override;
  double cutoff_rel = 1e-6;   // trailing |coeff| cut relative to the peak
  double cutoff_window = 2.0; // trailing-window width guarding |coeff| zeros
  double survey_step = 0.004;
  double hard_span = 80.0;  // survey and cutoff search end here
  double h_cap = 0.2;       // largest panel anywhere
  double res_core_span = 5.0;   // tagged core = center +- span * width
  double res_core_factor = 1.9; // in-core panel h <= width / factor
  double res_geo_factor = 6.0;  // tail panel h <= |k - center| / factor
  double phase_margin = 4.13;   // h <= margin / (x_max + k t_max)
  std::size_t node_budget = 3000000;
  double convergence_tol = 1e-6; // doubling self-check, relative
  int probe_count = 20;
  int max_refine_rounds = 3;
};

// Inputs the panel builder needs besides the config.
struct GridRecipe {
  double k_min = 1e-8;
  double k_cut = 40.0;
  double threshold_k = 0.0; // sqrt(2 U0); 0 disables the excluded window
  std::vector<ResonanceWindow> resonances;
  double x_max = 1.0;
  double t_max = 0.0;
};

struct Panel {
  enum class Tag { Base, Resonance, Phase };
  double lo;
  double hi;
  Tag tag;
};

// Composite 16-point Gauss-Legendre mesh over (k_min, k_cut). Within every
// panel the node spacing dk obeys dk (x_max + k t_max) < pi/8, and tagged
// resonance panels obey dk < width/20.
class KGrid {
public:
  KGrid() = default;

  static KGrid build(const GridRecipe &recipe, const GridConfig &cfg);

  // every panel split in half (used by the self-convergence check)
  KGrid refined() const;

  const std::vector<Panel> &panels() const { return panels_; }
  const std::vector<double> &nodes() const { return nodes_; }
  const std::vector<double> &weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }

  std::size_t refine_rounds = 0;        // doubling rounds actually applied
  double convergence_residual = 0.0;    // last doubling-check residual
  double built_x_max = 0.0;             // window the phase contract covers
  double built_t_max = 0.0;

private:
  void fill_nodes();
  std::vector<Panel> panels_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double k_min_ = 0.0;
  double k_max_ = 0.0;
};

} // namespace td

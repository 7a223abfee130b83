#include "kgrid.hpp"

#include <algorithm>
#include <cmath>

#include "numeric.hpp"

namespace td {

KGrid KGrid::build(const GridRecipe &recipe, const GridConfig &cfg) {
  if (!(recipe.k_cut > recipe.k_min))
    throw invalid_parameter("grid needs k_cut > k_min");

  const double thr = recipe.threshold_k;
  const bool has_thr = thr > recipe.k_min && thr < recipe.k_cut;
  const double thr_lo = thr - 1e-8;
  const double thr_hi = thr + 1e-8;

  // hard panel boundaries the mesh must not straddle
  std::vector<double> bounds;
  if (has_thr) {
    bounds.push_back(thr_lo);
    bounds.push_back(thr_hi);
  }
  for (const auto &r : recipe.resonances) {
    const double lo = r.center - cfg.res_core_span * r.width;
    const double hi = r.center + cfg.res_core_span * r.width;
    if (lo > recipe.k_min && lo < recipe.k_cut)
      bounds.push_back(lo);
    if (hi > recipe.k_min && hi < recipe.k_cut)
      bounds.push_back(hi);
  }
  bounds.push_back(recipe.k_cut);
  std::sort(bounds.begin(), bounds.end());

  KGrid g;
  g.k_min_ = recipe.k_min;
  g.k_max_ = recipe.k_cut;
  g.built_x_max = recipe.x_max;
  g.built_t_max = recipe.t_max;

  double k = recipe.k_min;
  while (k < recipe.k_cut - 1e-12) {
    double h = cfg.h_cap;
    Panel::Tag tag = Panel::Tag::Base;

    const double h_phase =
        cfg.phase_margin / (recipe.x_max + k * recipe.t_max + 1e-300);
    if (h_phase < h) {
      h = h_phase;
      tag = Panel::Tag::Phase;
    }
    for (const auto &r : recipe.resonances) {
      const double dist = std::abs(k - r.center);
      const bool in_core = dist <= cfg.res_core_span * r.width;
      const double h_res = in_core ? r.width / cfg.res_core_factor
                                   : std::max(r.width / cfg.res_core_factor,
                                              dist / cfg.res_geo_factor);
      if (h_res < h) {
        h = h_res;
        if (in_core)
          tag = Panel::Tag::Resonance;
      }
    }
    if (has_thr) {
      // square-root branch point of kappa_k at the barrier top
      const double h_thr = std::max(2e-3, std::abs(k - thr) / 4.0);
      h = std::min(h, h_thr);
    }

    for (const double b : bounds) {
      if (k < b - 1e-13 && k + h > b) {
        h = b - k;
        break;
      }
    }

    double next = k + h;
    const bool is_gap = has_thr && k >= thr_lo - 1e-14 && next <= thr_hi + 1e-14;
    if (!is_gap)
      g.panels_.push_back({k, next, tag});
    if (has_thr && std::abs(next - thr_lo) < 1e-14)
      next = thr_hi;
    k = next;

    if (g.panels_.size() * 16 > cfg.node_budget)
      throw accuracy_failure("k-grid node budget exceeded while laying panels");
  }

  g.fill_nodes();
  return g;
}

KGrid KGrid::refined() const {
  KGrid g;
  g.k_min_ = k_min_;
  g.k_max_ = k_max_;
  g.built_x_max = built_x_max;
  g.built_t_max = built_t_max;
  g.panels_.reserve(panels_.size() * 2);
  for (const auto &p : panels_) {
    const double mid = 0.5 * (p.lo + p.hi);
    g.panels_.push_back({p.lo, mid, p.tag});
    g.panels_.push_back({mid, p.hi, p.tag});
  }
  g.fill_nodes();
  return g;
}

void KGrid::fill_nodes() {
  nodes_.clear();
  weights_.clear();
  nodes_.reserve(panels_.size() * 16);
  weights_.reserve(panels_.size() * 16);
  for (const auto &p : panels_) {
    const double c = 0.5 * (p.lo + p.hi);
    const double half = 0.5 * (p.hi - p.lo);
    for (int i = 0; i < 16; ++i) {
      nodes_.push_back(c + half * GaussLegendre16::nodes[i]);
      weights_.push_back(half * GaussLegendre16::weights[i]);
    }
  }
}

} // namespace td

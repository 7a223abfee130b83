#pragma once
#include <vector>

#include "errors.hpp"

namespace td {

// 1D potential with a hard wall at x = 0: finitely many constant segments
// followed by a constant tail. Units: hbar = m = 1, lengths in units of a1.
class PiecewisePotential {
public:
  struct Region {
    double lo;
    double hi; // +inf for the tail region
    double height;
  };

  PiecewisePotential(std::vector<Region> regions);

  double value(double x) const;
  const std::vector<Region> &regions() const { return regions_; }

  double tail_height() const { return regions_.back().height; }
  // largest finite boundary (a1 for the step well, a2 for the barrier)
  double last_edge() const { return regions_.back().lo; }

  bool is_step_well() const;
  bool is_barrier() const;

  // geometry accessors valid for the two model shapes
  double well_width() const { return regions_.front().hi; } // a1
  double barrier_top() const;                               // U0
  double barrier_left() const;                              // a1
  double barrier_right() const;                             // a2

private:
  std::vector<Region> regions_;
};

// U1: zero on (0, a1), U0 beyond.
PiecewisePotential make_step_well(double U0, double a1);

// U2: zero on (0, a1), U0 on (a1, a2), zero beyond.
PiecewisePotential make_barrier(double U0, double a1, double a2);

} // namespace td

#include "potential.hpp"

#include <cmath>
#include <limits>

namespace td {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

PiecewisePotential::PiecewisePotential(std::vector<Region> regions)
    : regions_(std::move(regions)) {
  if (regions_.empty())
    throw invalid_parameter("potential needs at least one region");
  if (regions_.front().lo != 0.0)
    throw invalid_parameter("potential regions must start at x = 0");
  double prev = 0.0;
  for (const auto &r : regions_) {
    if (r.lo != prev || r.hi <= r.lo)
      throw invalid_parameter("potential regions must be contiguous with "
                              "strictly increasing boundaries");
    if (!std::isfinite(r.height) || r.height < 0.0)
      throw invalid_parameter("potential heights must be finite and >= 0");
    prev = r.hi;
  }
  if (!std::isinf(regions_.back().hi))
    throw invalid_parameter("last potential region must extend to infinity");
}

double PiecewisePotential::value(double x) const {
  if (x < 0.0)
    return inf; // hard wall
  for (const auto &r : regions_)
    if (x <= r.hi)
      return r.height;
  return regions_.back().height;
}

bool PiecewisePotential::is_step_well() const {
  return regions_.size() == 2 && regions_[0].height == 0.0 &&
         regions_[1].height > 0.0;
}

bool PiecewisePotential::is_barrier() const {
  return regions_.size() == 3 && regions_[0].height == 0.0 &&
         regions_[1].height > 0.0 && regions_[2].height == 0.0;
}

double PiecewisePotential::barrier_top() const {
  if (is_step_well() || is_barrier())
    return regions_[1].height;
  throw invalid_parameter("potential is neither a step well nor a barrier");
}

double PiecewisePotential::barrier_left() const { return regions_[0].hi; }

double PiecewisePotential::barrier_right() const {
  if (!is_barrier())
    throw invalid_parameter("barrier_right requires a barrier potential");
  return regions_[1].hi;
}

PiecewisePotential make_step_well(double U0, double a1) {
  if (!(U0 > 0.0))
    throw invalid_parameter("step well needs U0 > 0");
  if (!(a1 > 0.0))
    throw invalid_parameter("step well needs a1 > 0");
  return PiecewisePotential({{0.0, a1, 0.0}, {a1, inf, U0}});
}

PiecewisePotential make_barrier(double U0, double a1, double a2) {
  if (!(U0 > 0.0))
    throw invalid_parameter("barrier needs U0 > 0");
  if (!(a1 > 0.0))
    throw invalid_parameter("barrier needs a1 > 0");
  if (!(a2 > a1))
    throw invalid_parameter("barrier needs a2 > a1");
  return PiecewisePotential({{0.0, a1, 0.0}, {a1, a2, U0}, {a2, inf, 0.0}});
}

} // namespace td

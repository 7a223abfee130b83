#pragma once
#include <limits>
#include <vector>

#include "errors.hpp"

namespace td {

// Elementary terms a segment of a wavefunction can consist of. Exponentials
// are anchored at an origin near the segment so the stored amplitude stays
// of the same magnitude as the function values.
struct TrigTerm {
  double amp;   // a
  double omega; // > 0
  double phase; // a * sin(omega x + phase)
};

struct ExpTerm {
  double amp;
  double rate;   // a * exp(rate * (x - origin))
  double origin;
};

struct Segment {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  std::vector<TrigTerm> trig;
  std::vector<ExpTerm> expo;

  double value(double x) const;
  double slope(double x) const;
};

// Real function on [0, inf) assembled from contiguous analytic segments.
// All downstream integrals against these functions are closed-form.
class PiecewiseFunction {
public:
  PiecewiseFunction() = default;
  explicit PiecewiseFunction(std::vector<Segment> segments);

  double operator()(double x) const;
  double derivative(double x) const;

  const std::vector<Segment> &segments() const { return segments_; }

  PiecewiseFunction scaled(double factor) const;

private:
  const Segment &segment_at(double x) const;
  std::vector<Segment> segments_;
};

// Closed-form antiderivative-based integrals of term products over [lo, hi];
// hi may be +inf when the product decays (throws DivergentIntegral otherwise).
double integrate_pair(const TrigTerm &a, const TrigTerm &b, double lo,
                      double hi);
double integrate_pair(const TrigTerm &a, const ExpTerm &b, double lo,
                      double hi);
double integrate_pair(const ExpTerm &a, const ExpTerm &b, double lo,
                      double hi);

// Exact value of the L2 inner product on [0, inf).
double overlap(const PiecewiseFunction &f, const PiecewiseFunction &g);

// Exact integral of f*g*weight over [lo, hi] where weight is piecewise
// constant in the potential sense; used for restricted-range overlaps.
double overlap_on(const PiecewiseFunction &f, const PiecewiseFunction &g,
                  double lo, double hi);

} // namespace td

#include "piecewise.hpp"

#include <algorithm>
#include <cmath>

namespace td {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// int cos(w x + p) dx over [lo, hi], written as a product to stay accurate
// when w (hi - lo) is tiny.
double integral_cos(double w, double p, double lo, double hi) {
  if (w == 0.0)
    return (hi - lo) * std::cos(p);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  return 2.0 * std::cos(w * mid + p) * std::sin(w * half) / w;
}

// antiderivative of sin(w x + p) exp(b (x - x0))
double sin_exp_prim(double w, double p, double b, double x0, double x) {
  return std::exp(b * (x - x0)) *
         (b * std::sin(w * x + p) - w * std::cos(w * x + p)) /
         (b * b + w * w);
}

} // namespace

double Segment::value(double x) const {
  double v = 0.0;
  for (const auto &t : trig)
    v += t.amp * std::sin(t.omega * x + t.phase);
  for (const auto &e : expo)
    v += e.amp * std::exp(e.rate * (x - e.origin));
  return v;
}

double Segment::slope(double x) const {
  double v = 0.0;
  for (const auto &t : trig)
    v += t.amp * t.omega * std::cos(t.omega * x + t.phase);
  for (const auto &e : expo)
    v += e.amp * e.rate * std::exp(e.rate * (x - e.origin));
  return v;
}

PiecewiseFunction::PiecewiseFunction(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty())
    throw invalid_parameter("piecewise function needs at least one segment");
  if (segments_.front().lo != 0.0)
    throw invalid_parameter("piecewise function must start at x = 0");
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (segments_[i].hi != segments_[i + 1].lo)
      throw invalid_parameter("piecewise segments must be contiguous");
  }
  if (segments_.back().hi != inf)
    throw invalid_parameter("last segment must extend to infinity");
}

const Segment &PiecewiseFunction::segment_at(double x) const {
  for (const auto &s : segments_) {
    if (x <= s.hi)
      return s;
  }
  return segments_.back();
}

double PiecewiseFunction::operator()(double x) const {
  if (x < 0.0)
    throw invalid_parameter("wavefunctions live on x >= 0 (hard wall)");
  return segment_at(x).value(x);
}

double PiecewiseFunction::derivative(double x) const {
  if (x < 0.0)
    throw invalid_parameter("wavefunctions live on x >= 0 (hard wall)");
  return segment_at(x).slope(x);
}

PiecewiseFunction PiecewiseFunction::scaled(double factor) const {
  std::vector<Segment> out = segments_;
  for (auto &s : out) {
    for (auto &t : s.trig)
      t.amp *= factor;
    for (auto &e : s.expo)
      e.amp *= factor;
  }
  return PiecewiseFunction(std::move(out));
}

double integrate_pair(const TrigTerm &a, const TrigTerm &b, double lo,
                      double hi) {
  if (std::isinf(hi))
    throw Error(ErrorCode::DivergentIntegral,
                "oscillatory product does not decay on the infinite tail");
  return 0.5 * a.amp * b.amp *
         (integral_cos(a.omega - b.omega, a.phase - b.phase, lo, hi) -
          integral_cos(a.omega + b.omega, a.phase + b.phase, lo, hi));
}

double integrate_pair(const TrigTerm &a, const ExpTerm &b, double lo,
                      double hi) {
  if (std::isinf(hi)) {
    if (b.rate >= 0.0)
      throw Error(ErrorCode::DivergentIntegral,
                  "growing exponential against trig on the infinite tail");
    return a.amp * b.amp *
           (0.0 - sin_exp_prim(a.omega, a.phase, b.rate, b.origin, lo));
  }
  return a.amp * b.amp *
         (sin_exp_prim(a.omega, a.phase, b.rate, b.origin, hi) -
          sin_exp_prim(a.omega, a.phase, b.rate, b.origin, lo));
}

double integrate_pair(const ExpTerm &a, const ExpTerm &b, double lo,
                      double hi) {
  const double g = a.rate + b.rate;
  const auto expo_at = [&](double x) {
    return a.rate * (x - a.origin) + b.rate * (x - b.origin);
  };
  if (std::isinf(hi)) {
    if (g >= 0.0)
      throw Error(ErrorCode::DivergentIntegral,
                  "exponential product does not decay on the infinite tail");
    return -a.amp * b.amp * std::exp(expo_at(lo)) / g;
  }
  const double c_lo = expo_at(lo);
  // expm1 form keeps accuracy when g (hi - lo) is tiny
  if (std::abs(g * (hi - lo)) < 1e-4)
    return a.amp * b.amp * std::exp(c_lo) *
           (g == 0.0 ? (hi - lo) : std::expm1(g * (hi - lo)) / g);
  return a.amp * b.amp * (std::exp(expo_at(hi)) - std::exp(c_lo)) / g;
}

namespace {

double segment_product_integral(const Segment &sa, const Segment &sb,
                                double lo, double hi) {
  double sum = 0.0;
  for (const auto &ta : sa.trig) {
    for (const auto &tb : sb.trig)
      sum += integrate_pair(ta, tb, lo, hi);
    for (const auto &eb : sb.expo)
      sum += integrate_pair(ta, eb, lo, hi);
  }
  for (const auto &ea : sa.expo) {
    for (const auto &tb : sb.trig)
      sum += integrate_pair(tb, ea, lo, hi);
    for (const auto &eb : sb.expo)
      sum += integrate_pair(ea, eb, lo, hi);
  }
  return sum;
}

double overlap_impl(const PiecewiseFunction &f, const PiecewiseFunction &g,
                    double lo_limit, double hi_limit) {
  // merge segment boundaries into a common refinement
  std::vector<double> cuts{lo_limit};
  for (const auto &s : f.segments())
    if (s.hi > lo_limit && s.hi < hi_limit)
      cuts.push_back(s.hi);
  for (const auto &s : g.segments())
    if (s.hi > lo_limit && s.hi < hi_limit)
      cuts.push_back(s.hi);
  cuts.push_back(hi_limit);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double probe = std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi);
    const Segment *sa = nullptr;
    const Segment *sb = nullptr;
    for (const auto &s : f.segments())
      if (probe >= s.lo && probe <= s.hi) {
        sa = &s;
        break;
      }
    for (const auto &s : g.segments())
      if (probe >= s.lo && probe <= s.hi) {
        sb = &s;
        break;
      }
    if (sa == nullptr || sb == nullptr)
      throw Error(ErrorCode::Internal, "segment lookup failed in overlap");
    total += segment_product_integral(*sa, *sb, lo, hi);
  }
  return total;
}

} // namespace

double overlap(const PiecewiseFunction &f, const PiecewiseFunction &g) {
  return overlap_impl(f, g, 0.0, inf);
}

double overlap_on(const PiecewiseFunction &f, const PiecewiseFunction &g,
                  double lo, double hi) {
  if (lo < 0.0 || hi <= lo)
    throw invalid_parameter("overlap_on needs 0 <= lo < hi");
  return overlap_impl(f, g, lo, hi);
}

} // namespace td

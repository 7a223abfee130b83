#include "numeric.hpp"

#include <cassert>
#include <cmath>

namespace td {

const std::array<double, 16> GaussLegendre16::nodes = {
    -0.98940093499164994, -0.9445750230732326,  -0.86563120238783176,
    -0.755404408355003,   -0.61787624440264377, -0.45801677765722737,
    -0.28160355077925892, -0.095012509837637454, 0.095012509837637454,
    0.28160355077925892,  0.45801677765722737,  0.61787624440264377,
    0.755404408355003,    0.86563120238783176,  0.9445750230732326,
    0.98940093499164994};

const std::array<double, 16> GaussLegendre16::weights = {
    0.027152459411754037, 0.062253523938647706, 0.095158511682492591,
    0.12462897125553403,  0.14959598881657676,  0.16915651939500262,
    0.18260341504492361,  0.18945061045506859,  0.18945061045506859,
    0.18260341504492361,  0.16915651939500262,  0.14959598881657676,
    0.12462897125553403,  0.095158511682492591, 0.062253523938647706,
    0.027152459411754037};

// Trapezoid + Euler-Maclaurin boundary series through h^6, with the odd
// boundary derivatives replaced by one-sided finite differences on ten
// nodes (exact for polynomials of degree 9).
const std::array<double, 10> EndCorrectedUniform::boundary_weights = {
    0.28017962779247502, 1.6501776069223986, -0.20862874779541446,
    2.8116176146384482,  -0.99660025352733683, 2.5769276344797176,
    0.13152226631393299, 1.3170364858906525,  0.93097566688712519,
    1.0067920983980012};

std::vector<double> EndCorrectedUniform::weights(std::size_t n_points) {
  assert(n_points >= 21);
  std::vector<double> w(n_points, 1.0);
  const auto &bw = boundary_weights;
  for (std::size_t i = 0; i < bw.size(); ++i) {
    w[i] = bw[i];
    w[n_points - 1 - i] = bw[i];
  }
  return w;
}

namespace {
template <class T> T pairwise_impl(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const auto &x : v)
      s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_impl(v.first(half)) + pairwise_impl(v.subspan(half));
}
} // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_impl(v); }
complex pairwise_sum(std::span<const complex> v) { return pairwise_impl(v); }

double golden_sequence(std::size_t i) {
  constexpr double inv_phi = 0.61803398874989485;
  double v = 0.5 + static_cast<double>(i + 1) * inv_phi;
  return v - std::floor(v);
}

double quadratic_peak_offset(double y0, double y1, double y2) {
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom == 0.0)
    return 0.0;
  double off = 0.5 * (y0 - y2) / denom;
  if (off > 1.0)
    off = 1.0;
  if (off < -1.0)
    off = -1.0;
  return off;
}

} // namespace td

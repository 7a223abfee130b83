#pragma once
#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace td {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
// asymptotic amplitude sqrt(2/pi) fixing delta-function normalization
inline constexpr double delta_norm_amp = 0.79788456080286535588;

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  static const std::array<double, 16> nodes;
  static const std::array<double, 16> weights;
  // widest gap between adjacent nodes, in units of the panel width
  static constexpr double max_node_gap = 0.095012509837637454;
};

// Uniform-grid quadrature with Euler-Maclaurin end corrections (boundary
// error O(h^8); interior error cancels for smooth integrands). First/last
// ten weights deviate from 1; callers multiply by the step h themselves.
struct EndCorrectedUniform {
  static const std::array<double, 10> boundary_weights;
  // fills w[0..n] for a grid of n+1 points (n >= 20)
  static std::vector<double> weights(std::size_t n_points);
};

// Fixed-order pairwise summation (reproducible independent of threading).
double pairwise_sum(std::span<const double> v);
complex pairwise_sum(std::span<const complex> v);

// Deterministic low-discrepancy sequence used for probe points.
double golden_sequence(std::size_t i);

// Quadratic interpolation of the extremum through (x1±h, y0,y1,y2).
// Returns the abscissa offset from x1 in units of h, clamped to [-1, 1].
double quadratic_peak_offset(double y0, double y1, double y2);

} // namespace td

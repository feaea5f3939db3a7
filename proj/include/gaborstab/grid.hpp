#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gaborstab {

// Uniform grid of n_points cells on [x_min, x_max). Samples live at cell
// midpoints, so every inner product on the grid is a midpoint-rule integral.
struct GridSpec {
  double x_min = -16.0;
  double x_max = 16.0;
  std::size_t n_points = 8192;

  static GridSpec make(double x_min, double x_max, std::size_t n_points);

  double dx() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double length() const { return x_max - x_min; }
  double point(std::size_t j) const { return x_min + (static_cast<double>(j) + 0.5) * dx(); }

  // Index of the cell containing x, clamped to [0, n_points].
  std::size_t cell_floor(double x) const;
  std::size_t cell_ceil(double x) const;

  bool operator==(const GridSpec&) const = default;
};

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

// Complex samples at the midpoints of a grid.
struct SampledFunction {
  GridSpec grid;
  ComplexVec values;

  static SampledFunction zeros(const GridSpec& grid) { return {grid, ComplexVec(grid.n_points)}; }
};

double inner_norm2(const SampledFunction& f);                            // sum |f|^2 dx
Complex inner(const SampledFunction& f, const SampledFunction& g);       // sum f conj(g) dx

}  // namespace gaborstab

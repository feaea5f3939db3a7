#include "gaborstab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaborstab/error.hpp"
#include "gaborstab/quadrature.hpp"

namespace gaborstab {

GridSpec GridSpec::make(double x_min, double x_max, std::size_t n_points) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
          "grid needs finite x_min < x_max");
  require(n_points >= 2 && (n_points & (n_points - 1)) == 0,
          "grid point count must be a power of two >= 2");
  return {x_min, x_max, n_points};
}

std::size_t GridSpec::cell_floor(double x) const {
  const double r = std::floor((x - x_min) / dx());
  return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n_points)));
}

std::size_t GridSpec::cell_ceil(double x) const {
  const double r = std::ceil((x - x_min) / dx());
  return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n_points)));
}

double inner_norm2(const SampledFunction& f) {
  quad::CompensatedSum s;
  for (const auto& v : f.values) s.add(std::norm(v));
  return s.value() * f.grid.dx();
}

Complex inner(const SampledFunction& f, const SampledFunction& g) {
  require(f.grid == g.grid, "inner product of functions on different grids");
  quad::CompensatedSum re, im;
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    const Complex p = f.values[j] * std::conj(g.values[j]);
    re.add(p.real());
    im.add(p.imag());
  }
  return Complex(re.value(), im.value()) * f.grid.dx();
}

}  // namespace gaborstab

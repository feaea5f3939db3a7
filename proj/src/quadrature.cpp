#include "gaborstab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaborstab/error.hpp"

namespace gaborstab::quad {

namespace {

std::vector<double> cut_points(double lo, double hi, std::span<const double> knots) {
  std::vector<double> pts{lo};
  for (double k : knots)
    if (k > lo && k < hi) pts.push_back(k);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

constexpr double kInvPhi = 0.6180339887498949;

Extremum golden(const RealFn& f, double lo, double hi, bool maximize) {
  const double sgn = maximize ? -1.0 : 1.0;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = sgn * f(c), fd = sgn * f(d);
  for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = sgn * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = sgn * f(d);
    }
  }
  const double x = fc < fd ? c : d;
  return {x, f(x)};
}

}  // namespace

double midpoint(const RealFn& f, double lo, double hi, std::span<const double> knots, double step) {
  require(step > 0.0, "quadrature step must be positive");
  if (!(hi > lo)) return 0.0;
  const auto pts = cut_points(lo, hi, knots);
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double u = pts[i], v = pts[i + 1];
    const auto cells = static_cast<long>(std::ceil((v - u) / step - 1e-9));
    const long n = std::max(1L, cells);
    const double h = (v - u) / static_cast<double>(n);
    CompensatedSum piece;
    for (long j = 0; j < n; ++j) piece.add(f(u + (static_cast<double>(j) + 0.5) * h));
    total.add(piece.value() * h);
  }
  return total.value();
}

Integral converged_midpoint(const RealFn& f, double lo, double hi, std::span<const double> knots,
                            double step, double rel_tol, int max_levels) {
  double coarse = midpoint(f, lo, hi, knots, step);
  for (int level = 0; level < max_levels; ++level) {
    step *= 0.5;
    const double fine = midpoint(f, lo, hi, knots, step);
    const double scale = std::max(std::abs(fine), 1e-14);
    const double change = std::abs(fine - coarse) / scale;
    if (change < rel_tol || std::abs(fine - coarse) < 1e-15) return {fine, step, change};
    coarse = fine;
  }
  std::ostringstream os;
  os << "midpoint quadrature on [" << lo << ", " << hi << "] did not settle to " << rel_tol
     << " within " << max_levels << " refinements";
  fail_convergence(os.str());
}

Extrema piecewise_extrema(const RealFn& f, double lo, double hi, std::vector<double> breaks,
                          int samples_per_piece) {
  require(hi > lo, "extremum search needs a nonempty interval");
  require(samples_per_piece >= 2, "extremum search needs at least two samples per piece");
  const auto pts = cut_points(lo, hi, breaks);

  Extrema out;
  out.min.value = std::numeric_limits<double>::infinity();
  out.max.value = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double u = pts[i], v = pts[i + 1];
    const double nudge = 1e-12 * std::max({1.0, std::abs(u), std::abs(v)});
    if (v - u <= 4.0 * nudge) continue;
    const double h = (v - u) / samples_per_piece;
    auto at = [&](int j) {
      if (j <= 0) return u + nudge;
      if (j >= samples_per_piece) return v - nudge;
      return u + j * h;
    };
    int jmin = 0, jmax = 0;
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= samples_per_piece; ++j) {
      const double val = f(at(j));
      if (val < vmin) vmin = val, jmin = j;
      if (val > vmax) vmax = val, jmax = j;
    }
    auto polish = [&](int j, bool maximize, double best) -> Extremum {
      const double a = at(std::max(0, j - 1));
      const double b = at(std::min(samples_per_piece, j + 1));
      Extremum e = golden(f, a, b, maximize);
      if (maximize ? e.value < best : e.value > best) return {at(j), best};
      return e;
    };
    const Extremum pmin = polish(jmin, false, vmin);
    const Extremum pmax = polish(jmax, true, vmax);
    if (pmin.value < out.min.value) out.min = pmin;
    if (pmax.value > out.max.value) out.max = pmax;
  }
  return out;
}

}  // namespace gaborstab::quad

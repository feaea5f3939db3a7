#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace gaborstab::quad {

inline constexpr double kDefaultStep = 1.0 / 4096.0;  // 2^-12
inline constexpr double kRefineTol = 1e-6;

using RealFn = std::function<double(double)>;

// Composite midpoint rule on [lo, hi]. The interval is first split at every
// knot falling inside it, so integrands that are smooth between knots keep
// their O(step^2) accuracy. Each piece gets ceil(len / step) cells.
double midpoint(const RealFn& f, double lo, double hi, std::span<const double> knots, double step);

struct Integral {
  double value = 0.0;
  double step = 0.0;        // finest step used
  double rel_change = 0.0;  // |I(step) - I(2 step)| / max(|I(step)|, floor)
};

// Midpoint rule with a refinement check: the step is halved until two
// consecutive levels agree to `rel_tol`, at most `max_levels` halvings.
// Throws ErrorKind::convergence when the budget runs out.
Integral converged_midpoint(const RealFn& f, double lo, double hi, std::span<const double> knots,
                            double step = kDefaultStep, double rel_tol = kRefineTol,
                            int max_levels = 6);

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

struct Extrema {
  Extremum min;
  Extremum max;
};

// Essential inf / sup of a piecewise-continuous f over [lo, hi).
//
// The interval is cut at `breaks` (points where f may jump); every piece is
// sampled on `samples_per_piece` + 1 points with the endpoints pulled inside
// the piece by a relative 1e-12, so isolated values at jump points never
// count. The best sample of each piece is then polished by golden-section
// search on its neighbouring cells.
Extrema piecewise_extrema(const RealFn& f, double lo, double hi, std::vector<double> breaks,
                          int samples_per_piece);

// Sum of a range with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace gaborstab::quad

#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gaborstab/grid.hpp"

namespace gaborstab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

enum class WindowKind {
  rect,                // indicator of the closed interval [-1/2, 1/2]
  bspline,             // p-fold self-convolution of rect, support [-p/2, p/2]
  sinc,                // M sinc(M x); Fourier transform is the indicator of (-M/2, M/2)
  bspline_derivative,  // derivative of bspline(p), p >= 2
  sinc_derivative,     // derivative of M sinc(M x)
  sampled,             // uniform samples, linear interpolation, hard zero outside
};

const char* to_string(WindowKind kind);

// A real-valued window function. Analytic kinds are evaluated in closed form;
// sampled windows carry their own node grid. Copies are cheap: sample data is
// shared and immutable.
class Window {
 public:
  static Window rect();
  static Window bspline(int order);
  static Window sinc(int band = 1);
  static Window sampled(double x0, double dx, std::vector<double> values,
                        std::optional<int> band_limit = std::nullopt);

  WindowKind kind() const { return kind_; }
  // B-spline order p for bspline kinds, band M for sinc kinds, 0 otherwise.
  int param() const { return param_; }

  std::optional<Interval> support() const;
  // Support length c; +inf for unbounded windows.
  double support_length() const;
  bool compact() const { return support().has_value(); }

  // Declared M with supp(h^) inside (-M/2, M/2).
  std::optional<int> band_limit() const { return band_; }
  Window with_band_limit(int band) const;

  double operator()(double x) const;

  // h^(s) = int h(t) e^{+2 pi i s t} dt. Exact for every kind (for sampled
  // windows: exact transform of the piecewise-linear interpolant).
  std::complex<double> fourier(double s) const;

  // Points where h (resp. h^) may fail to be smooth. Quadrature and
  // extremum searches split their domains here.
  std::vector<double> knots() const;
  std::vector<double> fourier_knots() const;

  // Derivative as a window. Errors for windows with jumps (rect, sampled
  // windows with nonzero edge samples), where h' is not a function.
  Window derivative() const;

  // Node data of a sampled window.
  double sample_x0() const;
  double sample_dx() const;
  const std::vector<double>& sample_values() const;

  std::string describe() const;

 private:
  Window(WindowKind kind, int param) : kind_(kind), param_(param) {}

  struct Samples {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> values;
  };

  WindowKind kind_;
  int param_ = 0;
  std::optional<int> band_;
  std::shared_ptr<const Samples> samples_;
};

struct WindowFunctionals {
  double l1 = 0.0;
  double l2 = 0.0;
  double sup_ft = 0.0;
  double support_len = 0.0;
};

// Sampled Fourier transform on the FFT frequency lattice of a grid, in
// ascending frequency order.
struct Spectrum {
  std::vector<double> freqs;
  std::vector<std::complex<double>> values;
  double df = 0.0;
};

// Decay of the Fourier transform: |h^(s)| <= K |s|^{-e} for s != 0, or, when
// band > 0, h^ vanishes outside [-band/2, band/2].
struct FourierEnvelope {
  double K = 0.0;
  double e = 0.0;
  double band = 0.0;
};

FourierEnvelope fourier_envelope(const Window& w);

// Closed-form B-spline B_p (p-fold convolution of rect), p >= 1.
double bspline_value(int order, double x);

double eval_window(const Window& w, double x);

// m(t) = ||h - h(. - t)||_2.
double shift_diff_norm(const Window& w, double t);

// p-fold self-convolution as a sampled window on a 2^-12 node grid.
Window iterate_convolution(const Window& w, int p);

WindowFunctionals window_functionals(const Window& w, const GridSpec& grid);

// sum_m ess-sup of |g| on the half-open cell [m - 1/2, m + 1/2).
double wiener_amalgam_norm(const Window& g);

Spectrum fourier_transform(const Window& w, const GridSpec& grid);

// CSV with header `x,value` and uniform, strictly increasing x.
Window load_window_csv(const std::filesystem::path& path);
void save_window_csv(const Window& w, const std::filesystem::path& path);

}  // namespace gaborstab

#include "gaborstab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gaborstab/error.hpp"
#include "gaborstab/quadrature.hpp"

namespace gaborstab {

namespace {

using std::numbers::pi;

constexpr double kRel = 1e-12;
constexpr int kSamplesPerPiece = 256;

bool leq(double x, double y) { return x <= y * (1.0 + kRel); }

// Pointwise bound on sum_{|k| > T} |h^(x + k b)|^r for x in [0, b).
class TailBound {
 public:
  TailBound(const Window& w, double b, int T, double r) : b_(b), T_(T) {
    const auto env = fourier_envelope(w);
    if (env.band > 0.0) {
      if (!(b * T > 0.5 * env.band))
        fail("truncation too small: |k| <= trunc must cover the band of h^");
      return;
    }
    q_ = env.e * r;
    if (!(q_ > 1.0)) {
      std::ostringstream os;
      os << "tail not convergent: |h^|^" << r << " decays like |s|^-" << q_ << " for " << w.describe();
      fail_convergence(os.str());
    }
    scale_ = std::pow(env.K, r) * std::pow(b, -q_) / (q_ - 1.0);
  }

  double operator()(double x) const {
    if (scale_ == 0.0) return 0.0;
    const double u = x / b_;
    return scale_ * (std::pow(T_ + u, 1.0 - q_) + std::pow(T_ - u, 1.0 - q_));
  }

 private:
  double b_;
  double T_;
  double q_ = 0.0;
  double scale_ = 0.0;
};

double periodized(const Window& w, double b, int T, double r, double x) {
  quad::CompensatedSum s;
  for (int k = -T; k <= T; ++k) {
    const double v = std::abs(w.fourier(x + k * b));
    if (v != 0.0) s.add(r == 2.0 ? v * v : std::pow(v, r));
  }
  return s.value();
}

std::vector<double> breaks_mod(const std::vector<double>& knots, double period) {
  std::vector<double> out;
  for (double k : knots) {
    double r = std::fmod(k, period);
    if (r < 0.0) r += period;
    if (r > 0.0 && r < period) out.push_back(r);
  }
  return out;
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::painless: return "painless";
    case Provenance::fourier_side: return "fourier-side";
    case Provenance::rect_special: return "rect-special";
    case Provenance::rescaled: return "rescaled";
    case Provenance::bspline_recursion: return "bspline-recursion";
    case Provenance::empirical: return "empirical";
    case Provenance::certified_perturbed: return "certified-perturbed";
  }
  return "unknown";
}

const char* to_string(NhConvention c) { return c == NhConvention::proof ? "proof" : "lemma"; }

FrameBounds make_bounds(double A, double B, Provenance provenance, bool optimal) {
  require(std::isfinite(A) && std::isfinite(B), "frame bounds must be finite");
  require(A > 0.0, "lower frame bound must be positive");
  require(A <= B, "lower frame bound exceeds upper frame bound");
  return {A, B, provenance, optimal};
}

FrameBounds painless_bounds(const Window& w, double a, double b) {
  require(a > 0.0 && b > 0.0, "painless_bounds: a and b must be positive");
  const auto s = w.support();
  if (!s) fail("painless regime violated: window has unbounded support");
  const double c = s->length();
  if (!leq(a, c) || !leq(c, 1.0 / b)) {
    std::ostringstream os;
    os << "painless regime violated: need a <= c <= 1/b (a=" << a << ", c=" << c << ", 1/b=" << 1.0 / b << ")";
    fail(os.str());
  }

  auto cover = [&](double x) {
    const auto k_lo = static_cast<long>(std::ceil((x - s->hi) / a));
    const auto k_hi = static_cast<long>(std::floor((x - s->lo) / a));
    quad::CompensatedSum sum;
    for (long k = k_lo; k <= k_hi; ++k) {
      const double v = w(x - a * static_cast<double>(k));
      sum.add(v * v);
    }
    return sum.value();
  };
  const auto ext = quad::piecewise_extrema(cover, 0.0, a, breaks_mod(w.knots(), a), kSamplesPerPiece);
  if (!(ext.min.value > 1e-14 * ext.max.value)) fail("not a frame (covering fails)");
  return make_bounds(ext.min.value / b, ext.max.value / b, Provenance::painless, true);
}

bool fourier_side_exact(const Window& w, double a) {
  const auto band = w.band_limit();
  return band && leq(static_cast<double>(*band), 1.0 / a);
}

FrameBounds fourier_side_bounds(const Window& w, double a, double b, int trunc) {
  require(a > 0.0 && b > 0.0, "fourier_side_bounds: a and b must be positive");
  require(trunc >= 1, "fourier_side_bounds: truncation must be >= 1");
  const TailBound tail(w, b, trunc, 2.0);
  const auto breaks = breaks_mod(w.fourier_knots(), b);
  auto lower = [&](double x) { return periodized(w, b, trunc, 2.0, x); };
  auto upper = [&](double x) { return periodized(w, b, trunc, 2.0, x) + tail(x); };
  const double inf = quad::piecewise_extrema(lower, 0.0, b, breaks, kSamplesPerPiece).min.value;
  const double sup = quad::piecewise_extrema(upper, 0.0, b, breaks, kSamplesPerPiece).max.value;
  if (!(inf > 1e-14 * sup)) fail("not a frame (periodized |h^|^2 vanishes)");
  return make_bounds(inf / a, sup / a, Provenance::fourier_side, fourier_side_exact(w, a));
}

FrameBounds rect_bounds(double a, double b) {
  require(a > 0.0 && b > 0.0, "rect_bounds: a and b must be positive");
  if (!leq(a, 1.0)) fail("rect_bounds: a > 1 violates the rect support condition");
  if (!leq(a * b, 1.0)) fail("necessary density condition violated: a*b > 1");
  // Every point is covered by floor(1/a) or ceil(1/a) translates.
  const double cover = std::ceil(1.0 / a - kRel);
  return make_bounds(1.0 / b, cover / b, Provenance::rect_special, false);
}

FrameBounds rescale_bounds(const FrameBounds& bounds, double a) {
  require(std::isfinite(a) && a > 0.0, "rescale_bounds: a must be positive");
  return {bounds.A / a, bounds.B / a, Provenance::rescaled, bounds.optimal};
}

double NhValue::proof_value() const {
  return convention == NhConvention::proof ? value : std::pow(value, 0.75);
}

NhValue compute_N_h(const Window& w, double b, int trunc, NhConvention convention) {
  require(b > 0.0 && std::isfinite(b), "compute_N_h: b must be positive");
  require(trunc >= 1, "compute_N_h: truncation must be >= 1");
  constexpr double r = 4.0 / 3.0;
  const TailBound tail(w, b, trunc, r);
  auto f = [&](double x) { return periodized(w, b, trunc, r, x) + tail(x); };
  const auto ext = quad::piecewise_extrema(f, 0.0, b, breaks_mod(w.fourier_knots(), b), kSamplesPerPiece);

  NhValue out;
  out.b = b;
  out.convention = convention;
  out.truncation = trunc;
  out.argmax = ext.max.x;
  out.tail_bound = tail(ext.max.x);
  out.value = convention == NhConvention::proof ? std::pow(ext.max.value, 0.75) : ext.max.value;
  return out;
}

FrameBounds bspline_bound_recursion(double A, double B, double a, double b, double c, const NhValue& Nh,
                                    int p) {
  require(p >= 1, "bspline_bound_recursion: p must be >= 1");
  require(A > 0.0 && A <= B && std::isfinite(B), "bspline_bound_recursion: need 0 < A <= B");
  require(a > 0.0 && b > 0.0 && c > 0.0, "bspline_bound_recursion: a, b, c must be positive");
  require(Nh.value > 0.0, "bspline_bound_recursion: N(h) must be positive");
  require(std::abs(Nh.b - b) <= kRel * b, "bspline_bound_recursion: N(h) was computed for a different b");
  if (!leq(a, c) || !leq(c, 1.0 / b)) {
    std::ostringstream os;
    os << "bspline regime violated: need p a <= p c <= p/b (p=" << p << ", a=" << a << ", c=" << c
       << ", b=" << b << ")";
    fail(os.str());
  }

  const double N = Nh.proof_value();
  double Ap = a * A;
  for (int q = 1; q < p; ++q) Ap = std::pow(std::pow(Ap, 1.0 / q) / N, 2.0 * (q + 1));
  return {Ap / a, std::pow(a, p - 1) * std::pow(B, p), Provenance::bspline_recursion, false};
}

}  // namespace gaborstab

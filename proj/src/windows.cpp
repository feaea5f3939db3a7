#include "gaborstab/windows.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaborstab/error.hpp"
#include "gaborstab/fft.hpp"
#include "gaborstab/quadrature.hpp"

namespace gaborstab {

namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxOrder = 16;

double sinc(double u) {
  if (u == 0.0) return 1.0;
  const double x = pi * u;
  return std::sin(x) / x;
}

double sinc_slope(double u) {
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return -(pi * pi * u / 3.0) * (1.0 - pi * pi * u2 / 10.0);
  }
  const double x = pi * u;
  return (x * std::cos(x) - std::sin(x)) / (pi * u * u);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Indicator of (-M/2, M/2) with the midpoint value at the two jumps.
double band_indicator(int band, double s) {
  const double half = 0.5 * band;
  const double a = std::abs(s);
  if (a < half) return 1.0;
  if (a == half) return 0.5;
  return 0.0;
}

std::vector<double> sample_nodes(const Window& w, double lo, double hi, double step, double* x0) {
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> v(n + 1);
  for (std::size_t j = 0; j <= n; ++j) v[j] = w(lo + static_cast<double>(j) * step);
  *x0 = lo;
  return v;
}

}  // namespace

const char* to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::rect: return "rect";
    case WindowKind::bspline: return "bspline";
    case WindowKind::sinc: return "sinc";
    case WindowKind::bspline_derivative: return "bspline_derivative";
    case WindowKind::sinc_derivative: return "sinc_derivative";
    case WindowKind::sampled: return "sampled";
  }
  return "unknown";
}

double bspline_value(int order, double x) {
  require(order >= 1 && order <= kMaxOrder, "bspline order must be in [1, 16]");
  if (order == 1) return std::abs(x) <= 0.5 ? 1.0 : 0.0;
  const double half = 0.5 * order;
  x = -std::abs(x);  // symmetric; evaluating on the left keeps the truncated-power sum short
  if (x <= -half) return 0.0;
  double sum = 0.0;
  for (int j = 0; j <= order; ++j) {
    const double u = x + half - j;
    if (u <= 0.0) break;
    const double term = binomial(order, j) * std::pow(u, order - 1);
    sum += (j % 2 == 0) ? term : -term;
  }
  return std::max(0.0, sum / factorial(order - 1));
}

Window Window::rect() { return Window(WindowKind::rect, 1); }

Window Window::bspline(int order) {
  require(order >= 1 && order <= kMaxOrder, "bspline order must be in [1, 16]");
  if (order == 1) return rect();
  return Window(WindowKind::bspline, order);
}

Window Window::sinc(int band) {
  require(band >= 1, "sinc band M must be a positive integer");
  Window w(WindowKind::sinc, band);
  w.band_ = band;
  return w;
}

Window Window::sampled(double x0, double dx, std::vector<double> values,
                       std::optional<int> band_limit) {
  require(std::isfinite(x0) && std::isfinite(dx) && dx > 0.0, "sampled window needs dx > 0");
  require(values.size() >= 2, "sampled window needs at least two samples");
  for (double v : values) require(std::isfinite(v), "sampled window values must be finite");
  if (band_limit) require(*band_limit >= 1, "band limit M must be a positive integer");
  Window w(WindowKind::sampled, 0);
  w.samples_ = std::make_shared<const Samples>(Samples{x0, dx, std::move(values)});
  w.band_ = band_limit;
  return w;
}

Window Window::with_band_limit(int band) const {
  require(band >= 1, "band limit M must be a positive integer");
  Window w = *this;
  w.band_ = band;
  return w;
}

std::optional<Interval> Window::support() const {
  switch (kind_) {
    case WindowKind::rect: return Interval{-0.5, 0.5};
    case WindowKind::bspline:
    case WindowKind::bspline_derivative: return Interval{-0.5 * param_, 0.5 * param_};
    case WindowKind::sampled: {
      const auto& s = *samples_;
      return Interval{s.x0, s.x0 + s.dx * static_cast<double>(s.values.size() - 1)};
    }
    case WindowKind::sinc:
    case WindowKind::sinc_derivative: return std::nullopt;
  }
  return std::nullopt;
}

double Window::support_length() const {
  const auto s = support();
  return s ? s->length() : kInf;
}

double Window::operator()(double x) const {
  switch (kind_) {
    case WindowKind::rect: return bspline_value(1, x);
    case WindowKind::bspline: return bspline_value(param_, x);
    case WindowKind::sinc: return param_ * gaborstab::sinc(param_ * x);
    case WindowKind::bspline_derivative:
      return bspline_value(param_ - 1, x + 0.5) - bspline_value(param_ - 1, x - 0.5);
    case WindowKind::sinc_derivative: return param_ * param_ * sinc_slope(param_ * x);
    case WindowKind::sampled: {
      const auto& s = *samples_;
      const std::size_t n = s.values.size();
      const double u = (x - s.x0) / s.dx;
      if (!(u >= 0.0) || u > static_cast<double>(n - 1)) return 0.0;
      auto j = static_cast<std::size_t>(u);
      if (j >= n - 1) j = n - 2;
      const double t = u - static_cast<double>(j);
      return (1.0 - t) * s.values[j] + t * s.values[j + 1];
    }
  }
  return 0.0;
}

std::complex<double> Window::fourier(double s) const {
  using C = std::complex<double>;
  const C slope(0.0, -2.0 * pi * s);
  switch (kind_) {
    case WindowKind::rect: return gaborstab::sinc(s);
    case WindowKind::bspline: return std::pow(gaborstab::sinc(s), param_);
    case WindowKind::sinc: return band_indicator(param_, s);
    case WindowKind::bspline_derivative: return slope * std::pow(gaborstab::sinc(s), param_);
    case WindowKind::sinc_derivative: return slope * band_indicator(param_, s);
    case WindowKind::sampled: {
      const auto& smp = *samples_;
      quad::CompensatedSum re, im;
      for (std::size_t j = 0; j < smp.values.size(); ++j) {
        const double phase = 2.0 * pi * s * (smp.x0 + static_cast<double>(j) * smp.dx);
        re.add(smp.values[j] * std::cos(phase));
        im.add(smp.values[j] * std::sin(phase));
      }
      const double hat = smp.dx * std::pow(gaborstab::sinc(smp.dx * s), 2);
      return C(re.value(), im.value()) * hat;
    }
  }
  return 0.0;
}

std::vector<double> Window::knots() const {
  switch (kind_) {
    case WindowKind::rect: return {-0.5, 0.5};
    case WindowKind::bspline:
    case WindowKind::bspline_derivative: {
      std::vector<double> k;
      for (int j = 0; j <= param_; ++j) k.push_back(-0.5 * param_ + j);
      return k;
    }
    case WindowKind::sampled: {
      const auto s = *support();
      return {s.lo, s.hi};
    }
    case WindowKind::sinc:
    case WindowKind::sinc_derivative: return {};
  }
  return {};
}

std::vector<double> Window::fourier_knots() const {
  if (kind_ == WindowKind::sinc || kind_ == WindowKind::sinc_derivative)
    return {-0.5 * param_, 0.5 * param_};
  return {};
}

Window Window::derivative() const {
  switch (kind_) {
    case WindowKind::rect:
      fail("rect has jumps: its derivative is not a function");
    case WindowKind::bspline: return Window(WindowKind::bspline_derivative, param_);
    case WindowKind::sinc: {
      Window w(WindowKind::sinc_derivative, param_);
      w.band_ = band_;
      return w;
    }
    case WindowKind::bspline_derivative:
    case WindowKind::sinc_derivative: fail("only first derivatives are supported");
    case WindowKind::sampled: {
      const auto& s = *samples_;
      const auto& v = s.values;
      double peak = 0.0;
      for (double x : v) peak = std::max(peak, std::abs(x));
      if (std::abs(v.front()) > 1e-12 * peak || std::abs(v.back()) > 1e-12 * peak)
        fail("sampled window jumps at its support edge: its derivative is not a function");
      const std::size_t n = v.size();
      std::vector<double> d(n);
      d[0] = (v[1] - v[0]) / s.dx;
      d[n - 1] = (v[n - 1] - v[n - 2]) / s.dx;
      for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * s.dx);
      return sampled(s.x0, s.dx, std::move(d), band_);
    }
  }
  fail("unknown window kind");
}

double Window::sample_x0() const {
  require(kind_ == WindowKind::sampled, "not a sampled window");
  return samples_->x0;
}

double Window::sample_dx() const {
  require(kind_ == WindowKind::sampled, "not a sampled window");
  return samples_->dx;
}

const std::vector<double>& Window::sample_values() const {
  require(kind_ == WindowKind::sampled, "not a sampled window");
  return samples_->values;
}

std::string Window::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case WindowKind::rect: os << "rect"; break;
    case WindowKind::bspline: os << "bspline(" << param_ << ")"; break;
    case WindowKind::sinc: os << "sinc(" << param_ << ")"; break;
    case WindowKind::bspline_derivative: os << "bspline'(" << param_ << ")"; break;
    case WindowKind::sinc_derivative: os << "sinc'(" << param_ << ")"; break;
    case WindowKind::sampled:
      os.precision(17);
      os << "sampled(n=" << samples_->values.size() << ",x0=" << samples_->x0
         << ",dx=" << samples_->dx << ")";
      break;
  }
  if (band_ && kind_ == WindowKind::sampled) os << "[M=" << *band_ << "]";
  return os.str();
}

double eval_window(const Window& w, double x) { return w(x); }

FourierEnvelope fourier_envelope(const Window& w) {
  switch (w.kind()) {
    case WindowKind::rect:
    case WindowKind::bspline: return {std::pow(pi, -w.param()), static_cast<double>(w.param()), 0.0};
    case WindowKind::bspline_derivative:
      return {2.0 * std::pow(pi, 1 - w.param()), static_cast<double>(w.param() - 1), 0.0};
    case WindowKind::sinc:
    case WindowKind::sinc_derivative: return {0.0, 0.0, static_cast<double>(w.param())};
    case WindowKind::sampled: {
      // |dx sinc^2(dx s) sum_j v_j e^{...}| <= sum_j |v_j| / (pi^2 dx s^2)
      double l1 = 0.0;
      for (double v : w.sample_values()) l1 += std::abs(v);
      return {l1 / (pi * pi * w.sample_dx()), 2.0, 0.0};
    }
  }
  return {};
}

double shift_diff_norm(const Window& w, double t) {
  require(std::isfinite(t), "shift must be finite");
  switch (w.kind()) {
    case WindowKind::rect: return std::sqrt(2.0 * std::min(std::abs(t), 1.0));
    case WindowKind::bspline: {
      // autocorrelation of B_p is B_2p, so m(t)^2 = 2 (B_2p(0) - B_2p(t))
      const int q = 2 * w.param();
      return std::sqrt(std::max(0.0, 2.0 * (bspline_value(q, 0.0) - bspline_value(q, t))));
    }
    case WindowKind::sinc: {
      const int m = w.param();
      return std::sqrt(std::max(0.0, 2.0 * m * (1.0 - sinc(m * t))));
    }
    case WindowKind::sinc_derivative: {
      // Plancherel: m(t)^2 = int |h^(s)|^2 2 (1 - cos(2 pi s t)) ds over the band
      const double half = 0.5 * w.param();
      auto f = [&](double s) { return std::norm(w.fourier(s)) * 2.0 * (1.0 - std::cos(2 * pi * s * t)); };
      return std::sqrt(quad::converged_midpoint(f, -half, half, {}).value);
    }
    case WindowKind::bspline_derivative:
    case WindowKind::sampled: {
      const auto s = *w.support();
      auto knots = w.knots();
      const auto base = knots.size();
      for (std::size_t i = 0; i < base; ++i) knots.push_back(knots[i] + t);
      auto f = [&](double x) {
        const double d = w(x) - w(x - t);
        return d * d;
      };
      const double lo = s.lo + std::min(0.0, t), hi = s.hi + std::max(0.0, t);
      return std::sqrt(std::max(0.0, quad::converged_midpoint(f, lo, hi, knots).value));
    }
  }
  return 0.0;
}

Window iterate_convolution(const Window& w, int p) {
  require(p >= 1, "convolution power p must be >= 1");
  if (!w.compact()) fail("convolution requires compact support");
  if (p == 1) return w;

  constexpr double step = quad::kDefaultStep;
  if (w.kind() == WindowKind::rect || w.kind() == WindowKind::bspline) {
    const int order = w.param() * p;
    require(order <= kMaxOrder, "bspline order of the convolution exceeds 16");
    const Window target = Window::bspline(order);
    double x0 = 0.0;
    auto v = sample_nodes(target, -0.5 * order, 0.5 * order, step, &x0);
    return Window::sampled(x0, step, std::move(v), w.band_limit());
  }

  double x0 = 0.0, dx = step;
  std::vector<double> base;
  if (w.kind() == WindowKind::sampled) {
    x0 = w.sample_x0();
    dx = w.sample_dx();
    base = w.sample_values();
  } else {
    const auto s = *w.support();
    base = sample_nodes(w, s.lo, s.hi, step, &x0);
  }
  // trapezoid weights on the first factor
  std::vector<double> weighted = base;
  weighted.front() *= 0.5;
  weighted.back() *= 0.5;

  std::vector<double> acc = base;
  double acc_x0 = x0;
  for (int i = 1; i < p; ++i) {
    acc = fft::convolve(weighted, acc);
    for (double& v : acc) v *= dx;
    acc_x0 += x0;
  }
  return Window::sampled(acc_x0, dx, std::move(acc), w.band_limit());
}

WindowFunctionals window_functionals(const Window& w, const GridSpec& grid) {
  WindowFunctionals out;
  out.support_len = w.support_length();
  switch (w.kind()) {
    case WindowKind::rect:
      out.l1 = out.l2 = out.sup_ft = 1.0;
      return out;
    case WindowKind::sinc:
      out.l1 = kInf;
      out.l2 = std::sqrt(static_cast<double>(w.param()));
      out.sup_ft = 1.0;
      return out;
    case WindowKind::sinc_derivative: {
      const double m = w.param();
      out.l1 = kInf;
      out.l2 = std::sqrt(pi * pi * m * m * m / 3.0);
      out.sup_ft = pi * m;
      return out;
    }
    default: break;
  }

  const auto s = *w.support();
  const auto knots = w.knots();
  out.l1 = quad::converged_midpoint([&](double x) { return std::abs(w(x)); }, s.lo, s.hi, knots).value;
  out.l2 = std::sqrt(quad::converged_midpoint([&](double x) { double v = w(x); return v * v; },
                                              s.lo, s.hi, knots).value);
  if (w.kind() == WindowKind::bspline) {
    out.sup_ft = 1.0;  // nonnegative window: |h^| peaks at 0 with value int h = 1
  } else {
    const auto spec = fourier_transform(w, grid);
    for (const auto& v : spec.values) out.sup_ft = std::max(out.sup_ft, std::abs(v));
  }
  return out;
}

double wiener_amalgam_norm(const Window& g) {
  constexpr int per_cell = 4096;
  auto cell_sup = [&](long m) {
    double best = 0.0;
    const double start = static_cast<double>(m) - 0.5;
    for (int j = 0; j < per_cell; ++j)
      best = std::max(best, std::abs(g(start + static_cast<double>(j) / per_cell)));
    return best;
  };

  if (const auto s = g.support()) {
    const auto m_lo = static_cast<long>(std::floor(s->lo + 0.5));
    const auto m_hi = static_cast<long>(std::floor(s->hi + 0.5));
    quad::CompensatedSum total;
    for (long m = m_lo; m <= m_hi; ++m) total.add(cell_sup(m));
    return total.value();
  }

  // Unbounded support: walk outward until eight consecutive cells on each
  // side are negligible against the running sum.
  constexpr long budget = 2048;
  constexpr int quiet_needed = 8;
  quad::CompensatedSum total;
  total.add(cell_sup(0));
  for (int dir : {-1, 1}) {
    int quiet = 0;
    long m = 0;
    while (quiet < quiet_needed) {
      m += dir;
      if (std::abs(m) > budget)
        fail_convergence("Wiener amalgam norm: tail does not decay within 2048 cells (divergent)");
      const double c = cell_sup(m);
      total.add(c);
      quiet = (c <= 1e-12 * total.value()) ? quiet + 1 : 0;
    }
  }
  return total.value();
}

Spectrum fourier_transform(const Window& w, const GridSpec& grid) {
  const auto s = w.support();
  if (!s) fail("fourier_transform needs a window with finite L1 norm (compact support)");
  require(s->lo >= grid.x_min && s->hi <= grid.x_max,
          "fourier_transform: window support does not fit inside the grid");

  // Exact transform on the lattice df = 1/L: with the support inside the
  // grid, sum_k |h^(k df)|^2 df = ||h||^2 up to the band beyond Nyquist.
  const std::size_t n = grid.n_points;
  Spectrum out;
  out.df = 1.0 / grid.length();
  out.freqs.resize(n);
  out.values.resize(n);
  const auto half = static_cast<long>(n / 2);
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double freq = static_cast<double>(i - half) * out.df;
    out.freqs[static_cast<std::size_t>(i)] = freq;
    out.values[static_cast<std::size_t>(i)] = w.fourier(freq);
  }
  return out;
}

Window load_window_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open window file " + path.string());
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  auto parse = [&](const std::string& tok, std::size_t line) {
    const std::string t = trim(tok);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(line) + ": bad number '" + t + "'");
    return v;
  };

  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,value")
    throw Error(ErrorKind::io, path.string() + ": expected header 'x,value'");
  std::vector<double> xs, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": expected 'x,value'");
    xs.push_back(parse(line.substr(0, comma), lineno));
    vs.push_back(parse(line.substr(comma + 1), lineno));
  }
  if (xs.size() < 2) throw Error(ErrorKind::io, path.string() + ": need at least two samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    const double step = xs[j + 1] - xs[j];
    if (!(step > 0.0))
      throw Error(ErrorKind::io, path.string() + ": x must be strictly increasing");
    const double scale = std::max({dx, std::abs(xs[j]), std::abs(xs[j + 1])});
    if (std::abs(step - dx) > 1e-12 * scale)
      throw Error(ErrorKind::io, path.string() + ": x grid is not uniform");
  }
  return Window::sampled(xs.front(), dx, std::move(vs));
}

void save_window_csv(const Window& w, const std::filesystem::path& path) {
  require(w.kind() == WindowKind::sampled, "only sampled windows can be saved");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.precision(17);
  out << "x,value\n";
  const auto& v = w.sample_values();
  for (std::size_t j = 0; j < v.size(); ++j)
    out << w.sample_x0() + static_cast<double>(j) * w.sample_dx() << ',' << v[j] << '\n';
}

}  // namespace gaborstab

#include "gaborstab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/polygamma.hpp>

#include "gaborstab/error.hpp"
#include "gaborstab/fft.hpp"
#include "gaborstab/quadrature.hpp"

namespace gaborstab {

namespace {

using std::numbers::pi;

constexpr double kIntTol = 1e-9;

bool near_integer(double v, long* out = nullptr) {
  const double r = std::round(v);
  if (std::abs(v - r) > kIntTol * std::max(1.0, std::abs(v))) return false;
  if (out) *out = static_cast<long>(r);
  return true;
}

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

// Index range [first, last] of the nonzero samples, if any.
std::optional<std::pair<long, long>> nonzero_range(const SampledFunction& f) {
  long first = -1, last = -1;
  for (std::size_t j = 0; j < f.values.size(); ++j)
    if (f.values[j] != Complex(0.0, 0.0)) {
      if (first < 0) first = static_cast<long>(j);
      last = static_cast<long>(j);
    }
  if (first < 0) return std::nullopt;
  return std::make_pair(first, last);
}

long shift_index(const GridSpec& grid, double t) {
  long s = 0;
  if (!near_integer(t / grid.dx(), &s)) {
    std::ostringstream os;
    os << "STFT shift t = " << t << " is not a multiple of the grid step " << grid.dx();
    fail(os.str());
  }
  return s;
}

// u_j = f_j conj(g_{j - s}), zero where g is off the grid.
ComplexVec windowed(const SampledFunction& f, const SampledFunction& g, long s) {
  const std::size_t n = f.values.size();
  ComplexVec u(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long i = static_cast<long>(j) - s;
    if (i >= 0 && i < static_cast<long>(n)) u[j] = f.values[j] * std::conj(g.values[static_cast<std::size_t>(i)]);
  }
  return u;
}

// The atom family in either domain: phase * e^{2 pi i mu x} phi(x - p).
struct Family {
  std::function<Complex(double)> phi;
  Interval support;
  Domain domain;
};

Family time_family(const Window& w) {
  const auto s = w.support();
  if (!s) fail("time-domain discretization requires a compactly supported window; use the frequency domain");
  return {[w](double x) { return Complex(w(x), 0.0); }, *s, Domain::time};
}

Family frequency_family(const Window& w) {
  const auto env = fourier_envelope(w);
  if (!(env.band > 0.0)) fail("frequency-domain discretization requires a band-limited window");
  const double half = 0.5 * env.band;
  return {[w](double s) { return w.fourier(s); }, Interval{-half, half}, Domain::frequency};
}

DiscretizedSystem discretize_family(const Family& fam, const Window& w, const GaborLattice& lattice,
                                    const JitterPattern& pattern, const GridSpec& grid, OverflowPolicy overflow) {
  require(lattice.a > 0.0 && lattice.b > 0.0, "lattice steps must be positive");
  require(lattice.n_range.size() > 0 && lattice.k_range.size() > 0, "lattice ranges must be nonempty");
  const double dx = grid.dx();
  const double nyquist = 0.5 / dx * (1.0 + 1e-12);

  DiscretizedSystem sys;
  sys.grid = grid;
  sys.lattice = lattice;
  sys.domain = fam.domain;
  sys.window = w;
  sys.pattern_digest = pattern.digest();
  const auto P = static_cast<long>(grid.n_points);

  for (int k = lattice.k_range.lo; k <= lattice.k_range.hi; ++k) {
    bool uniform = true;
    const double d0 = pattern(lattice.n_range.lo, k);
    for (int n = lattice.n_range.lo; n <= lattice.n_range.hi; ++n) {
      const double delta = pattern(n, k);
      if (delta != d0) uniform = false;
      const double tau = lattice.a * (k + delta);
      double p, mu;
      Complex phase(1.0, 0.0);
      if (fam.domain == Domain::time) {
        p = tau;
        mu = lattice.b * n;
      } else {
        p = -lattice.b * n;
        mu = tau;
        phase = std::polar(1.0, 2.0 * pi * tau * lattice.b * n);
      }
      if (std::abs(mu) > nyquist) {
        std::ostringstream os;
        os << "atom (n=" << n << ", k=" << k << ") modulation " << mu << " exceeds the grid Nyquist frequency "
           << 0.5 / dx;
        fail(os.str());
      }
      const double lo = p + fam.support.lo, hi = p + fam.support.hi;
      const double slack = 1e-12 * std::max(1.0, grid.length());
      const bool inside = lo >= grid.x_min - slack && hi <= grid.x_max + slack;
      if (!inside && overflow == OverflowPolicy::reject) {
        std::ostringstream os;
        os << "support overflow: atom (n=" << n << ", k=" << k << ") occupies [" << lo << ", " << hi
           << "], outside the grid [" << grid.x_min << ", " << grid.x_max << "]";
        fail(os.str());
      }
      const long j_lo = std::max(0L, static_cast<long>(std::floor((lo - grid.x_min) / dx - 0.5)));
      const long j_hi = std::min(P - 1, static_cast<long>(std::ceil((hi - grid.x_min) / dx - 0.5)));
      if (j_lo > j_hi) {
        ++sys.dropped;
        continue;
      }
      if (!inside) ++sys.clipped;

      SampledAtom atom{n, k, delta, static_cast<std::size_t>(j_lo), {}};
      atom.values.resize(static_cast<std::size_t>(j_hi - j_lo + 1));
      for (long j = j_lo; j <= j_hi; ++j) {
        const double x = grid.point(static_cast<std::size_t>(j));
        const Complex v = fam.phi(x - p);
        atom.values[static_cast<std::size_t>(j - j_lo)] =
            v == Complex(0.0, 0.0) ? v : phase * std::polar(1.0, 2.0 * pi * mu * x) * v;
      }
      sys.atoms.push_back(std::move(atom));
    }
    if (uniform) sys.uniform_columns[k] = d0;
  }
  return sys;
}

bool fft_eligible(const DiscretizedSystem& sys, int k, long* bins_per_unit) {
  if (sys.domain != Domain::time || !sys.uniform_columns.count(k)) return false;
  return near_integer(sys.lattice.b * sys.grid.length(), bins_per_unit);
}

void apply_column_fft(const DiscretizedSystem& sys, int k, long bL, const std::vector<const SampledAtom*>& column,
                      const SampledFunction& f, ComplexVec& out) {
  const auto& grid = sys.grid;
  const std::size_t P = grid.n_points;
  const double dx = grid.dx();
  const double tau = sys.lattice.a * (k + sys.uniform_columns.at(k));
  const auto s = *sys.window.support();
  const long j_lo = std::max(0L, static_cast<long>(std::floor((tau + s.lo - grid.x_min) / dx - 0.5)));
  const long j_hi =
      std::min(static_cast<long>(P) - 1, static_cast<long>(std::ceil((tau + s.hi - grid.x_min) / dx - 0.5)));
  if (j_lo > j_hi) return;

  std::vector<double> h(static_cast<std::size_t>(j_hi - j_lo + 1));
  ComplexVec u(P);
  for (long j = j_lo; j <= j_hi; ++j) {
    const double v = sys.window(grid.point(static_cast<std::size_t>(j)) - tau);
    h[static_cast<std::size_t>(j - j_lo)] = v;
    u[static_cast<std::size_t>(j)] = f.values[static_cast<std::size_t>(j)] * v;
  }
  fft::forward(u);
  ComplexVec acc(P);
  for (const auto* atom : column) {
    const std::size_t bin = wrap(static_cast<long>(atom->n) * bL, P);
    acc[bin] += dx * u[bin];
  }
  fft::backward(acc);
  for (long j = j_lo; j <= j_hi; ++j)
    out[static_cast<std::size_t>(j)] += h[static_cast<std::size_t>(j - j_lo)] * acc[static_cast<std::size_t>(j)];
}

void apply_atom(const SampledAtom& atom, const SampledFunction& f, double dx, ComplexVec& out) {
  Complex c(0.0, 0.0);
  for (std::size_t i = 0; i < atom.values.size(); ++i) c += f.values[atom.offset + i] * std::conj(atom.values[i]);
  c *= dx;
  for (std::size_t i = 0; i < atom.values.size(); ++i) out[atom.offset + i] += c * atom.values[i];
}

struct Roles {
  double pos_lo, pos_hi;  // extent of atom centres
  double mod_reach;       // largest symmetric modulation covered
  double c;               // support length of the sampled profile
  double pos_step;        // spacing of atom centres
  double mod_step;        // spacing of modulations
};

Roles roles(const DiscretizedSystem& sys) {
  const auto& L = sys.lattice;
  if (sys.domain == Domain::time) {
    return {L.a * L.k_range.lo, L.a * L.k_range.hi,
            L.b * std::min(-L.n_range.lo, L.n_range.hi), sys.window.support_length(), L.a, L.b};
  }
  return {-L.b * L.n_range.hi, -L.b * L.n_range.lo, L.a * std::min(-L.k_range.lo, L.k_range.hi),
          fourier_envelope(sys.window).band, L.b, L.a};
}

struct Basis {
  std::size_t offset = 0;
  Eigen::MatrixXcd Q;  // rows offset.., dx-orthonormal columns
};

Basis make_basis(const GridSpec& grid, double center, double T, double F) {
  require(T > 0.0 && F >= 0.0, "test subspace needs half_width > 0 and max_freq >= 0");
  const double lo = center - T, hi = center + T;
  require(lo >= grid.x_min && hi <= grid.x_max, "test subspace does not fit inside the grid");
  const double dx = grid.dx();
  const auto r0 = static_cast<std::size_t>(std::max(0.0, std::ceil((lo - grid.x_min) / dx - 0.5)));
  auto r1 = static_cast<std::size_t>(std::max(0.0, std::floor((hi - grid.x_min) / dx - 0.5)));
  r1 = std::min(r1, grid.n_points - 1);
  const std::size_t rows = r1 + 1 - r0;
  const long J = static_cast<long>(std::floor(2.0 * T * F + 1e-9));
  const auto d = static_cast<std::size_t>(2 * J + 1);
  require(d <= rows, "test subspace dimension exceeds the number of grid points it covers");

  Eigen::MatrixXcd phi(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows; ++r) {
    const double x = grid.point(r0 + r);
    const double taper = std::sin(pi * (x - lo) / (2.0 * T));
    for (long j = -J; j <= J; ++j)
      phi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j + J)) =
          std::polar(taper, 2.0 * pi * static_cast<double>(j) * x / (2.0 * T));
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(phi);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 1e-10 * diag.maxCoeff())) fail("test subspace basis is numerically rank deficient");
  Basis out;
  out.offset = r0;
  out.Q = qr.householderQ() * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  out.Q /= std::sqrt(dx);
  return out;
}

SampledFunction expand(const GridSpec& grid, const Basis& basis, const Eigen::VectorXcd& v) {
  auto f = SampledFunction::zeros(grid);
  const Eigen::VectorXcd x = basis.Q * v;
  for (Eigen::Index r = 0; r < x.size(); ++r) f.values[basis.offset + static_cast<std::size_t>(r)] = x(r);
  return f;
}

}  // namespace

const char* to_string(Domain d) { return d == Domain::time ? "time" : "frequency"; }

DiscretizedSystem discretize(const Window& w, const GaborLattice& lattice, const JitterPattern& pattern,
                             const GridSpec& grid, OverflowPolicy overflow) {
  return discretize_family(time_family(w), w, lattice, pattern, grid, overflow);
}

DiscretizedSystem discretize_fourier(const Window& w, const GaborLattice& lattice, const JitterPattern& pattern,
                                     const GridSpec& grid, OverflowPolicy overflow) {
  return discretize_family(frequency_family(w), w, lattice, pattern, grid, overflow);
}

SampledFunction frame_operator_apply(const DiscretizedSystem& sys, const SampledFunction& f, ApplyMethod method) {
  if (!(f.grid == sys.grid) || f.values.size() != sys.grid.n_points)
    fail("frame_operator_apply: function grid does not match the system grid");
  auto out = SampledFunction::zeros(sys.grid);
  const double dx = sys.grid.dx();

  std::size_t i = 0;
  while (i < sys.atoms.size()) {
    const int k = sys.atoms[i].k;
    std::vector<const SampledAtom*> column;
    for (; i < sys.atoms.size() && sys.atoms[i].k == k; ++i) column.push_back(&sys.atoms[i]);

    long bL = 0;
    const bool eligible = fft_eligible(sys, k, &bL);
    if (method == ApplyMethod::fft && !eligible)
      fail("frame_operator_apply: column k=" + std::to_string(k) + " is not FFT-eligible");
    const bool use_fft = method == ApplyMethod::fft || (method == ApplyMethod::automatic && eligible && column.size() >= 32);
    if (use_fft) {
      apply_column_fft(sys, k, bL, column, f, out.values);
    } else {
      for (const auto* atom : column) apply_atom(*atom, f, dx, out.values);
    }
  }
  return out;
}

Eigen::MatrixXcd test_subspace_basis(const GridSpec& grid, double center, double half_width, double max_freq) {
  const auto basis = make_basis(grid, center, half_width, max_freq);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(grid.n_points), basis.Q.cols());
  full.middleRows(static_cast<Eigen::Index>(basis.offset), basis.Q.rows()) = basis.Q;
  return full;
}

namespace {

// Energy of a test function with spectrum in [-F, F] (2F < 1/a) missed by
// the modulations outside the n-range, relative to its norm:
//   (1/a) sum_{n outside} sup_{|s| <= F} |h^(s - b n)|^2,
// with the decay envelope |h^(s)| <= K |s|^{-e} and an integral tail.
// NaN where the estimate does not apply.
// Bound on what the excluded modulations remove from <Sf, f> for unit f with
// spectrum in [-F, F]. Cauchy-Schwarz over the aliases s + j/a gives, per n,
// J sup_{|t|<=F} |g^(t - bn)|^2 with J = floor(2Fa) + 1 aliases in the band.
double n_truncation_loss(const DiscretizedSystem& sys, double F) {
  if (sys.domain != Domain::time) return std::numeric_limits<double>::quiet_NaN();
  const auto& L = sys.lattice;
  const double J = std::floor(2.0 * F * L.a) + 1.0;
  const auto env = fourier_envelope(sys.window);
  double total = 0.0;
  for (int N : {L.n_range.hi, -L.n_range.lo}) {
    const double u = L.b * (N + 1) - F;  // nearest distance of an excluded band to the spectrum
    if (env.band > 0.0 && u >= 0.5 * env.band) continue;
    if (!(u > 0.0) || !(env.e > 0.5)) return std::numeric_limits<double>::quiet_NaN();
    const double q = 2.0 * env.e;
    total += env.K * env.K * (std::pow(u, -q) + std::pow(u, 1.0 - q) / (L.b * (q - 1.0)));
  }
  return J * total / L.a;
}

// Widest band, up to a quarter of the modulation reach, whose certified
// truncation loss stays below kLossTarget; otherwise the alias-free band.
constexpr double kLossTarget = 1e-3;

double default_band(const DiscretizedSystem& sys, double mod_reach, double pos_step, double T) {
  const double wide = 0.25 * mod_reach;
  const double safe = std::min(wide, 0.25 / pos_step);
  for (double F = wide; F > safe; F *= 0.5) {
    const double loss = n_truncation_loss(sys, F + 0.25 / T);
    if (loss <= kLossTarget) return F;
  }
  return safe;
}

}  // namespace

EmpiricalBounds empirical_frame_bounds(const DiscretizedSystem& sys, const TestSubspaceSpec& spec) {
  const auto& grid = sys.grid;
  const auto R = roles(sys);
  const double center = spec.center_set ? spec.center : 0.5 * (grid.x_min + grid.x_max);
  const double reach = std::min(R.pos_hi - center, center - R.pos_lo) - 2.0 * R.c;
  const double T = spec.half_width > 0.0 ? spec.half_width : std::min(reach, 0.25 * grid.length());
  const double F = spec.max_freq > 0.0 ? spec.max_freq : default_band(sys, R.mod_reach, R.pos_step, T);

  const double tol = 1e-12 * std::max(1.0, grid.length());
  if (!(T > 0.0) || T > reach + tol || 2.0 * F > R.mod_reach + tol) {
    std::ostringstream os;
    os << "interior condition violated: need coverage >= T + 2c on both sides of the centre and modulation reach"
       << " >= 2F (T=" << T << ", c=" << R.c << ", centre coverage=[" << R.pos_lo << ", " << R.pos_hi
       << "], F=" << F << ", reach=" << R.mod_reach << ")";
    fail(os.str());
  }

  const auto basis = make_basis(grid, center, T, F);
  const double dx = grid.dx();
  const auto rows = static_cast<std::size_t>(basis.Q.rows());
  const std::size_t r0 = basis.offset, r1 = basis.offset + rows;

  std::vector<const SampledAtom*> touching;
  for (const auto& atom : sys.atoms)
    if (atom.offset < r1 && atom.offset + atom.values.size() > r0) touching.push_back(&atom);

  Eigen::MatrixXcd C(static_cast<Eigen::Index>(touching.size()), basis.Q.cols());
  for (std::size_t i = 0; i < touching.size(); ++i) {
    const auto& atom = *touching[i];
    const std::size_t lo = std::max(atom.offset, r0), hi = std::min(atom.offset + atom.values.size(), r1);
    const Eigen::Map<const Eigen::VectorXcd> seg(atom.values.data() + (lo - atom.offset),
                                                 static_cast<Eigen::Index>(hi - lo));
    C.row(static_cast<Eigen::Index>(i)) =
        dx * (seg.adjoint() * basis.Q.middleRows(static_cast<Eigen::Index>(lo - r0), static_cast<Eigen::Index>(hi - lo)));
  }
  const Eigen::MatrixXcd M = C.adjoint() * C;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M);
  if (eig.info() != Eigen::Success) fail_convergence("empirical_frame_bounds: eigensolver failed");

  EmpiricalBounds out;
  const auto d = eig.eigenvalues().size();
  out.lambda_min = std::max(0.0, eig.eigenvalues()(0));
  out.lambda_max = eig.eigenvalues()(d - 1);
  out.iters = 0;
  out.grid = grid;
  out.n_range = sys.lattice.n_range;
  out.k_range = sys.lattice.k_range;
  out.center = center;
  out.half_width = T;
  out.max_freq = F;
  out.dimension = static_cast<std::size_t>(d);
  out.clipped = sys.clipped;
  out.dropped = sys.dropped;
  out.loss_bound = n_truncation_loss(sys, F + 0.25 / T);  // the taper widens the band by 1/(4T)

  for (Eigen::Index idx : {Eigen::Index(0), d - 1}) {
    const double lambda = eig.eigenvalues()(idx);
    const auto f = expand(grid, basis, eig.eigenvectors().col(idx));
    const auto Sf = frame_operator_apply(sys, f);
    const Eigen::Map<const Eigen::VectorXcd> Sf_v(Sf.values.data() + r0, static_cast<Eigen::Index>(rows));
    const Eigen::VectorXcd coeff = dx * (basis.Q.adjoint() * Sf_v);
    const Eigen::VectorXcd r = coeff - lambda * eig.eigenvectors().col(idx);
    out.residuals.push_back(r.norm() / eig.eigenvectors().col(idx).norm());
  }
  return out;
}

Stft stft(const SampledFunction& f, const SampledFunction& g, const std::vector<double>& t) {
  require(f.grid == g.grid, "stft: f and g must share a grid");
  const auto& grid = f.grid;
  const std::size_t P = grid.n_points;
  const double dx = grid.dx();
  const double df = 1.0 / grid.length();
  const double x0 = grid.point(0);
  const auto half = static_cast<long>(P / 2);

  Stft out;
  out.t = t;
  out.xi.resize(P);
  for (std::size_t m = 0; m < P; ++m) out.xi[m] = static_cast<double>(static_cast<long>(m) - half) * df;
  out.values.resize(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(P));
  for (std::size_t r = 0; r < t.size(); ++r) {
    auto u = windowed(f, g, shift_index(grid, t[r]));
    fft::forward(u);
    for (std::size_t m = 0; m < P; ++m) {
      const double xi = out.xi[m];
      const std::size_t bin = wrap(static_cast<long>(m) - half, P);
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) =
          dx * std::polar(1.0, -2.0 * pi * xi * x0) * u[bin];
    }
  }
  return out;
}

Complex stft_value(const SampledFunction& f, const SampledFunction& g, double xi, double t) {
  require(f.grid == g.grid, "stft: f and g must share a grid");
  const auto u = windowed(f, g, shift_index(f.grid, t));
  quad::CompensatedSum re, im;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] == Complex(0.0, 0.0)) continue;
    const Complex v = u[j] * std::polar(1.0, -2.0 * pi * xi * f.grid.point(j));
    re.add(v.real());
    im.add(v.imag());
  }
  return Complex(re.value(), im.value()) * f.grid.dx();
}

Plancherel4Result plancherel4_check(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& g1,
                                    const SampledFunction& g2) {
  const auto& grid = f1.grid;
  require(f2.grid == grid && g1.grid == grid && g2.grid == grid, "plancherel check: all functions must share a grid");
  Plancherel4Result out{};
  out.rhs = inner(f1, f2) * inner(g2, g1);
  const double scale = std::sqrt(inner_norm2(f1) * inner_norm2(f2) * inner_norm2(g1) * inner_norm2(g2));

  const auto rf1 = nonzero_range(f1), rf2 = nonzero_range(f2), rg1 = nonzero_range(g1), rg2 = nonzero_range(g2);
  if (!rf1 || !rf2 || !rg1 || !rg2) {
    out.lhs = 0.0;
    out.residual = scale > 0.0 ? std::abs(out.rhs) / scale : std::abs(out.rhs);
    return out;
  }
  // shifts s where f_i conj(g_i(. - s)) can be nonzero for both pairs
  const long s_lo = std::max(rf1->first - rg1->second, rf2->first - rg2->second);
  const long s_hi = std::min(rf1->second - rg1->first, rf2->second - rg2->first);
  const double dx = grid.dx();
  const double dxi = 1.0 / grid.length();
  quad::CompensatedSum re, im;
  for (long s = s_lo; s <= s_hi; ++s) {
    auto u1 = windowed(f1, g1, s);
    auto u2 = windowed(f2, g2, s);
    fft::forward(u1);
    fft::forward(u2);
    for (std::size_t m = 0; m < u1.size(); ++m) {
      // the phase e^{-2 pi i xi x0} is common to both transforms and cancels
      const Complex v = (dx * u1[m]) * std::conj(dx * u2[m]);
      re.add(v.real());
      im.add(v.imag());
    }
  }
  out.lhs = Complex(re.value(), im.value()) * dxi * dx;
  out.residual = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : std::abs(out.lhs - out.rhs);
  return out;
}

PlancherelResult plancherel_check(const SampledFunction& f, const SampledFunction& g) {
  const auto r = plancherel4_check(f, f, g, g);
  PlancherelResult out;
  out.energy = r.lhs.real();
  out.expected = inner_norm2(f) * inner_norm2(g);
  out.residual = out.expected > 0.0 ? std::abs(out.energy - out.expected) / out.expected : std::abs(out.energy);
  return out;
}

PoissonCheck poisson_sum_check(const Window& g, double P, const std::vector<double>& y, int trunc) {
  require(std::isfinite(P) && P > 0.0, "poisson_sum_check: P must be positive");
  require(trunc >= 1, "poisson_sum_check: truncation must be >= 1");
  const auto supp = g.support();
  if (!supp) fail("poisson_sum_check: the autocorrelation side needs a compactly supported g");
  const double c = supp->length();

  // A(tau) = int g(s) g(s - tau) ds
  const bool spline = g.kind() == WindowKind::rect || g.kind() == WindowKind::bspline;
  auto autocorr = [&](double tau) {
    if (spline) return bspline_value(2 * g.param(), tau);
    const double lo = std::max(supp->lo, supp->lo + tau), hi = std::min(supp->hi, supp->hi + tau);
    if (!(hi > lo)) return 0.0;
    auto knots = g.knots();
    const auto base = knots.size();
    for (std::size_t i = 0; i < base; ++i) knots.push_back(knots[i] + tau);
    return quad::converged_midpoint([&](double s) { return g(s) * g(s - tau); }, lo, hi, knots).value;
  };
  const double norm2 = autocorr(0.0);
  const long kmax = static_cast<long>(std::ceil(c * P));
  std::vector<double> A(static_cast<std::size_t>(kmax + 1));
  for (long k = 0; k <= kmax; ++k) A[static_cast<std::size_t>(k)] = autocorr(static_cast<double>(k) / P);

  long q = 0;
  const bool exact = spline && near_integer(1.0 / P, &q) && q >= 1;
  const auto env = fourier_envelope(g);

  PoissonCheck out;
  out.tail_exact = exact;
  out.truncation = trunc;
  for (double yv : y) {
    require(std::isfinite(yv) && std::abs(yv) < 0.5 * trunc * P, "poisson_sum_check: |y| too large for the truncation");
    PoissonRow row;
    row.y = yv;
    quad::CompensatedSum lhs;
    if (exact) {
      // n = q m + i: sinc^{2p}(x_i + m) with x_i = y + i/q, tail by polygamma
      const int p2 = 2 * g.param();
      double fact = 1.0;
      for (int i = 2; i < p2; ++i) fact *= i;
      for (long i = 0; i < q; ++i) {
        const double x = yv + static_cast<double>(i) / static_cast<double>(q);
        for (long m = -trunc; m <= trunc; ++m) lhs.add(std::norm(g.fourier(x + static_cast<double>(m))));
        const double s = std::pow(std::sin(pi * x) / pi, p2);
        const double tail = s *
                            (boost::math::polygamma(p2 - 1, x + trunc + 1.0) +
                             boost::math::polygamma(p2 - 1, trunc + 1.0 - x)) /
                            fact;
        row.tail += tail;
        lhs.add(tail);
      }
    } else {
      for (long n = -trunc; n <= trunc; ++n) lhs.add(std::norm(g.fourier(yv + P * static_cast<double>(n))));
      if (env.band > 0.0) {
        require(P * trunc > std::abs(yv) + 0.5 * env.band, "poisson_sum_check: truncation must cover the band");
      } else {
        const double qexp = 2.0 * env.e;
        if (!(qexp > 1.0)) fail_convergence("poisson_sum_check: tail not convergent");
        const double u = std::abs(yv) / P;
        row.tail = 2.0 * env.K * env.K * std::pow(P, -qexp) * std::pow(trunc - u, 1.0 - qexp) / (qexp - 1.0);
      }
    }
    row.lhs = lhs.value();

    quad::CompensatedSum rhs;
    rhs.add(A[0]);
    for (long k = 1; k <= kmax; ++k)
      rhs.add(2.0 * std::cos(2.0 * pi * static_cast<double>(k) * yv / P) * A[static_cast<std::size_t>(k)]);
    row.rhs_general = rhs.value() / P;
    if (exact) {
      row.residual_general = std::abs(row.lhs - row.rhs_general);
    } else {
      row.residual_general = std::max(std::abs(row.lhs - row.rhs_general), std::abs(row.lhs + row.tail - row.rhs_general));
    }
    if (c <= 1.0 + 1e-12 && P <= 1.0) {
      row.rhs_unit = norm2 / P;
      row.residual_unit = exact ? std::abs(row.lhs - *row.rhs_unit)
                                : std::max(std::abs(row.lhs - *row.rhs_unit), std::abs(row.lhs + row.tail - *row.rhs_unit));
    }
    out.rows.push_back(row);
  }
  return out;
}

std::vector<SamplingRow> stft_sampling_check(const SampledFunction& f, const SampledFunction& g, double P,
                                             const std::vector<double>& t) {
  require(f.grid == g.grid, "stft_sampling_check: f and g must share a grid");
  if (!(P > 0.0 && P <= 1.0)) fail("stft_sampling_check: the sampling step must satisfy 0 < P <= 1");
  const auto& grid = f.grid;
  const double dx = grid.dx();
  if (const auto r = nonzero_range(g)) {
    const double extent = static_cast<double>(r->second - r->first + 1) * dx;
    if (extent > 1.0 + 1e-12) fail("stft_sampling_check: window support longer than 1");
  }
  long step = 0;
  if (!near_integer(P * grid.length(), &step) || step <= 0 ||
      grid.n_points % static_cast<std::size_t>(step) != 0)
    fail("stft_sampling_check: P times the grid length must be an integer dividing the number of grid points");
  const std::size_t count = grid.n_points / static_cast<std::size_t>(step);

  std::vector<SamplingRow> rows;
  for (double tv : t) {
    const long s = shift_index(grid, tv);
    auto u = windowed(f, g, s);
    quad::CompensatedSum rhs;
    for (const auto& v : u) rhs.add(std::norm(v));
    fft::forward(u);
    quad::CompensatedSum lhs;
    for (std::size_t r = 0; r < count; ++r) lhs.add(std::norm(dx * u[r * static_cast<std::size_t>(step)]));
    SamplingRow row;
    row.t = tv;
    row.lhs = lhs.value();
    row.rhs = rhs.value() * dx / P;
    row.residual = row.rhs > 0.0 ? std::abs(row.lhs - row.rhs) / row.rhs : std::abs(row.lhs);
    rows.push_back(row);
  }
  return rows;
}

PainlessCheck painless_operator_check(const Window& w, const GaborLattice& lattice,
                                      const std::map<int, double>& column_deltas, const GridSpec& grid) {
  const auto s = w.support();
  if (!s) fail("painless_operator_check: window must be compactly supported");
  const double a = lattice.a, b = lattice.b;
  require(a > 0.0 && b > 0.0, "painless_operator_check: a and b must be positive");
  if (s->length() > (1.0 / b) * (1.0 + 1e-12)) fail("painless hypothesis violated: support length c > 1/b");
  const double dx = grid.dx();
  long m = 0;
  if (!near_integer(1.0 / (b * dx), &m) || m < 1)
    fail("painless_operator_check: 1/(b dx) must be an integer (one full discrete modulation period)");

  GaborLattice full = lattice;
  full.n_range = {static_cast<int>(-m / 2), static_cast<int>(-m / 2 + m - 1)};
  JitterPattern pattern(std::numeric_limits<double>::infinity());
  double max_shift = 0.0;
  for (const auto& [k, d] : column_deltas) {
    pattern.set_column_constant(k, d);
    max_shift = std::max(max_shift, std::abs(d));
  }
  const auto sys = discretize(w, full, pattern, grid, OverflowPolicy::reject);

  std::vector<double> mult(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.point(j);
    double sum = 0.0;
    for (int k = lattice.k_range.lo; k <= lattice.k_range.hi; ++k) {
      const auto it = column_deltas.find(k);
      const double v = w(x - a * (k + (it == column_deltas.end() ? 0.0 : it->second)));
      sum += v * v;
    }
    mult[j] = sum / b;
  }

  PainlessCheck out;
  out.period = static_cast<int>(m);
  const double centre = 0.5 * (grid.x_min + grid.x_max);
  const double width = grid.length() / 8.0;
  SplitMix64 rng(0x5eed);
  for (int test = 0; test < 3; ++test) {
    auto f = SampledFunction::zeros(grid);
    for (std::size_t j = 0; j < grid.n_points; ++j) {
      const double x = (grid.point(j) - centre) / width;
      switch (test) {
        case 0: f.values[j] = std::exp(-x * x); break;
        case 1: f.values[j] = std::polar(std::exp(-x * x), 3.0 * x * x + 5.0 * x); break;
        default: f.values[j] = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5); break;
      }
    }
    const auto Sf = frame_operator_apply(sys, f, ApplyMethod::direct);
    quad::CompensatedSum diff;
    for (std::size_t j = 0; j < grid.n_points; ++j) diff.add(std::norm(Sf.values[j] - mult[j] * f.values[j]));
    const double r = std::sqrt(diff.value() * dx / inner_norm2(f));
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }

  const double lo = a * (lattice.k_range.lo + max_shift) + s->length();
  const double hi = a * (lattice.k_range.hi - max_shift) - s->length();
  out.multiplier_min = std::numeric_limits<double>::infinity();
  out.multiplier_max = 0.0;
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.point(j);
    if (x < lo || x > hi) continue;
    out.multiplier_min = std::min(out.multiplier_min, mult[j]);
    out.multiplier_max = std::max(out.multiplier_max, mult[j]);
  }
  if (!std::isfinite(out.multiplier_min)) out.multiplier_min = 0.0;
  return out;
}

}  // namespace gaborstab

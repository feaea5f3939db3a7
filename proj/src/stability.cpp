#include "gaborstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaborstab/digest.hpp"
#include "gaborstab/error.hpp"
#include "gaborstab/quadrature.hpp"

namespace gaborstab {

namespace {

using std::numbers::pi;

Digest base_digest(Theorem t, const Window& w, double a, double b, const FrameBounds& bounds,
                   const JitterPattern& pattern) {
  Digest d;
  d.add(std::string_view(to_string(t))).add(std::string_view(w.describe())).add(a).add(b);
  d.add(bounds.A).add(bounds.B).add(pattern.digest());
  return d;
}

void check_bounds(const FrameBounds& bounds) {
  require(std::isfinite(bounds.A) && std::isfinite(bounds.B) && bounds.A > 0.0 && bounds.A <= bounds.B,
          "certificate needs frame bounds with 0 < A <= B");
}

// Relative guard on the strict margin test, so that a boundary case cannot
// pass through rounding in the favourable direction.
constexpr double kMarginGuard = 1e-12;

// Sets passed / perturbed from a relative margin r: (A', B') = ((1 - r) A, (1 + r) B).
void settle(StabilityCertificate& cert, const FrameBounds& bounds, double r) {
  cert.passed = cert.margin < cert.threshold * (1.0 - kMarginGuard);
  if (cert.passed)
    cert.perturbed = FrameBounds{(1.0 - r) * bounds.A, (1.0 + r) * bounds.B, Provenance::certified_perturbed, false};
}

void check_compact_pattern(const JitterPattern& pattern) {
  for (const auto& [key, v] : pattern.entries())
    if (!(std::abs(v) < 0.5)) {
      std::ostringstream os;
      os << "jitter delta(" << key.first << "," << key.second << ") = " << v << " outside (-1/2, 1/2)";
      fail(os.str());
    }
  for (const auto& [k, v] : pattern.column_constants()) {
    if (!(std::abs(v) < 0.5)) fail("column jitter outside (-1/2, 1/2)");
    if (v != 0.0)
      fail("non-summable column: delta_{n," + std::to_string(k) + "} is constant in n, so sum_n diverges");
  }
}

// sup_k sum_n m(scale * delta_{n,k})^2.
double sup_column_energy(const Window& w, double scale, const JitterPattern& pattern) {
  std::map<int, quad::CompensatedSum> cols;
  for (const auto& [key, v] : pattern.entries()) {
    const double m = shift_diff_norm(w, scale * v);
    cols[key.second].add(m * m);
  }
  double best = 0.0;
  for (const auto& [k, s] : cols) best = std::max(best, s.value());
  return best;
}

double l1_norm(const Window& w) {
  if (w.kind() == WindowKind::rect || w.kind() == WindowKind::bspline) return 1.0;
  const auto s = w.support();
  if (!s) fail("L1 norm requires compact support");
  return quad::converged_midpoint([&](double x) { return std::abs(w(x)); }, s->lo, s->hi, w.knots()).value;
}

double sup_abs_fourier(const Window& w, int M) {
  switch (w.kind()) {
    case WindowKind::rect:
    case WindowKind::bspline:
    case WindowKind::sinc: return 1.0;
    case WindowKind::sinc_derivative: return pi * w.param();
    default: break;
  }
  auto f = [&](double s) { return std::abs(w.fourier(s)); };
  const double half = 0.5 * M;
  return quad::piecewise_extrema(f, -half, half, {}, 4096).max.value;
}

}  // namespace

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::paley_wiener: return "paley-wiener";
    case Theorem::thm1_compact: return "thm1-compact";
    case Theorem::cor_bspline: return "cor-bspline";
    case Theorem::thm_wiener_amalgam: return "thm-wiener-amalgam";
    case Theorem::thm_bandlimited: return "thm-bandlimited";
    case Theorem::cor_nsgf_overlap: return "cor-nsgf-overlap";
  }
  return "unknown";
}

Theorem theorem_from_string(const std::string& s) {
  for (auto t : {Theorem::paley_wiener, Theorem::thm1_compact, Theorem::cor_bspline, Theorem::thm_wiener_amalgam,
                 Theorem::thm_bandlimited, Theorem::cor_nsgf_overlap})
    if (s == to_string(t)) return t;
  fail("unknown theorem '" + s + "'");
}

double StabilityCertificate::extra(const std::string& key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return v;
  fail("certificate has no quantity '" + key + "'");
}

StabilityCertificate paley_wiener_certificate(double A, double B, double lambda, double mu) {
  require(std::isfinite(lambda) && std::isfinite(mu), "lambda and mu must be finite");
  require(lambda >= 0.0 && mu >= 0.0, "lambda and mu must be nonnegative");
  const FrameBounds bounds{A, B, Provenance::painless, false};
  check_bounds(bounds);
  StabilityCertificate cert;
  cert.theorem = Theorem::paley_wiener;
  cert.margin = lambda + mu / std::sqrt(A);
  cert.threshold = 1.0;
  cert.extras = {{"lambda", lambda}, {"mu", mu}};
  settle(cert, bounds, cert.margin);
  Digest d;
  d.add(std::string_view("paley-wiener")).add(A).add(B).add(lambda).add(mu);
  cert.inputs_digest = d.value();
  return cert;
}

KadecValue kadec_constant(double delta, int M) {
  require(std::isfinite(delta) && delta >= 0.0, "kadec_constant: delta must be >= 0");
  require(M >= 1, "kadec_constant: M must be a positive integer");
  const double x = pi * delta * M;
  KadecValue out;
  out.factor = 1.0 - std::cos(x) + std::sin(x);
  out.value = std::sqrt(M / (2.0 * pi)) * out.factor;
  out.guaranteed = delta < 1.0 / (4.0 * M);
  return out;
}

StabilityCertificate certify_compact_support(const Window& w, double a, double b, const FrameBounds& bounds,
                                             const JitterPattern& pattern) {
  check_bounds(bounds);
  require(a > 0.0 && b > 0.0, "certify_compact_support: a and b must be positive");
  const auto s = w.support();
  if (!s) fail("certify_compact_support: window must be compactly supported");
  if (a > s->length()) fail("certify_compact_support: a > c (lattice step exceeds the support length)");
  check_compact_pattern(pattern);

  StabilityCertificate cert;
  cert.theorem = Theorem::thm1_compact;
  cert.margin = 4.0 * sup_column_energy(w, a, pattern);
  cert.threshold = bounds.A;
  const double r = std::sqrt(cert.margin / bounds.A);
  cert.extras = {{"sqrt_lambda_over_A", r}};
  settle(cert, bounds, r);
  cert.notes = std::string("n-extent ") + to_string(pattern.n_extent());
  cert.inputs_digest = base_digest(cert.theorem, w, a, b, bounds, pattern).value();
  return cert;
}

StabilityCertificate certify_bspline(const Window& w, int p, double a, double b, const FrameBounds& bounds_p,
                                     const JitterPattern& pattern) {
  check_bounds(bounds_p);
  require(p >= 1, "certify_bspline: p must be >= 1");
  require(a > 0.0 && b > 0.0, "certify_bspline: a and b must be positive");
  const auto s = w.support();
  if (!s) fail("certify_bspline: base window must be compactly supported");
  if (a > s->length()) fail("certify_bspline: p a > p c (lattice step exceeds the support length)");
  check_compact_pattern(pattern);

  const double l1 = l1_norm(w);
  StabilityCertificate cert;
  cert.theorem = Theorem::cor_bspline;
  cert.margin = 4.0 * std::pow(l1, 2.0 * (p - 1)) * sup_column_energy(w, a * p, pattern);
  cert.threshold = bounds_p.A;
  const double r = std::sqrt(cert.margin / bounds_p.A);
  cert.extras = {{"l1_norm", l1}, {"p", static_cast<double>(p)}, {"sqrt_lambda_over_A", r}};
  settle(cert, bounds_p, r);
  cert.notes = std::string("lattice (p a, b/p); n-extent ") + to_string(pattern.n_extent());
  auto d = base_digest(cert.theorem, w, a, b, bounds_p, pattern);
  d.add(p);
  cert.inputs_digest = d.value();
  return cert;
}

StabilityCertificate certify_wiener_amalgam(const Window& w, double a, double b, const FrameBounds& bounds,
                                            const JitterPattern& pattern) {
  check_bounds(bounds);
  require(a > 0.0 && b > 0.0, "certify_wiener_amalgam: a and b must be positive");
  const double W = wiener_amalgam_norm(w.derivative());
  if (!std::isfinite(W)) fail("certify_wiener_amalgam: ||h'||_W is infinite");
  const auto marg = jitter_marginals(pattern);
  quad::CompensatedSum dsq;
  for (const auto& [k, d] : marg.d) dsq.add(d * d);
  if (!std::isfinite(dsq.value())) fail("certify_wiener_amalgam: sum_k d_k^2 is not finite");

  StabilityCertificate cert;
  cert.theorem = Theorem::thm_wiener_amalgam;
  cert.margin = W * std::sqrt(dsq.value()) / std::sqrt(a * b);
  cert.threshold = std::sqrt(bounds.A);
  const double r = cert.margin / cert.threshold;
  cert.extras = {{"amalgam_norm_derivative", W}, {"sum_d_sq", dsq.value()}};
  settle(cert, bounds, r);
  cert.inputs_digest = base_digest(cert.theorem, w, a, b, bounds, pattern).value();
  return cert;
}

StabilityCertificate certify_bandlimited(const Window& w, double a, double b, const FrameBounds& bounds,
                                         const JitterPattern& pattern) {
  check_bounds(bounds);
  require(a > 0.0 && b > 0.0, "certify_bandlimited: a and b must be positive");
  const auto band = w.band_limit();
  if (!band) fail("certify_bandlimited: window has no band_limit metadata");
  const int M = *band;
  const double limit = 1.0 / (4.0 * M);
  if (!(pattern.max_abs() < limit)) {
    std::ostringstream os;
    os << "certify_bandlimited: some |delta| = " << pattern.max_abs() << " >= 1/(4M) = " << limit;
    fail(os.str());
  }
  const auto marg = jitter_marginals(pattern);
  if (marg.D_default > 0.0) fail("certify_bandlimited: D_n does not vanish as |n| grows (sum_n diverges)");

  quad::CompensatedSum thm, lemma, plain;
  for (const auto& [n, D] : marg.D) {
    const double f2 = 1.0 - std::cos(2.0 * pi * M * D) + std::sin(2.0 * pi * M * D);
    const double f1 = 1.0 - std::cos(pi * M * D) + std::sin(pi * M * D);
    thm.add(f2 * f2);
    lemma.add(f1 * f1);
    plain.add(D * D);
  }
  const double sup_ft = sup_abs_fourier(w, M);
  const double scale = sup_ft * std::sqrt(M / (2.0 * pi));

  StabilityCertificate cert;
  cert.theorem = Theorem::thm_bandlimited;
  cert.margin = scale * std::sqrt(thm.value());
  cert.threshold = std::sqrt(bounds.A);
  const double r = cert.margin / cert.threshold;
  cert.extras = {{"sup_ft", sup_ft},
                 {"M", static_cast<double>(M)},
                 {"mu_lemma_form", scale * std::sqrt(lemma.value())},
                 {"mu_simplified", M / std::sqrt(pi) * sup_ft * std::sqrt(plain.value())}};
  settle(cert, bounds, r);
  cert.inputs_digest = base_digest(cert.theorem, w, a, b, bounds, pattern).value();
  return cert;
}

OverlapResult nsgf_overlap_check(double c, double a, const std::map<int, double>& column_deltas) {
  require(a > 0.0 && a <= c, "nsgf_overlap_check: need 0 < a <= c");
  OverlapResult out;
  out.max_step = -std::numeric_limits<double>::infinity();
  const double limit = (c - a) / a;
  for (auto it = column_deltas.begin(); it != column_deltas.end(); ++it) {
    const auto next = std::next(it);
    if (next == column_deltas.end()) break;
    require(next->first == it->first + 1, "nsgf_overlap_check: column deltas must cover a contiguous k-range");
    const double step = next->second - it->second;
    out.max_step = std::max(out.max_step, step);
    if (out.ok && step > limit) {
      out.ok = false;
      out.witness = it->first;
    }
  }
  if (column_deltas.size() < 2) out.max_step = 0.0;
  return out;
}

double nsgf_multiplier(const Window& w, double a, double b, const std::map<int, double>& column_deltas, double x) {
  const auto s = w.support();
  if (!s) fail("nsgf_multiplier: window must be compactly supported");
  quad::CompensatedSum sum;
  for (const auto& [k, d] : column_deltas) {
    const double v = w(x - a * (k + d));
    sum.add(v * v);
  }
  const auto k_lo = static_cast<long>(std::ceil((x - s->hi) / a));
  const auto k_hi = static_cast<long>(std::floor((x - s->lo) / a));
  for (long k = k_lo; k <= k_hi; ++k) {
    if (column_deltas.count(static_cast<int>(k))) continue;
    const double v = w(x - a * static_cast<double>(k));
    sum.add(v * v);
  }
  return sum.value() / b;
}

StabilityCertificate certify_nsgf_overlap(const Window& w, double a, double b,
                                          const std::map<int, double>& column_deltas) {
  const auto base = painless_bounds(w, a, b);
  const auto s = *w.support();
  const double c = s.length();
  // Columns outside the map keep delta = 0, so the steps into and out of the
  // jittered block count too.
  auto full = column_deltas;
  if (!full.empty()) {
    full.emplace(full.begin()->first - 1, 0.0);
    full.emplace(full.rbegin()->first + 1, 0.0);
  }
  const auto overlap = nsgf_overlap_check(c, a, full);

  StabilityCertificate cert;
  cert.theorem = Theorem::cor_nsgf_overlap;
  cert.margin = overlap.max_step;
  cert.threshold = (c - a) / a;
  cert.passed = overlap.ok;
  if (overlap.witness) cert.extras.push_back({"witness_k", static_cast<double>(*overlap.witness)});

  JitterPattern pattern(std::numeric_limits<double>::infinity());
  for (const auto& [k, d] : column_deltas) pattern.set_column_constant(k, d);
  cert.inputs_digest = base_digest(cert.theorem, w, a, b, base, pattern).value();
  if (!cert.passed || column_deltas.empty()) {
    if (cert.passed) cert.perturbed = FrameBounds{base.A, base.B, Provenance::certified_perturbed, true};
    return cert;
  }

  // Off the jittered columns the multiplier is the unperturbed periodic one.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> breaks;
  for (const auto& [k, d] : column_deltas) {
    const double centre = a * (k + d);
    lo = std::min(lo, centre + s.lo - a);
    hi = std::max(hi, centre + s.hi + a);
    for (double kn : w.knots()) breaks.push_back(centre + kn);
  }
  const auto k_lo = static_cast<long>(std::floor((lo - s.hi) / a)) - 1;
  const auto k_hi = static_cast<long>(std::ceil((hi - s.lo) / a)) + 1;
  for (long k = k_lo; k <= k_hi; ++k)
    if (!column_deltas.count(static_cast<int>(k)))
      for (double kn : w.knots()) breaks.push_back(a * static_cast<double>(k) + kn);
  std::erase_if(breaks, [&](double x) { return x <= lo || x >= hi; });
  std::sort(breaks.begin(), breaks.end());

  auto f = [&](double x) { return nsgf_multiplier(w, a, b, column_deltas, x); };
  const auto ext = quad::piecewise_extrema(f, lo, hi, breaks, 64);
  const double A = std::min(base.A, ext.min.value);
  const double B = std::max(base.B, ext.max.value);
  if (!(A > 1e-14 * B))
    fail("certify_nsgf_overlap: the columns touch only where the window vanishes; the multiplier has ess-inf 0");
  cert.perturbed = FrameBounds{A, B, Provenance::certified_perturbed, true};
  return cert;
}

double rect_literal_margin(double a, double A, const JitterPattern& pattern) {
  require(a > 0.0 && A > 0.0, "rect_literal_margin: a and A must be positive");
  const auto marg = jitter_marginals(pattern);
  double best = 0.0;
  for (const auto& [k, s] : marg.col_abs_sums) best = std::max(best, s);
  return 4.0 * a / A * best;
}

double prior_jitter_condition(double a, double b, const JitterPattern& pattern) {
  require(a > 0.0 && b > 0.0, "prior_jitter_condition: a and b must be positive");
  const auto marg = jitter_marginals(pattern);
  if (marg.D_default > 0.0) return std::numeric_limits<double>::infinity();
  quad::CompensatedSum sum;
  for (const auto& [n, D] : marg.D) sum.add(D);
  return 4.0 * a * b * sum.value();
}

}  // namespace gaborstab

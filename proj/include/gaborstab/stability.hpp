#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaborstab/bounds.hpp"
#include "gaborstab/gabor.hpp"
#include "gaborstab/windows.hpp"

namespace gaborstab {

enum class Theorem {
  paley_wiener,
  thm1_compact,
  cor_bspline,
  thm_wiener_amalgam,
  thm_bandlimited,
  cor_nsgf_overlap,
};

const char* to_string(Theorem t);
Theorem theorem_from_string(const std::string& s);

// Outcome of one stability test. passed iff margin < threshold; the
// perturbed bounds (A', B') are present iff passed.
struct StabilityCertificate {
  Theorem theorem = Theorem::paley_wiener;
  double margin = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::optional<FrameBounds> perturbed;
  // Secondary quantities reported alongside the margin, in insertion order.
  std::vector<std::pair<std::string, double>> extras;
  std::string notes;
  std::uint64_t inputs_digest = 0;

  double extra(const std::string& key) const;
};

// A frame with bounds (A, B) stays a frame under a perturbation with
// operator constants (lambda, mu) when lambda + mu / sqrt(A) < 1.
StabilityCertificate paley_wiener_certificate(double A, double B, double lambda, double mu);

struct KadecValue {
  double value = 0.0;   // sqrt(M / 2 pi) (1 - cos(pi delta M) + sin(pi delta M))
  double factor = 0.0;  // 1 - cos(pi delta M) + sin(pi delta M)
  bool guaranteed = true;  // delta < 1/(4M)
};

KadecValue kadec_constant(double delta, int M);

// lambda = 4 sup_k sum_n ||h - h(. - a delta_{n,k})||_2^2 against A.
StabilityCertificate certify_compact_support(const Window& w, double a, double b, const FrameBounds& bounds,
                                             const JitterPattern& pattern);

// The same test for the p-fold convolution h^(p) on the lattice (p a, b/p):
// lambda = 4 ||h||_1^{2(p-1)} sup_k sum_n ||h - h(. - a p delta_{n,k})||_2^2
// against A_p. w is the base window h; bounds_p are bounds for G(h^(p); pa, b/p).
StabilityCertificate certify_bspline(const Window& w, int p, double a, double b, const FrameBounds& bounds_p,
                                     const JitterPattern& pattern);

// lambda = (ab)^{-1/2} ||h'||_W (sum_k d_k^2)^{1/2} against sqrt(A).
StabilityCertificate certify_wiener_amalgam(const Window& w, double a, double b, const FrameBounds& bounds,
                                            const JitterPattern& pattern);

// mu = ||h^||_inf sqrt(M / 2 pi) (sum_n (1 - cos(2 pi M D_n) + sin(2 pi M D_n))^2)^{1/2}
// against sqrt(A). Extras: the same sum with argument pi M D_n, and the
// simplified quantity (M / sqrt(pi)) ||h^||_inf (sum_n D_n^2)^{1/2}.
StabilityCertificate certify_bandlimited(const Window& w, double a, double b, const FrameBounds& bounds,
                                         const JitterPattern& pattern);

struct OverlapResult {
  bool ok = true;
  std::optional<int> witness;  // first k with delta_{k+1} - delta_k > (c - a)/a
  double max_step = 0.0;       // max_k delta_{k+1} - delta_k
};

// Columns h_k = h(. - a(k + delta_k)) leave no gap iff
// delta_{k+1} - delta_k <= (c - a)/a for every consecutive pair.
OverlapResult nsgf_overlap_check(double c, double a, const std::map<int, double>& column_deltas);

// sum_k (1/b) |h(x - a(k + delta_k))|^2 with delta_k = 0 off the map.
double nsgf_multiplier(const Window& w, double a, double b, const std::map<int, double>& column_deltas,
                       double x);

// Overlap certificate: margin max_k(delta_{k+1} - delta_k) against (c - a)/a
// (non-strict), over the map plus its two unjittered neighbours. When it
// holds, (A', B') are the exact inf and sup of the frame multiplier.
// Requires the painless regime a <= c <= 1/b.
StabilityCertificate certify_nsgf_overlap(const Window& w, double a, double b,
                                          const std::map<int, double>& column_deltas);

// Margin of the rect computation written with |delta| in place of m^2:
// 4 a A^{-1} sup_k sum_n |delta_{n,k}|.
double rect_literal_margin(double a, double A, const JitterPattern& pattern);

// Earlier sufficient condition for rect: 4 a b sum_n sup_k |delta_{n,k}| < 1.
double prior_jitter_condition(double a, double b, const JitterPattern& pattern);

}  // namespace gaborstab

#pragma once

#include "gaborstab/windows.hpp"

namespace gaborstab {

enum class Provenance {
  painless,
  fourier_side,
  rect_special,
  rescaled,
  bspline_recursion,
  empirical,
  certified_perturbed,
};

const char* to_string(Provenance p);

// Frame bounds (A, B) of a Gabor system, 0 < A <= B.
struct FrameBounds {
  double A = 0.0;
  double B = 0.0;
  Provenance provenance = Provenance::painless;
  bool optimal = false;
};

// Validates 0 < A <= B and finiteness; throws otherwise.
FrameBounds make_bounds(double A, double B, Provenance provenance, bool optimal);

// Compactly supported h with a <= c <= 1/b: the frame operator is the
// multiplier sum_k |h(x - a k)|^2 / b, so A and B are its inf and sup.
FrameBounds painless_bounds(const Window& w, double a, double b);

inline constexpr int kDefaultFourierTrunc = 2000;

// A = (1/a) inf_x sum_k |h^(x - b k)|^2 and B the matching sup, over one
// period [0, b). The sum is truncated at |k| <= trunc; B carries a rigorous
// bound on the discarded tail. These are the optimal frame bounds when h^ is
// supported in an interval of length <= 1/a (the Fourier-side painless
// regime, see fourier_side_exact); elsewhere they are the formula values only
// and `optimal` is false: G(bspline(2); 1, 1) is not a frame, yet the formula
// gives A = 1/3.
FrameBounds fourier_side_bounds(const Window& w, double a, double b, int trunc = kDefaultFourierTrunc);

// True when h^ is supported in (-M/2, M/2) with M <= 1/a.
bool fourier_side_exact(const Window& w, double a);

// Guaranteed frame bounds of G(rect; a, b), a <= 1: (1/b, ceil(1/a)/b).
FrameBounds rect_bounds(double a, double b);

// G(h; a, b) with bounds (A, B) has G(h_a; 1, ab) with bounds (A/a, B/a).
FrameBounds rescale_bounds(const FrameBounds& bounds, double a);

enum class NhConvention {
  proof,  // (sup_x sum_k |h^(x + k b)|^{4/3})^{3/4}, the form the Hoelder step uses
  lemma,  // sup_x sum_k |h^(x + k b)|^{4/3}
};

const char* to_string(NhConvention c);

struct NhValue {
  double value = 0.0;
  double b = 0.0;
  NhConvention convention = NhConvention::proof;
  int truncation = 0;
  double tail_bound = 0.0;  // bound on the discarded terms at the maximizer (before the 3/4 power)
  double argmax = 0.0;

  // The value in the proof convention.
  double proof_value() const;
};

inline constexpr int kDefaultNhTrunc = 10000;

NhValue compute_N_h(const Window& w, double b, int trunc = kDefaultNhTrunc,
                    NhConvention convention = NhConvention::lemma);

// Bounds for G(h^(p); p a, b / p) from bounds (A, B) of G(h; a, b):
//   A'_1 = a A,  A'_{q+1} = ((A'_q)^{1/q} / N)^{2(q+1)},  A_p = A'_p / a,
//   B_p = a^{p-1} B^p,
// with N = N(h) in the proof convention. c is the support length of h and
// must satisfy a <= c <= 1/b.
FrameBounds bspline_bound_recursion(double A, double B, double a, double b, double c, const NhValue& Nh,
                                    int p);

}  // namespace gaborstab

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gaborstab/gabor.hpp"
#include "gaborstab/grid.hpp"
#include "gaborstab/windows.hpp"

namespace gaborstab {

// What to do with atoms whose support leaves the grid.
enum class OverflowPolicy {
  reject,  // error naming the offending (n, k)
  clip,    // keep the in-grid part; drop atoms entirely outside
};

// Which side of the Fourier transform the atoms are sampled on. Inner
// products, and therefore the frame operator spectrum, are the same.
enum class Domain {
  time,       // e^{2 pi i b n x} h(x - a(k + delta))
  frequency,  // e^{2 pi i (s + b n) a(k + delta)} h^(s + b n)
};

const char* to_string(Domain d);

struct SampledAtom {
  int n = 0;
  int k = 0;
  double delta = 0.0;
  std::size_t offset = 0;  // first grid index
  ComplexVec values;       // samples on [offset, offset + size)
};

struct DiscretizedSystem {
  GridSpec grid;
  GaborLattice lattice;
  Domain domain = Domain::time;
  Window window = Window::rect();
  std::uint64_t pattern_digest = 0;
  std::vector<SampledAtom> atoms;
  std::size_t clipped = 0;  // atoms partially outside the grid
  std::size_t dropped = 0;  // atoms entirely outside the grid
  // Columns k whose shift is the same for every n (FFT-eligible), with that delta.
  std::map<int, double> uniform_columns;
};

DiscretizedSystem discretize(const Window& w, const GaborLattice& lattice, const JitterPattern& pattern,
                             const GridSpec& grid, OverflowPolicy overflow = OverflowPolicy::reject);

// Same system sampled on the frequency side; the grid is in frequency units.
// Needs a compactly supported h^ (band-limited windows).
DiscretizedSystem discretize_fourier(const Window& w, const GaborLattice& lattice, const JitterPattern& pattern,
                                     const GridSpec& grid, OverflowPolicy overflow = OverflowPolicy::reject);

enum class ApplyMethod {
  automatic,  // FFT for eligible columns, direct sums elsewhere
  direct,
  fft,  // every column must be FFT-eligible
};

// S f = sum over atoms of <f, g> g with dx-weighted inner products.
SampledFunction frame_operator_apply(const DiscretizedSystem& sys, const SampledFunction& f,
                                     ApplyMethod method = ApplyMethod::automatic);

// Interior test subspace: span of sin(pi (x - lo) / (2T)) e^{2 pi i j x / (2T)}
// on [center - T, center + T] with |j| / (2T) <= F. Zero fields take defaults
// derived from the lattice (grid centre; largest T meeting the interior
// condition, capped at a quarter of the grid; F is the widest band up to
// b N / 4 whose certified truncation loss is at most 1e-3, else
// min(b N / 4, 1 / (4 a)); roles of a and b swap on the frequency side).
struct TestSubspaceSpec {
  double center = 0.0;
  double half_width = 0.0;
  double max_freq = 0.0;
  bool center_set = false;
};

struct EmpiricalBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iters = 0;                   // 0: dense symmetric eigensolver, no iteration
  std::vector<double> residuals;   // ||P_V S f - lambda f|| / ||f|| for the two extremal vectors
  GridSpec grid;
  IndexRange n_range;
  IndexRange k_range;
  double center = 0.0;
  double half_width = 0.0;
  double max_freq = 0.0;
  std::size_t dimension = 0;
  std::size_t clipped = 0;
  std::size_t dropped = 0;
  // Upper bound on the relative energy the n-truncation removes from
  // <S f, f> for subspace functions (time domain only; NaN where unavailable).
  double loss_bound = 0.0;
};

EmpiricalBounds empirical_frame_bounds(const DiscretizedSystem& sys, const TestSubspaceSpec& spec = {});

// Orthonormal (dx-weighted) basis of the test subspace as full-grid columns.
Eigen::MatrixXcd test_subspace_basis(const GridSpec& grid, double center, double half_width, double max_freq);

// --- STFT -------------------------------------------------------------------

// F(xi, t) = int e^{-2 pi i xi s} f(s) conj(g(s - t)) ds on the grid. Shifts t
// must be multiples of dx; xi runs over the FFT lattice of the grid in
// ascending order.
struct Stft {
  std::vector<double> t;
  std::vector<double> xi;
  Eigen::MatrixXcd values;  // rows: t, columns: xi
};

Stft stft(const SampledFunction& f, const SampledFunction& g, const std::vector<double>& t);

// Direct evaluation at an arbitrary frequency.
Complex stft_value(const SampledFunction& f, const SampledFunction& g, double xi, double t);

struct PlancherelResult {
  double energy = 0.0;    // ||F^g f||^2 over all shifts with overlap
  double expected = 0.0;  // ||f||^2 ||g||^2
  double residual = 0.0;  // relative
};

PlancherelResult plancherel_check(const SampledFunction& f, const SampledFunction& g);

struct Plancherel4Result {
  Complex lhs;       // <F^{g1} f1, F^{g2} f2>
  Complex rhs;       // <f1, f2> <g2, g1>
  double residual;   // |lhs - rhs| / (||f1|| ||f2|| ||g1|| ||g2||)
};

Plancherel4Result plancherel4_check(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& g1,
                                    const SampledFunction& g2);

// --- Poisson summation --------------------------------------------------------

struct PoissonRow {
  double y = 0.0;
  double lhs = 0.0;          // sum_n |g^(y + P n)|^2 (with tail)
  double tail = 0.0;         // tail contribution (exact or bound, see tail_exact)
  double rhs_general = 0.0;  // (1/P) sum_k e^{2 pi i k y / P} int g(s) conj(g(s - k/P)) ds
  std::optional<double> rhs_unit;  // ||g||^2 / P when supp g fits a unit interval and P <= 1
  double residual_general = 0.0;
  std::optional<double> residual_unit;
};

struct PoissonCheck {
  bool tail_exact = false;
  int truncation = 0;
  std::vector<PoissonRow> rows;
};

PoissonCheck poisson_sum_check(const Window& g, double P, const std::vector<double>& y, int trunc = 2000);

struct SamplingRow {
  double t = 0.0;
  double lhs = 0.0;  // sum_n |F^g f(P n, t)|^2
  double rhs = 0.0;  // (1/P) int |f(s)|^2 |g(s - t)|^2 ds
  double residual = 0.0;
};

// Frequency-sampled STFT energy against the windowed energy. Needs P <= 1,
// g of support length at most 1, t multiples of dx, and P times the grid
// length an integer dividing the number of grid points.
std::vector<SamplingRow> stft_sampling_check(const SampledFunction& f, const SampledFunction& g, double P,
                                             const std::vector<double>& t);

// --- painless multiplier --------------------------------------------------------

struct PainlessCheck {
  std::vector<double> residuals;  // ||S f - m f|| / ||f|| per test function
  double max_residual = 0.0;
  double multiplier_min = 0.0;    // over the fully covered interior
  double multiplier_max = 0.0;
  int period = 0;                 // number of modulations 1/(b dx)
};

// Compares the assembled frame operator of the columns h_k = h(. - a(k + delta_k)),
// k in lattice.k_range, modulated over one full discrete period of n, with
// the multiplier sum_k (1/b) |h_k|^2.
PainlessCheck painless_operator_check(const Window& w, const GaborLattice& lattice,
                                      const std::map<int, double>& column_deltas, const GridSpec& grid);

}  // namespace gaborstab

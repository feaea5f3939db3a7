#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "gaborstab/grid.hpp"
#include "gaborstab/windows.hpp"

namespace gaborstab {

// Inclusive integer interval.
struct IndexRange {
  int lo = 0;
  int hi = 0;

  std::size_t size() const { return hi < lo ? 0 : static_cast<std::size_t>(hi - lo) + 1; }
  bool contains(int i) const { return i >= lo && i <= hi; }
  bool operator==(const IndexRange&) const = default;
};

// G(h; a, b) = { e^{2 pi i b n x} h(x - a k) }, with explicit truncation of
// the frequency index n and the time index k.
struct GaborLattice {
  double a = 1.0;
  double b = 1.0;
  IndexRange n_range{-8, 8};
  IndexRange k_range{-8, 8};
};

GaborLattice make_lattice(double a, double b, IndexRange n_range, IndexRange k_range);

// How a pattern behaves in n outside its stored entries; decides whether
// sums over all n in Z are finite.
enum class NExtent {
  finite,     // zero outside stored entries
  geometric,  // geometric decay in |n|, stored until it is below double resolution
  unbounded,  // column value repeats for every n: sums over n diverge
};

const char* to_string(NExtent e);

// Timing jitter delta_{n,k}; zero (the unperturbed atom) where nothing is stored.
class JitterPattern {
 public:
  using Key = std::pair<int, int>;  // (n, k)

  JitterPattern() = default;
  explicit JitterPattern(double declared_bound) : bound_(declared_bound) {}

  void set(int n, int k, double delta);
  // delta_{n,k} = value for every n (unbounded extent).
  void set_column_constant(int k, double value);

  double operator()(int n, int k) const;

  double bound() const { return bound_; }
  NExtent n_extent() const { return extent_; }
  void set_n_extent(NExtent e) { extent_ = e; }

  const std::map<Key, double>& entries() const { return entries_; }
  const std::map<int, double>& column_constants() const { return column_constant_; }

  bool empty() const { return entries_.empty() && column_constant_.empty(); }
  // Largest |delta| actually present.
  double max_abs() const;
  std::set<int> columns() const;
  std::set<int> rows() const;

  // Every delta multiplied by s (declared bound scales with |s|).
  JitterPattern scaled(double s) const;

  std::uint64_t digest() const;

 private:
  double bound_ = 0.5;
  NExtent extent_ = NExtent::finite;
  std::map<Key, double> entries_;
  std::map<int, double> column_constant_;
};

struct JitterMarginals {
  std::map<int, double> d;              // d_k = sup_n |delta_{n,k}|
  std::map<int, double> D;              // D_n = sup_k |delta_{n,k}| over stored rows
  double D_default = 0.0;               // D_n for rows not in D (nonzero only for unbounded extent)
  std::map<int, double> col_abs_sums;   // sum_n |delta_{n,k}|; +inf when not summable in n
  bool n_summable = true;

  double d_at(int k) const;
  double D_at(int n) const;
};

JitterMarginals jitter_marginals(const JitterPattern& p);

// --- generation -----------------------------------------------------------

struct UniformRandomJitter {
  double bound = 0.1;
  std::uint64_t seed = 0;
  IndexRange n_range{0, 0};
  IndexRange k_range{0, 0};
};

// delta_{n,k} = peak * ratio^{|n|} on the listed columns, for all n.
struct GeometricJitter {
  double peak = 1.0 / 48.0;
  double ratio = 0.5;
  std::vector<int> columns{0};
};

// delta_{n,k} = d_k for every n.
struct ColumnConstantJitter {
  std::map<int, double> d;
};

// delta_{n,k} = row[n] * col[k].
struct SeparableJitter {
  std::map<int, double> row;
  std::map<int, double> col;
};

using JitterSpec = std::variant<UniformRandomJitter, GeometricJitter, ColumnConstantJitter, SeparableJitter>;

enum class JitterTarget {
  general,
  compact_support,  // destined for the compact-support certificates: |delta| < 1/2
};

JitterPattern generate_jitter(const JitterSpec& spec, JitterTarget target = JitterTarget::general);

// Reproducible 64-bit generator (splitmix64):
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
// uniform() maps the top 53 bits to [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// --- atoms ----------------------------------------------------------------

// Samples of x -> e^{2 pi i b n x} h(x - a (k + delta)) at the grid midpoints.
SampledFunction atom(const Window& w, const GaborLattice& lattice, int n, int k, double delta,
                     const GridSpec& grid);

// CSV `n,k,delta`.
JitterPattern load_jitter_csv(const std::filesystem::path& path, double declared_bound = 0.5);
void save_jitter_csv(const JitterPattern& p, const std::filesystem::path& path);

}  // namespace gaborstab

#include "gaborstab/gabor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaborstab/digest.hpp"
#include "gaborstab/error.hpp"

namespace gaborstab {

GaborLattice make_lattice(double a, double b, IndexRange n_range, IndexRange k_range) {
  require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0,
          "lattice steps a and b must be positive");
  if (a * b > 1.0) fail("necessary density condition violated: a*b > 1");
  require(n_range.size() > 0 && k_range.size() > 0, "lattice index ranges must be nonempty");
  return {a, b, n_range, k_range};
}

const char* to_string(NExtent e) {
  switch (e) {
    case NExtent::finite: return "finite";
    case NExtent::geometric: return "geometric";
    case NExtent::unbounded: return "unbounded";
  }
  return "unknown";
}

void JitterPattern::set(int n, int k, double delta) {
  require(std::isfinite(delta), "jitter values must be finite");
  if (std::abs(delta) > bound_) {
    std::ostringstream os;
    os << "jitter delta(" << n << "," << k << ") = " << delta << " exceeds declared bound " << bound_;
    fail(os.str());
  }
  if (delta == 0.0)
    entries_.erase({n, k});
  else
    entries_[{n, k}] = delta;
}

void JitterPattern::set_column_constant(int k, double value) {
  require(std::isfinite(value), "jitter values must be finite");
  require(std::abs(value) <= bound_, "column jitter exceeds declared bound");
  column_constant_[k] = value;
  extent_ = NExtent::unbounded;
}

double JitterPattern::operator()(int n, int k) const {
  if (auto it = entries_.find({n, k}); it != entries_.end()) return it->second;
  if (auto it = column_constant_.find(k); it != column_constant_.end()) return it->second;
  return 0.0;
}

double JitterPattern::max_abs() const {
  double m = 0.0;
  for (const auto& [key, v] : entries_) m = std::max(m, std::abs(v));
  for (const auto& [k, v] : column_constant_) m = std::max(m, std::abs(v));
  return m;
}

std::set<int> JitterPattern::columns() const {
  std::set<int> out;
  for (const auto& [key, v] : entries_) out.insert(key.second);
  for (const auto& [k, v] : column_constant_) out.insert(k);
  return out;
}

std::set<int> JitterPattern::rows() const {
  std::set<int> out;
  for (const auto& [key, v] : entries_) out.insert(key.first);
  return out;
}

JitterPattern JitterPattern::scaled(double s) const {
  require(std::isfinite(s), "jitter scale must be finite");
  JitterPattern out(bound_ * std::abs(s));
  out.extent_ = extent_;
  for (const auto& [key, v] : entries_)
    if (v * s != 0.0) out.entries_[key] = v * s;
  for (const auto& [k, v] : column_constant_) out.column_constant_[k] = v * s;
  return out;
}

std::uint64_t JitterPattern::digest() const {
  Digest d;
  d.add(std::string_view("jitter")).add(bound_).add(std::string_view(to_string(extent_)));
  for (const auto& [key, v] : entries_) d.add(key.first).add(key.second).add(v);
  d.add(std::string_view("columns"));
  for (const auto& [k, v] : column_constant_) d.add(k).add(v);
  return d.value();
}

double JitterMarginals::d_at(int k) const {
  auto it = d.find(k);
  return it == d.end() ? 0.0 : it->second;
}

double JitterMarginals::D_at(int n) const {
  auto it = D.find(n);
  return it == D.end() ? D_default : it->second;
}

JitterMarginals jitter_marginals(const JitterPattern& p) {
  JitterMarginals m;
  for (const auto& [key, v] : p.entries()) {
    const auto [n, k] = key;
    const double a = std::abs(v);
    m.d[k] = std::max(m.d[k], a);
    m.D[n] = std::max(m.D[n], a);
    m.col_abs_sums[k] += a;
  }
  for (const auto& [k, v] : p.column_constants()) {
    const double a = std::abs(v);
    m.d[k] = std::max(m.d[k], a);
    m.D_default = std::max(m.D_default, a);
    if (a > 0.0) {
      m.col_abs_sums[k] = std::numeric_limits<double>::infinity();
      m.n_summable = false;
    } else {
      m.col_abs_sums.try_emplace(k, 0.0);
    }
  }
  for (auto& [n, v] : m.D) v = std::max(v, m.D_default);
  return m;
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void check_target(double bound, JitterTarget target) {
  require(std::isfinite(bound) && bound >= 0.0, "jitter amplitude must be finite and >= 0");
  if (target == JitterTarget::compact_support && bound >= 0.5)
    fail("jitter bound must be < 1/2 for compact-support certificates");
}

JitterPattern make(const UniformRandomJitter& s, JitterTarget target) {
  check_target(s.bound, target);
  require(s.n_range.size() > 0 && s.k_range.size() > 0, "uniform jitter needs nonempty ranges");
  JitterPattern p(s.bound);
  SplitMix64 rng(s.seed);
  for (int k = s.k_range.lo; k <= s.k_range.hi; ++k)
    for (int n = s.n_range.lo; n <= s.n_range.hi; ++n)
      p.set(n, k, s.bound * (2.0 * rng.uniform() - 1.0));
  return p;
}

JitterPattern make(const GeometricJitter& s, JitterTarget target) {
  check_target(s.peak, target);
  require(s.ratio >= 0.0 && s.ratio < 1.0, "geometric jitter ratio must be in [0, 1)");
  int reach = 0;
  if (s.ratio > 0.0)
    reach = std::min(4096, static_cast<int>(std::ceil(std::log(1e-17) / std::log(s.ratio))));
  JitterPattern p(s.peak);
  p.set_n_extent(NExtent::geometric);
  for (int k : s.columns)
    for (int n = -reach; n <= reach; ++n) p.set(n, k, s.peak * std::pow(s.ratio, std::abs(n)));
  return p;
}

JitterPattern make(const ColumnConstantJitter& s, JitterTarget target) {
  double bound = 0.0;
  for (const auto& [k, v] : s.d) bound = std::max(bound, std::abs(v));
  check_target(bound, target);
  JitterPattern p(bound);
  for (const auto& [k, v] : s.d) p.set_column_constant(k, v);
  p.set_n_extent(NExtent::unbounded);
  return p;
}

JitterPattern make(const SeparableJitter& s, JitterTarget target) {
  double bound = 0.0;
  for (const auto& [n, r] : s.row)
    for (const auto& [k, c] : s.col) bound = std::max(bound, std::abs(r * c));
  check_target(bound, target);
  JitterPattern p(bound);
  for (const auto& [n, r] : s.row)
    for (const auto& [k, c] : s.col) p.set(n, k, r * c);
  return p;
}

}  // namespace

JitterPattern generate_jitter(const JitterSpec& spec, JitterTarget target) {
  return std::visit([&](const auto& s) { return make(s, target); }, spec);
}

SampledFunction atom(const Window& w, const GaborLattice& lattice, int n, int k, double delta,
                     const GridSpec& grid) {
  require(lattice.n_range.contains(n) && lattice.k_range.contains(k),
          "atom index (n, k) outside the lattice ranges");
  const double shift = lattice.a * (k + delta);
  const double freq = lattice.b * n;
  auto out = SampledFunction::zeros(grid);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.point(j);
    const double h = w(x - shift);
    if (h != 0.0) out.values[j] = std::polar(h, 2.0 * std::numbers::pi * freq * x);
  }
  return out;
}

JitterPattern load_jitter_csv(const std::filesystem::path& path, double declared_bound) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open jitter file " + path.string());
  std::string line;
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; }),
            s.end());
    return s;
  };
  if (!std::getline(in, line) || strip(line) != "n,k,delta")
    throw Error(ErrorKind::io, path.string() + ": expected header 'n,k,delta'");
  JitterPattern p(declared_bound);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": expected 'n,k,delta'");
    int n = 0, k = 0;
    double d = 0.0;
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + c1, n);
    auto r2 = std::from_chars(b + c1 + 1, b + c2, k);
    auto r3 = std::from_chars(b + c2 + 1, b + line.size(), d);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r3.ec != std::errc{} || r1.ptr != b + c1 ||
        r2.ptr != b + c2 || r3.ptr != b + line.size())
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": malformed row");
    try {
      p.set(n, k, d);
    } catch (const Error& e) {
      throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return p;
}

void save_jitter_csv(const JitterPattern& p, const std::filesystem::path& path) {
  require(p.column_constants().empty(), "column-constant patterns have no finite CSV form");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out.precision(17);
  out << "n,k,delta\n";
  for (const auto& [key, v] : p.entries()) out << key.first << ',' << key.second << ',' << v << '\n';
}

}  // namespace gaborstab

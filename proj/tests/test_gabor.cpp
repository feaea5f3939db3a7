#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gaborstab/error.hpp"
#include "gaborstab/gabor.hpp"
#include "oracle.hpp"

using namespace gaborstab;

TEST_CASE("make_lattice density check") {
  CHECK_NOTHROW(make_lattice(1, 1, {-8, 8}, {-8, 8}));
  CHECK_NOTHROW(make_lattice(0.5, 1, {-8, 8}, {-8, 8}));
  CHECK_THROWS_AS(make_lattice(1, 1.5, {-8, 8}, {-8, 8}), Error);
  CHECK_THROWS_AS(make_lattice(-1, 1, {-8, 8}, {-8, 8}), Error);
  CHECK_THROWS_AS(make_lattice(1, 1, {3, 2}, {-8, 8}), Error);
}

TEST_CASE("atom samples") {
  const auto grid = GridSpec::make(-8, 8, 4096);
  const auto L = make_lattice(1, 1, {-4, 4}, {-4, 4});
  const auto rect = Window::rect();

  const auto g0 = atom(rect, L, 0, 0, 0.0, grid);
  for (std::size_t j = 0; j < grid.n_points; j += 7) CHECK(g0.values[j].real() == oracle::rect(grid.point(j)));

  const auto g3 = atom(rect, L, 0, 3, 0.25, grid);
  for (std::size_t j = 0; j < grid.n_points; j += 5) {
    const double x = grid.point(j);
    CHECK(g3.values[j].real() == oracle::rect(x - 3.25));
    CHECK(g3.values[j].imag() == 0.0);
  }

  const auto g2 = atom(rect, L, 2, 0, 0.0, grid);
  double e = 0.0;
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.point(j);
    CHECK(std::abs(g2.values[j] - std::polar(oracle::rect(x), 2 * oracle::pi * 2 * x)) < 1e-12);
    e += std::norm(g2.values[j]) * grid.dx();
  }
  CHECK(e == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("atom norm is preserved inside the grid") {
  const auto grid = GridSpec::make(-8, 8, 8192);
  const auto L = make_lattice(0.5, 1, {-6, 6}, {-6, 6});
  for (const auto& w : {Window::rect(), Window::bspline(2), Window::bspline(3)}) {
    const double ref = inner_norm2(atom(w, L, 0, 0, 0.0, grid));
    const double exact = oracle::simpson([&](double x) { return std::pow(w(x), 2); }, -2, 2, 200000);
    // Shifts a (k + delta) on the sample lattice: modulation and translation
    // permute samples, so the discrete norm is unchanged.
    for (int n : {-5, 0, 3})
      for (int k : {-4, 1, 6})
        for (double d : {-0.25, 0.0, 0.375}) CHECK(inner_norm2(atom(w, L, n, k, d, grid)) == doctest::Approx(ref).epsilon(1e-8));
    // Off-lattice shifts: within the midpoint-rule error of the exact norm.
    // rect: one cell at each jump; kinked windows: O(dx^2).
    const double tol = w.kind() == WindowKind::rect ? 2 * grid.dx() : 4 * grid.dx() * grid.dx();
    for (double d : {-0.3, 0.1234, 0.45}) CHECK(std::abs(inner_norm2(atom(w, L, 2, 1, d, grid)) - exact) <= tol);
  }
}

TEST_CASE("jitter_marginals") {
  JitterPattern p;
  p.set(0, 0, 0.1);
  p.set(1, 0, -0.2);
  auto m = jitter_marginals(p);
  CHECK(m.d_at(0) == doctest::Approx(0.2));
  CHECK(m.D_at(0) == doctest::Approx(0.1));
  CHECK(m.D_at(1) == doctest::Approx(0.2));

  const auto e = jitter_marginals(JitterPattern());
  CHECK(e.d.empty());
  CHECK(e.D.empty());
  CHECK(e.d_at(3) == 0.0);
  CHECK(e.D_at(-2) == 0.0);

  JitterPattern q;
  for (int n = -2; n <= 2; ++n) q.set(n, 0, 0.05);
  m = jitter_marginals(q);
  CHECK(m.d_at(0) == doctest::Approx(0.05));
  for (int n = -2; n <= 2; ++n) CHECK(m.D_at(n) == doctest::Approx(0.05));
  CHECK(m.D_at(3) == 0.0);
}

TEST_CASE("jitter_marginals are monotone under insertion") {
  SplitMix64 rng(99);
  JitterPattern p;
  auto before = jitter_marginals(p);
  for (int step = 0; step < 200; ++step) {
    const int n = static_cast<int>(rng.next() % 9) - 4;
    const int k = static_cast<int>(rng.next() % 9) - 4;
    const double cur = p(n, k);
    // Only entries with larger magnitude count as "adding"; overwriting with
    // a smaller value is not an insertion.
    const double v = (rng.uniform() - 0.5) * 0.8;
    if (std::abs(v) < std::abs(cur)) continue;
    p.set(n, k, v);
    const auto after = jitter_marginals(p);
    for (int i = -4; i <= 4; ++i) {
      CHECK(after.d_at(i) >= before.d_at(i));
      CHECK(after.D_at(i) >= before.D_at(i));
    }
    before = after;
  }
}

TEST_CASE("generate_jitter shapes") {
  const auto g = generate_jitter(GeometricJitter{1.0 / 48.0, 0.5, {0}});
  for (int n = -10; n <= 10; ++n) CHECK(g(n, 0) == doctest::Approx(std::ldexp(1.0 / 48.0, -std::abs(n))));
  CHECK(g(0, 1) == 0.0);
  CHECK(g.n_extent() == NExtent::geometric);

  UniformRandomJitter u{0.1, 7, {-3, 3}, {-3, 3}};
  const auto a = generate_jitter(u), b = generate_jitter(u);
  CHECK(a.digest() == b.digest());
  CHECK(a.entries() == b.entries());
  CHECK(a.max_abs() <= 0.1);
  u.seed = 8;
  CHECK(generate_jitter(u).digest() != a.digest());

  ColumnConstantJitter c;
  for (int k = -3; k <= 3; ++k) c.d[k] = 0.3;
  const auto cc = generate_jitter(c);
  const auto m = jitter_marginals(cc);
  for (int k = -3; k <= 3; ++k) CHECK(m.d_at(k) == doctest::Approx(0.3));
  CHECK_FALSE(m.n_summable);
  CHECK(std::isinf(m.col_abs_sums.at(0)));
  CHECK(cc.n_extent() == NExtent::unbounded);

  SeparableJitter s{{{0, 0.5}, {1, -0.25}}, {{2, 0.2}}};
  const auto sp = generate_jitter(s);
  CHECK(sp(0, 2) == doctest::Approx(0.1));
  CHECK(sp(1, 2) == doctest::Approx(-0.05));
  CHECK(sp(1, 1) == 0.0);
}

TEST_CASE("compact-support target rejects |delta| >= 1/2") {
  CHECK_THROWS_AS(generate_jitter(UniformRandomJitter{0.5, 1, {0, 1}, {0, 1}}, JitterTarget::compact_support), Error);
  CHECK_NOTHROW(generate_jitter(UniformRandomJitter{0.49, 1, {0, 1}, {0, 1}}, JitterTarget::compact_support));
}

TEST_CASE("splitmix64 reference values") {
  // Oracle: the documented update written out here.
  auto ref = [](std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t st = 1234567;
  SplitMix64 g(1234567);
  for (int i = 0; i < 100; ++i) CHECK(g.next() == ref(st));
  // Published first output for seed 0.
  SplitMix64 z(0);
  CHECK(z.next() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("jitter CSV round trip") {
  const auto path = std::filesystem::temp_directory_path() / "gaborstab_jitter_test.csv";
  const auto p = generate_jitter(UniformRandomJitter{0.2, 3, {-2, 2}, {-1, 1}});
  save_jitter_csv(p, path);
  const auto back = load_jitter_csv(path, 0.2);
  CHECK(back.entries() == p.entries());
  CHECK(back.digest() == p.digest());
  std::filesystem::remove(path);
}

TEST_CASE("scaled pattern") {
  const auto p = generate_jitter(GeometricJitter{0.1, 0.5, {0, 2}});
  const auto s = p.scaled(0.5);
  CHECK(s(3, 2) == doctest::Approx(0.5 * p(3, 2)));
  CHECK(s.bound() == doctest::Approx(0.5 * p.bound()));
}

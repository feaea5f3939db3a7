#include <doctest.h>

#include <cmath>
#include <random>

#include "gaborstab/bounds.hpp"
#include "gaborstab/error.hpp"
#include "gaborstab/fft.hpp"
#include "gaborstab/numerics.hpp"
#include "gaborstab/stability.hpp"
#include "oracle.hpp"

using namespace gaborstab;

namespace {

SampledFunction sample(const GridSpec& g, const std::function<Complex(double)>& f) {
  auto out = SampledFunction::zeros(g);
  for (std::size_t j = 0; j < g.n_points; ++j) out.values[j] = f(g.point(j));
  return out;
}

double rel_diff(const SampledFunction& a, const SampledFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    num += std::norm(a.values[j] - b.values[j]);
    den += std::norm(b.values[j]);
  }
  return std::sqrt(num / den);
}

Complex gauss_mod(double x, double c, double f) {
  return std::exp(-(x - c) * (x - c)) * std::polar(1.0, 2 * oracle::pi * f * x);
}

}  // namespace

TEST_CASE("discretize") {
  const auto grid = GridSpec::make(-16, 16, 8192);
  const auto L = make_lattice(1, 1, {-8, 8}, {-8, 8});
  auto sys = discretize(Window::rect(), L, JitterPattern(), grid);
  CHECK(sys.atoms.size() == 17 * 17);
  CHECK(sys.clipped == 0);

  JitterPattern p(0.49);
  p.set(0, 0, 0.25);
  sys = discretize(Window::rect(), L, p, grid);
  for (const auto& at : sys.atoms) {
    if (at.n != 0 || at.k != 0) continue;
    double first = INFINITY, last = -INFINITY;
    for (std::size_t i = 0; i < at.values.size(); ++i)
      if (std::abs(at.values[i]) > 0.5) {
        const double x = grid.point(at.offset + i);
        first = std::min(first, x);
        last = std::max(last, x);
      }
    CHECK(0.5 * (first + last) == doctest::Approx(0.25).epsilon(grid.dx()));
  }

  CHECK_THROWS_AS(discretize(Window::rect(), L, JitterPattern(), GridSpec::make(-4, 4, 2048)), Error);
  const auto clipped = discretize(Window::rect(), L, JitterPattern(), GridSpec::make(-4, 4, 2048), OverflowPolicy::clip);
  CHECK(clipped.dropped > 0);

  // Modulation beyond the grid Nyquist frequency is refused.
  CHECK_THROWS_AS(discretize(Window::rect(), make_lattice(1, 1, {-100, 100}, {-2, 2}), JitterPattern(),
                             GridSpec::make(-8, 8, 2048)),
                  Error);
}

TEST_CASE("frame operator of the orthonormal rect basis") {
  const auto grid = GridSpec::make(-8, 8, 2048);
  const auto L = make_lattice(1, 1, {-64, 64}, {-7, 7});
  const auto sys = discretize(Window::rect(), L, JitterPattern(), grid);
  const auto f = sample(grid, [](double x) { return gauss_mod(x, 0.3, 3.0); });
  const auto Sf = frame_operator_apply(sys, f);
  CHECK(rel_diff(Sf, f) < 1e-2);
  CHECK(rel_diff(frame_operator_apply(sys, f, ApplyMethod::direct), Sf) < 1e-10);
  CHECK(rel_diff(frame_operator_apply(sys, f, ApplyMethod::fft), Sf) < 1e-10);

  // Supported outside every atom.
  const auto g = sample(grid, [](double x) { return x > 7.6 ? Complex(1.0, 0.5) : Complex(0.0); });
  const auto Sg = frame_operator_apply(sys, g);
  double e = 0.0;
  for (const auto& v : Sg.values) e += std::norm(v);
  CHECK(e == 0.0);
}

TEST_CASE("painless frame operator is a multiplier") {
  const auto grid = GridSpec::make(-8, 8, 2048);
  const auto sys = discretize(Window::rect(), make_lattice(0.5, 1, {-64, 64}, {-14, 14}), JitterPattern(), grid);
  const auto f = sample(grid, [](double x) { return gauss_mod(x, -0.7, 2.0); });
  auto twice = f;
  for (auto& v : twice.values) v *= 2.0;
  CHECK(rel_diff(frame_operator_apply(sys, f), twice) < 1e-2);
}

TEST_CASE("frame operator is self-adjoint and positive") {
  const auto grid = GridSpec::make(-8, 8, 1024);
  const auto p = generate_jitter(UniformRandomJitter{0.3, 5, {-20, 20}, {-5, 5}});
  const auto sys = discretize(Window::bspline(2), make_lattice(1, 0.5, {-20, 20}, {-5, 5}), p, grid);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 5; ++trial) {
    auto f = sample(grid, [&](double x) { return std::abs(x) < 4 ? Complex(N(rng), N(rng)) : Complex(0.0); });
    auto g = sample(grid, [&](double x) { return std::abs(x) < 4 ? Complex(N(rng), N(rng)) : Complex(0.0); });
    const auto Sf = frame_operator_apply(sys, f), Sg = frame_operator_apply(sys, g);
    const Complex lhs = inner(Sf, g), rhs = inner(f, Sg);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    CHECK(inner(Sf, f).real() >= 0.0);
    CHECK(std::abs(inner(Sf, f).imag()) <= 1e-10 * inner(Sf, f).real());
  }
}

TEST_CASE("empirical frame bounds") {
  const auto grid = GridSpec::make(-8, 8, 2048);
  auto e = empirical_frame_bounds(discretize(Window::rect(), make_lattice(1, 1, {-32, 32}, {-7, 7}), JitterPattern(), grid));
  CHECK(e.lambda_min == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(e.lambda_max == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(1.0 - e.lambda_min <= e.loss_bound);
  for (double r : e.residuals) CHECK(r < 1e-6);

  const double narrow_min = e.lambda_min;

  // Wider bands for the slowly decaying rect spectrum lose more, and the
  // bound still covers the observed loss.
  TestSubspaceSpec wide;
  wide.max_freq = 2;
  e = empirical_frame_bounds(discretize(Window::rect(), make_lattice(1, 1, {-32, 32}, {-7, 7}), JitterPattern(), grid), wide);
  CHECK(e.lambda_min < narrow_min);
  CHECK(1.0 - e.lambda_min <= e.loss_bound);

  e = empirical_frame_bounds(discretize(Window::rect(), make_lattice(0.5, 1, {-32, 32}, {-14, 14}), JitterPattern(), grid));
  CHECK(e.lambda_min == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(e.lambda_max == doctest::Approx(2.0).epsilon(1e-2));

  // bspline(2), a = 1, b = 1/2: painless bounds (1, 2).
  e = empirical_frame_bounds(discretize(Window::bspline(2), make_lattice(1, 0.5, {-64, 64}, {-6, 6}), JitterPattern(), grid));
  CHECK(e.lambda_min >= 1.0 - 2e-2);
  CHECK(e.lambda_max <= 2.0 + 2e-2);
  CHECK(e.lambda_max >= 1.9);
}

TEST_CASE("empirical bounds respect a passing certificate") {
  const auto grid = GridSpec::make(-8, 8, 2048);
  const auto L = make_lattice(1, 1, {-32, 32}, {-7, 7});
  const auto p = generate_jitter(GeometricJitter{1.0 / 48, 0.5, {0}}, JitterTarget::compact_support);
  const auto cert = certify_compact_support(Window::rect(), 1, 1, painless_bounds(Window::rect(), 1, 1), p);
  REQUIRE(cert.passed);
  const auto e = empirical_frame_bounds(discretize(Window::rect(), L, p, grid));
  CHECK(e.lambda_min >= cert.perturbed->A - 0.05);
  CHECK(e.lambda_max <= cert.perturbed->B + 0.05);
}

TEST_CASE("empirical bounds are stable under grid refinement") {
  const auto L = make_lattice(1, 0.5, {-32, 32}, {-7, 7});
  const auto p = generate_jitter(UniformRandomJitter{0.1, 3, {-8, 8}, {-6, 6}});
  TestSubspaceSpec spec;
  spec.half_width = 3;
  spec.max_freq = 4;
  const auto c = empirical_frame_bounds(discretize(Window::bspline(2), L, p, GridSpec::make(-8, 8, 1024)), spec);
  const auto f = empirical_frame_bounds(discretize(Window::bspline(2), L, p, GridSpec::make(-8, 8, 2048)), spec);
  CHECK(std::abs(c.lambda_min - f.lambda_min) < 2e-2);
  CHECK(std::abs(c.lambda_max - f.lambda_max) < 2e-2);
}

TEST_CASE("time and frequency systems share their frame bounds") {
  // Frequency-side sinc at (a, b) is the rect system with the roles of a
  // and b exchanged.
  const auto tgrid = GridSpec::make(-8, 8, 2048);
  const auto fgrid = GridSpec::make(-8, 8, 2048);
  const auto t = empirical_frame_bounds(discretize(Window::rect(), make_lattice(0.5, 1, {-32, 32}, {-14, 14}), JitterPattern(), tgrid));
  const auto f = empirical_frame_bounds(
      discretize_fourier(Window::sinc(1), make_lattice(1, 0.5, {-14, 14}, {-32, 32}), JitterPattern(), fgrid));
  CHECK(f.lambda_min == doctest::Approx(t.lambda_min).epsilon(2e-2));
  CHECK(f.lambda_max == doctest::Approx(t.lambda_max).epsilon(2e-2));
}

TEST_CASE("test subspace basis is orthonormal") {
  const auto grid = GridSpec::make(-8, 8, 1024);
  const auto Q = test_subspace_basis(grid, 0.5, 3, 4);
  const Eigen::MatrixXcd G = Q.adjoint() * Q * grid.dx();
  CHECK((G - Eigen::MatrixXcd::Identity(Q.cols(), Q.cols())).norm() < 1e-10);
}

TEST_CASE("stft values") {
  const auto grid = GridSpec::make(-4, 4, 1024);
  const auto r = sample(grid, [](double x) { return Complex(oracle::rect(x)); });
  CHECK(std::abs(stft_value(r, r, 0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(stft_value(r, r, 0, 1)) < 1e-12);
  CHECK(std::abs(stft_value(r, r, 1, 0)) < 1e-12);
  const auto S = stft(r, r, {0.0, 1.0});
  Eigen::Index zero = 0;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(S.xi.size()); ++j)
    if (S.xi[static_cast<std::size_t>(j)] == 0.0) zero = j;
  CHECK(std::abs(S.values(0, zero) - 1.0) < 1e-12);
  CHECK(std::abs(S.values(1, zero)) < 1e-12);
  // Grid FFT against the direct sum at a few bins.
  for (Eigen::Index j : {zero + 3, zero - 17, zero + 100})
    CHECK(std::abs(S.values(0, j) - stft_value(r, r, S.xi[static_cast<std::size_t>(j)], 0.0)) < 1e-10);
}

TEST_CASE("plancherel identities") {
  const auto grid = GridSpec::make(-4, 4, 1024);
  const auto r = sample(grid, [](double x) { return Complex(oracle::rect(x)); });
  auto p = plancherel_check(r, r);
  CHECK(p.expected == doctest::Approx(1.0));
  CHECK(p.residual < 1e-6);

  p = plancherel_check(SampledFunction::zeros(grid), r);
  CHECK(p.residual == 0.0);
  CHECK(p.energy == 0.0);

  const auto left = sample(grid, [](double x) { return Complex(oracle::rect(x + 2)); });
  const auto right = sample(grid, [](double x) { return Complex(oracle::rect(x - 2)); });
  const auto q = plancherel4_check(left, right, r, r);
  CHECK(std::abs(q.rhs) == 0.0);
  CHECK(std::abs(q.lhs) < 1e-10);
}

TEST_CASE("squared transform equals transform of the autocorrelation") {
  // |psi^(y)|^2 = (psi * psi_-)^(y) for rect: the autocorrelation is built
  // by discrete convolution and transformed as a sampled window.
  const double h = 1.0 / 256;
  std::vector<double> box(256, 1.0);
  const auto conv = fft::convolve(box, box);
  std::vector<double> tri(conv.size() + 2, 0.0);
  for (std::size_t i = 0; i < conv.size(); ++i) tri[i + 1] = conv[i] * h;
  const auto w = Window::sampled(-1.0, h, tri);
  for (double y : {0.0, 0.3, 0.5, 0.9, 1.25, 1.5, 2.1, 2.75, 3.3, 4.05}) {
    const double lhs = std::norm(Window::rect().fourier(y));
    CHECK(std::abs(w.fourier(y) - lhs) < 1e-4);
  }
}

TEST_CASE("poisson_sum_check") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> ys(100);
  for (auto& y : ys) y = U(rng);
  const auto pc = poisson_sum_check(Window::rect(), 1, ys);
  CHECK(pc.tail_exact);
  for (const auto& r : pc.rows) {
    CHECK(std::abs(r.lhs - 1.0) < 1e-8);
    CHECK(*r.residual_unit < 1e-8);
  }

  const auto half = poisson_sum_check(Window::rect(), 0.5, {0.0});
  CHECK(half.rows[0].lhs == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(*half.rows[0].rhs_unit == doctest::Approx(2.0));

  // Support (-1, 1): only the general form applies.
  const auto tri = poisson_sum_check(Window::bspline(2), 1, {0.0, 0.3});
  CHECK_FALSE(tri.rows[0].rhs_unit.has_value());
  // sum_n sinc^4(y + n) = 1 - (2/3) sin^2(pi y).
  for (const auto& r : tri.rows) {
    CHECK(r.lhs == doctest::Approx(1 - 2.0 / 3 * std::pow(std::sin(oracle::pi * r.y), 2)).epsilon(1e-8));
    CHECK(r.residual_general < 1e-6);
  }
}

TEST_CASE("stft_sampling_check") {
  const auto grid = GridSpec::make(-8, 8, 2048);
  const auto r = sample(grid, [](double x) { return Complex(oracle::rect(x)); });
  auto rows = stft_sampling_check(r, r, 1, {0.0, 1.0});
  CHECK(rows[0].lhs == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rows[0].rhs == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rows[0].residual < 1e-6);
  CHECK(rows[1].lhs == doctest::Approx(0.0).scale(1e-12));
  CHECK(rows[1].rhs == 0.0);

  rows = stft_sampling_check(SampledFunction::zeros(grid), r, 1, {0.0});
  CHECK(rows[0].lhs == 0.0);
  CHECK(rows[0].rhs == 0.0);
}

TEST_CASE("painless_operator_check") {
  const auto grid = GridSpec::make(-8, 8, 2048);
  auto pc = painless_operator_check(Window::rect(), make_lattice(1, 1, {0, 0}, {-6, 6}), {}, grid);
  CHECK(pc.max_residual < 1e-6);
  CHECK(pc.multiplier_min == doctest::Approx(1.0));
  CHECK(pc.multiplier_max == doctest::Approx(1.0));

  pc = painless_operator_check(Window::rect(), make_lattice(0.5, 1, {0, 0}, {-12, 12}), {}, grid);
  CHECK(pc.max_residual < 1e-6);
  CHECK(pc.multiplier_min == doctest::Approx(2.0));
  CHECK(pc.multiplier_max == doctest::Approx(2.0));

  std::map<int, double> shift;
  for (int k = -6; k <= 6; ++k) shift[k] = 0.3;
  pc = painless_operator_check(Window::rect(), make_lattice(1, 1, {0, 0}, {-6, 6}), shift, grid);
  CHECK(pc.max_residual < 1e-6);
  CHECK(pc.multiplier_min == doctest::Approx(1.0));
  CHECK(pc.multiplier_max == doctest::Approx(1.0));
}

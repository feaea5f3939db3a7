// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [report.json]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gaborstab/bounds.hpp"
#include "gaborstab/gabor.hpp"
#include "gaborstab/numerics.hpp"
#include "gaborstab/runner.hpp"
#include "gaborstab/serialize.hpp"
#include "gaborstab/stability.hpp"
#include "gaborstab/windows.hpp"

using namespace gaborstab;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Criterion {
  bool pass = true;
  std::string detail;
  Json data = Json::object();
};

SampledFunction sample(const GridSpec& grid, const std::function<Complex(double)>& f) {
  auto out = SampledFunction::zeros(grid);
  for (std::size_t j = 0; j < grid.n_points; ++j) out.values[j] = f(grid.point(j));
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. G(rect; 1, 1): lambda_min, lambda_max in [0.99, 1.01].
Criterion orthonormal_baseline(double& seconds) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = GridSpec::make(-16, 16, 8192);
  const auto sys = discretize(Window::rect(), make_lattice(1, 1, {-32, 32}, {-32, 32}), JitterPattern(), grid,
                              OverflowPolicy::clip);
  const auto e = empirical_frame_bounds(sys);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.data = to_json(e);
  c.pass = e.lambda_min >= 0.99 && e.lambda_min <= 1.01 && e.lambda_max >= 0.99 && e.lambda_max <= 1.01 &&
           seconds < 30.0;
  c.detail = "lambda = [" + fmt("%.6f", e.lambda_min) + ", " + fmt("%.6f", e.lambda_max) + "], " +
             fmt("%.2f s", seconds);
  return c;
}

// 2. G(rect; 1/2, 1): empirical bounds within 1% of A = B = 2.
Criterion tight_painless() {
  Criterion c;
  const auto grid = GridSpec::make(-16, 16, 8192);
  const auto sys = discretize(Window::rect(), make_lattice(0.5, 1, {-32, 32}, {-32, 32}), JitterPattern(), grid,
                              OverflowPolicy::clip);
  const auto e = empirical_frame_bounds(sys);
  const auto pb = painless_bounds(Window::rect(), 0.5, 1);
  const auto rb = rect_bounds(0.5, 1);
  c.data = Json{{"empirical", to_json(e)}, {"painless", to_json(pb)}, {"rect", to_json(rb)}};
  auto within = [](double v) { return std::abs(v - 2.0) <= 0.02; };
  c.pass = within(e.lambda_min) && within(e.lambda_max) && pb.A == 2.0 && pb.B == 2.0 && rb.B == 2.0;
  c.detail = "lambda = [" + fmt("%.6f", e.lambda_min) + ", " + fmt("%.6f", e.lambda_max) + "], painless (" +
             fmt("%g", pb.A) + ", " + fmt("%g", pb.B) + "), rect B " + fmt("%g", rb.B);
  return c;
}

// 3. Passing certificates bound the empirical frame bounds, for >= 20
// seeded patterns per theorem.
Criterion certificate_soundness() {
  Criterion c;
  constexpr int kNeeded = 20;
  constexpr double kSlack = 0.05;
  const auto grid = GridSpec::make(-8, 8, 2048);

  struct Setup {
    const char* name;
    std::function<StabilityCertificate(const JitterPattern&)> certify;
    std::function<DiscretizedSystem(const JitterPattern&)> discretize;
    double base_bound;
  };
  const auto rect = Window::rect(), tri = Window::bspline(2), sinc = Window::sinc(1);
  const std::vector<Setup> setups{
      {"thm1-compact on rect (1, 1)",
       [&](const JitterPattern& p) { return certify_compact_support(rect, 1, 1, painless_bounds(rect, 1, 1), p); },
       [&](const JitterPattern& p) { return discretize(rect, make_lattice(1, 1, {-32, 32}, {-7, 7}), p, grid); },
       0.004},
      {"thm-wiener-amalgam on bspline(2) (1, 1/2)",
       [&](const JitterPattern& p) { return certify_wiener_amalgam(tri, 1, 0.5, painless_bounds(tri, 1, 0.5), p); },
       [&](const JitterPattern& p) { return discretize(tri, make_lattice(1, 0.5, {-64, 64}, {-6, 6}), p, grid); },
       0.02},
      {"thm-bandlimited on sinc (1, 1)",
       [&](const JitterPattern& p) { return certify_bandlimited(sinc, 1, 1, fourier_side_bounds(sinc, 1, 1), p); },
       [&](const JitterPattern& p) {
         return discretize_fourier(sinc, make_lattice(1, 1, {-7, 7}, {-32, 32}), p, grid);
       },
       0.01},
  };

  Json per = Json::array();
  for (const auto& s : setups) {
    int passed = 0, tried = 0, counterexamples = 0;
    double worst = std::numeric_limits<double>::infinity();  // smallest slack left
    Json rows = Json::array();
    for (std::uint64_t seed = 1; passed < kNeeded && seed <= 400; ++seed) {
      ++tried;
      // Amplitude and block size vary with the seed.
      const double bound = s.base_bound * static_cast<double>(1 + seed % 5);
      const int half = 1 + static_cast<int>(seed % 3);
      const auto p = generate_jitter(UniformRandomJitter{bound, seed, {-half, half}, {-half, half}});
      const auto cert = s.certify(p);
      if (!cert.passed) continue;
      ++passed;
      const auto e = empirical_frame_bounds(s.discretize(p));
      const double lo = cert.perturbed->A - kSlack, hi = cert.perturbed->B + kSlack;
      const bool ok = e.lambda_min >= lo && e.lambda_max <= hi;
      if (!ok) ++counterexamples;
      worst = std::min({worst, e.lambda_min - lo, hi - e.lambda_max});
      rows.push_back(Json{{"seed", seed},
                          {"margin", number(cert.margin)},
                          {"A_prime", number(cert.perturbed->A)},
                          {"B_prime", number(cert.perturbed->B)},
                          {"lambda_min", number(e.lambda_min)},
                          {"lambda_max", number(e.lambda_max)},
                          {"inside", ok}});
    }
    const bool ok = passed >= kNeeded && counterexamples == 0;
    c.pass = c.pass && ok;
    per.push_back(Json{{"setup", s.name}, {"tried", tried}, {"passing", passed},
                       {"counterexamples", counterexamples}, {"rows", rows}});
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += std::to_string(passed) + "/" + std::to_string(tried) + " passing, " +
                std::to_string(counterexamples) + " outside, min slack " + fmt("%.3f", worst);
  }
  c.data = per;
  return c;
}

// 4. Kadec constant: normalisation at delta = 1/(4M), monotone factor, bracketing.
Criterion kadec() {
  Criterion c;
  Json rows = Json::array();
  int failures = 0;
  for (int M : {1, 2, 4, 8}) {
    const double edge = 1.0 / (4.0 * M);
    const double ratio = kadec_constant(edge, M).value / std::sqrt(M / (2.0 * pi));
    const bool norm_ok = std::abs(ratio - 1.0) <= 4 * kEps;
    bool monotone = true, bracket = true;
    double prev = -1.0;
    for (int i = 0; i < 100; ++i) {
      const double delta = edge * i / 99.0;
      const double f = kadec_constant(delta, M).factor;
      const double x = pi * delta * M;
      if (i > 0 && !(f > prev)) monotone = false;
      prev = f;
      const double tol = 4 * kEps * std::max(1.0, f);
      if (!(2.0 * delta * M <= f + tol && f <= x + 0.5 * x * x + tol)) bracket = false;
    }
    if (!norm_ok || !monotone || !bracket) ++failures;
    rows.push_back(Json{{"M", M}, {"ratio", number(ratio)}, {"monotone", monotone}, {"bracketed", bracket}});
  }
  c.pass = failures == 0;
  c.data = rows;
  c.detail = std::to_string(4 - failures) + "/4 values of M";
  return c;
}

// 5. STFT Plancherel on a 10-function corpus and the four-function identity on 10 pairs.
Criterion plancherel() {
  Criterion c;
  const auto grid = GridSpec::make(-8, 8, 2048);
  auto rect = [](double x) { return eval_window(Window::rect(), x); };
  auto tri = [](double x) { return eval_window(Window::bspline(2), x); };
  auto cubic = [](double x) { return eval_window(Window::bspline(3), x); };
  auto mod = [](double xi, double x) { return std::polar(1.0, 2 * pi * xi * x); };
  const std::vector<SampledFunction> corpus{
      sample(grid, [&](double x) { return Complex(rect(x)); }),
      sample(grid, [&](double x) { return Complex(tri(x)); }),
      sample(grid, [&](double x) { return Complex(rect(x - 1.0)); }),
      sample(grid, [&](double x) { return Complex(tri(x + 2.5)); }),
      sample(grid, [&](double x) { return rect(x) * mod(3.0, x); }),
      sample(grid, [&](double x) { return tri(x - 0.5) * mod(-1.75, x); }),
      sample(grid, [&](double x) { return rect(0.5 * x) * mod(0.5, x); }),
      sample(grid, [&](double x) { return Complex(cubic(x)); }),
      sample(grid, [&](double x) { return cubic(x - 3.0) * mod(2.25, x); }),
      sample(grid, [&](double x) { return Complex(rect(x + 2.0) - 0.5 * tri(x - 2.0)); }),
  };
  const auto g_rect = corpus[0], g_tri = corpus[1];

  double worst = 0.0;
  Json single = Json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& g = i % 2 == 0 ? g_rect : g_tri;
    const auto r = plancherel_check(corpus[i], g);
    worst = std::max(worst, r.residual);
    single.push_back(number(r.residual));
  }
  double worst4 = 0.0;
  Json pairs = Json::array();
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& f1 = corpus[i];
    const auto& f2 = corpus[(i + 3) % corpus.size()];
    const auto& g1 = corpus[(i + 1) % corpus.size()];
    const auto& g2 = corpus[(i + 7) % corpus.size()];
    const auto r = plancherel4_check(f1, f2, g1, g2);
    worst4 = std::max(worst4, r.residual);
    pairs.push_back(number(r.residual));
  }
  c.pass = worst < 1e-6 && worst4 < 1e-6;
  c.data = Json{{"plancherel_residuals", single}, {"four_function_residuals", pairs}};
  c.detail = "max residual " + fmt("%.2e", worst) + ", four-function " + fmt("%.2e", worst4);
  return c;
}

// 6. Poisson: sum_n sinc^2(y + n) = 1 at 100 random y; scaling ||g||^2 / P.
Criterion poisson() {
  Criterion c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  std::vector<double> ys(100);
  for (auto& y : ys) y = U(rng);
  double worst = 0.0;
  const auto unit = poisson_sum_check(Window::rect(), 1.0, ys);
  for (const auto& r : unit.rows) worst = std::max(worst, std::abs(r.lhs - 1.0));
  bool scaling = unit.tail_exact;
  Json rows = Json::array();
  for (double P : {1.0, 0.5, 0.25}) {
    const auto pc = poisson_sum_check(Window::rect(), P, {ys[0], ys[1], ys[2], 0.0});
    double err = 0.0;
    for (const auto& r : pc.rows) {
      if (!r.rhs_unit || std::abs(*r.rhs_unit - 1.0 / P) > 1e-12 / P) scaling = false;
      err = std::max(err, std::abs(r.lhs - 1.0 / P) * P);
    }
    scaling = scaling && err < 1e-8;
    rows.push_back(Json{{"P", P}, {"max_relative_error", number(err)}});
  }
  c.pass = worst < 1e-8 && scaling;
  c.data = Json{{"max_error_unit", number(worst)}, {"scaling", rows}};
  c.detail = "max |sum - 1| " + fmt("%.2e", worst) + ", scaling at P = 1, 1/2, 1/4 " + (scaling ? "ok" : "broken");
  return c;
}

// 7. Painless multiplier: assembled frame operator against the multiplier.
Criterion painless_multiplier() {
  Criterion c;
  const auto grid = GridSpec::make(-8, 8, 2048);
  std::map<int, double> column_shift;  // constant shift of whole columns
  for (int k = 0; k <= 3; ++k) column_shift[k] = 0.25;
  struct Case {
    const char* name;
    Window w;
    GaborLattice L;
    std::map<int, double> shift;
  };
  const std::vector<Case> cases{
      {"rect (1, 1)", Window::rect(), make_lattice(1, 1, {0, 0}, {-6, 6}), {}},
      {"rect (1/2, 1)", Window::rect(), make_lattice(0.5, 1, {0, 0}, {-12, 12}), {}},
      {"bspline(2) (1, 1/2)", Window::bspline(2), make_lattice(1, 0.5, {0, 0}, {-5, 5}), {}},
      {"bspline(2) (1/2, 1/2)", Window::bspline(2), make_lattice(0.5, 0.5, {0, 0}, {-10, 10}), {}},
      {"rect (1/2, 1) shifted columns", Window::rect(), make_lattice(0.5, 1, {0, 0}, {-12, 12}), column_shift},
      {"bspline(2) (1, 1/2) shifted columns", Window::bspline(2), make_lattice(1, 0.5, {0, 0}, {-5, 5}),
       column_shift},
  };
  double worst = 0.0;
  Json rows = Json::array();
  for (const auto& k : cases) {
    const auto pc = painless_operator_check(k.w, k.L, k.shift, grid);
    worst = std::max(worst, pc.max_residual);
    rows.push_back(Json{{"case", k.name}, {"check", to_json(pc)}});
  }
  // The shifted column must also satisfy the overlap condition it relies on.
  const auto cert = certify_nsgf_overlap(Window::rect(), 0.5, 1, column_shift);
  c.pass = worst < 1e-6 && cert.passed;
  c.data = Json{{"cases", rows}, {"overlap_certificate", to_json(cert)}};
  c.detail = std::to_string(cases.size()) + " configurations, max residual " + fmt("%.2e", worst) +
             ", overlap certificate " + (cert.passed ? "passed" : "failed");
  return c;
}

// 8. The rect margin never exceeds the earlier sufficient condition.
Criterion improvement() {
  Criterion c;
  int violations = 0, checks = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (double a : {1.0, 0.5})
    for (double b : {1.0, 0.5}) {
      const double A = painless_bounds(Window::rect(), a, b).A;
      for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const int nh = 1 + static_cast<int>(seed % 6), kh = 1 + static_cast<int>((seed / 6) % 4);
        const double bound = 0.01 * static_cast<double>(1 + seed % 7);
        const auto p = generate_jitter(UniformRandomJitter{bound, seed, {-nh, nh}, {-kh, kh}});
        const double lit = rect_literal_margin(a, A, p);
        const double prior = prior_jitter_condition(a, b, p);
        ++checks;
        if (!(lit <= prior * (1.0 + 8 * kEps))) ++violations;
        tightest = std::min(tightest, prior - lit);
      }
    }
  c.pass = violations == 0;
  c.data = Json{{"checks", checks}, {"violations", violations}, {"min_gap", number(tightest)}};
  c.detail = std::to_string(checks) + " patterns, " + std::to_string(violations) + " violations";
  return c;
}

// 9. B-spline recursion against the empirical bounds of G(bspline(2); 1, 1/2).
Criterion bspline_recursion() {
  Criterion c;
  constexpr double kTol = 0.02;
  const auto Nh = compute_N_h(Window::rect(), 1.0);
  const auto b2 = bspline_bound_recursion(2.0, 2.0, 0.5, 1.0, 1.0, Nh, 2);
  const auto grid = GridSpec::make(-8, 8, 2048);
  const auto e = empirical_frame_bounds(
      discretize(Window::bspline(2), make_lattice(1, 0.5, {-64, 64}, {-6, 6}), JitterPattern(), grid));
  const bool b_ok = std::abs(b2.B - 2.0) <= 4 * kEps && b2.B >= e.lambda_max - kTol;
  const bool a_ok = b2.A <= e.lambda_min + kTol;
  c.pass = b_ok && a_ok;
  c.data = Json{{"N_h", to_json(Nh)}, {"recursion", to_json(b2)}, {"empirical", to_json(e)}};
  c.detail = "B2 = " + fmt("%.6g", b2.B) + " vs lambda_max " + fmt("%.6f", e.lambda_max) + ", A2 = " +
             fmt("%.4g", b2.A) + " vs lambda_min " + fmt("%.6f", e.lambda_min);
  return c;
}

struct Suite {
  std::vector<Criterion> criteria;
  double baseline_seconds = 0.0;
};

Suite run_suite() {
  Suite s;
  s.criteria.push_back(orthonormal_baseline(s.baseline_seconds));
  s.criteria.push_back(tight_painless());
  s.criteria.push_back(certificate_soundness());
  s.criteria.push_back(kadec());
  s.criteria.push_back(plancherel());
  s.criteria.push_back(poisson());
  s.criteria.push_back(painless_multiplier());
  s.criteria.push_back(improvement());
  s.criteria.push_back(bspline_recursion());
  return s;
}

// Runtime is excluded: the report must not depend on the machine.
Json suite_report(const Suite& s) {
  Json j = Json::array();
  for (std::size_t i = 0; i < s.criteria.size(); ++i)
    j.push_back(Json{{"criterion", i + 1}, {"pass", s.criteria[i].pass}, {"data", s.criteria[i].data}});
  return j;
}

std::string example_reports() {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(GABORSTAB_EXAMPLES))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += run_experiment(load_config(f)).report.dump(2);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const char* names[] = {"orthonormal baseline",  "tight painless frame", "certificate soundness",
                         "Kadec boundary",        "STFT Plancherel",      "Poisson summation",
                         "painless multiplier",   "improvement claim",    "B-spline recursion",
                         "determinism"};
  std::vector<Criterion> results;
  Json report;
  try {
    const auto first = run_suite();
    const auto second = run_suite();
    report = suite_report(first);
    const auto d1 = report.dump(2), d2 = suite_report(second).dump(2);
    const auto e1 = example_reports(), e2 = example_reports();
    results = first.criteria;
    Criterion det;
    det.pass = d1 == d2 && e1 == e2;
    det.detail = "suite report " + std::to_string(d1.size()) + " bytes " + (d1 == d2 ? "identical" : "differs") +
                 ", example reports " + std::to_string(e1.size()) + " bytes " + (e1 == e2 ? "identical" : "differs");
    results.push_back(det);
  } catch (const std::exception& e) {
    std::printf("FAIL suite aborted: %s\n", e.what());
    return 1;
  }

  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    all = all && results[i].pass;
    std::printf("%s %zu %s: %s\n", results[i].pass ? "PASS" : "FAIL", i + 1, names[i], results[i].detail.c_str());
  }
  if (argc > 1) std::ofstream(argv[1]) << report.dump(2) << '\n';
  return all ? 0 : 1;
}

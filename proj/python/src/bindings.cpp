#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "gaborstab/bounds.hpp"
#include "gaborstab/error.hpp"
#include "gaborstab/gabor.hpp"
#include "gaborstab/numerics.hpp"
#include "gaborstab/runner.hpp"
#include "gaborstab/serialize.hpp"
#include "gaborstab/stability.hpp"
#include "gaborstab/windows.hpp"

namespace py = pybind11;
using namespace gaborstab;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_python(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

IndexRange range(std::pair<int, int> r) { return {r.first, r.second}; }

OverflowPolicy overflow_policy(const std::string& s) {
  if (s == "reject") return OverflowPolicy::reject;
  if (s == "clip") return OverflowPolicy::clip;
  throw py::value_error("overflow must be 'reject' or 'clip'");
}

JitterTarget jitter_target(bool compact) { return compact ? JitterTarget::compact_support : JitterTarget::general; }

py::object run(const ExperimentConfig& cfg, const std::optional<std::string>& sweep_param,
               const std::optional<std::vector<double>>& values) {
  if (sweep_param.has_value() != values.has_value())
    throw py::value_error("sweep needs both a parameter and a list of values");
  const auto out = sweep_param ? run_sweep(cfg, *sweep_param, *values) : run_experiment(cfg);
  py::dict d;
  d["report"] = to_python(out.report);
  d["exit_code"] = out.exit_code;
  d["csv"] = out.csv;
  return std::move(d);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gabor frame bounds and timing-jitter stability certificates";
  m.attr("__version__") = GABORSTAB_VERSION;

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<Error> gabor_error(m, "GaborError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(config_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(gabor_error.ptr(), e.what());
    }
  });

  py::class_<Window>(m, "Window")
      .def_static("rect", &Window::rect)
      .def_static("bspline", &Window::bspline, py::arg("order"))
      .def_static("sinc", &Window::sinc, py::arg("band") = 1)
      .def("__call__", [](const Window& w, double x) { return w(x); })
      .def("fourier", &Window::fourier, py::arg("s"))
      .def_property_readonly("support", [](const Window& w) -> std::optional<std::pair<double, double>> {
        const auto s = w.support();
        if (!s) return std::nullopt;
        return std::make_pair(s->lo, s->hi);
      })
      .def_property_readonly("band_limit", &Window::band_limit)
      .def("describe", &Window::describe)
      .def("__repr__", [](const Window& w) { return "Window(" + w.describe() + ")"; });

  py::class_<FrameBounds>(m, "FrameBounds")
      .def_readonly("A", &FrameBounds::A)
      .def_readonly("B", &FrameBounds::B)
      .def_readonly("optimal", &FrameBounds::optimal)
      .def_property_readonly("provenance", [](const FrameBounds& b) { return std::string(to_string(b.provenance)); })
      .def("to_dict", [](const FrameBounds& b) { return to_python(to_json(b)); })
      .def("__repr__", [](const FrameBounds& b) {
        return "FrameBounds(A=" + std::to_string(b.A) + ", B=" + std::to_string(b.B) + ")";
      });

  m.def("frame_bounds", [](double A, double B) { return make_bounds(A, B, Provenance::painless, false); },
        py::arg("A"), py::arg("B"), "Explicit bounds, validated 0 < A <= B.");
  m.def("painless_bounds", &painless_bounds, py::arg("window"), py::arg("a"), py::arg("b"));
  m.def("fourier_side_bounds", &fourier_side_bounds, py::arg("window"), py::arg("a"), py::arg("b"),
        py::arg("trunc") = kDefaultFourierTrunc);
  m.def("fourier_side_exact", &fourier_side_exact, py::arg("window"), py::arg("a"));
  m.def("rect_bounds", &rect_bounds, py::arg("a"), py::arg("b"));

  py::class_<NhValue>(m, "NhValue")
      .def_readonly("value", &NhValue::value)
      .def_readonly("b", &NhValue::b)
      .def_readonly("tail_bound", &NhValue::tail_bound)
      .def_readonly("argmax", &NhValue::argmax)
      .def("to_dict", [](const NhValue& n) { return to_python(to_json(n)); });
  m.def("compute_N_h", [](const Window& w, double b) { return compute_N_h(w, b); }, py::arg("window"),
        py::arg("b"));
  m.def("bspline_bound_recursion", &bspline_bound_recursion, py::arg("A"), py::arg("B"), py::arg("a"), py::arg("b"),
        py::arg("c"), py::arg("N_h"), py::arg("p"));

  py::class_<JitterPattern>(m, "JitterPattern")
      .def(py::init<double>(), py::arg("bound") = 0.5)
      .def("set", &JitterPattern::set, py::arg("n"), py::arg("k"), py::arg("delta"))
      .def("set_column_constant", &JitterPattern::set_column_constant, py::arg("k"), py::arg("value"))
      .def("__call__", [](const JitterPattern& p, int n, int k) { return p(n, k); })
      .def("scaled", &JitterPattern::scaled, py::arg("factor"))
      .def_property_readonly("bound", &JitterPattern::bound)
      .def_property_readonly("max_abs", &JitterPattern::max_abs)
      .def_property_readonly("digest", &JitterPattern::digest)
      .def_property_readonly("entries", &JitterPattern::entries);

  m.def(
      "uniform_jitter",
      [](double bound, std::uint64_t seed, std::pair<int, int> n_range, std::pair<int, int> k_range, bool compact) {
        return generate_jitter(UniformRandomJitter{bound, seed, range(n_range), range(k_range)},
                               jitter_target(compact));
      },
      py::arg("bound"), py::arg("seed"), py::arg("n_range"), py::arg("k_range"), py::arg("compact") = false);
  m.def(
      "geometric_jitter",
      [](double peak, double ratio, std::vector<int> columns, bool compact) {
        return generate_jitter(GeometricJitter{peak, ratio, std::move(columns)}, jitter_target(compact));
      },
      py::arg("peak"), py::arg("ratio") = 0.5, py::arg("columns") = std::vector<int>{0}, py::arg("compact") = false);

  py::class_<StabilityCertificate>(m, "StabilityCertificate")
      .def_readonly("margin", &StabilityCertificate::margin)
      .def_readonly("threshold", &StabilityCertificate::threshold)
      .def_readonly("passed", &StabilityCertificate::passed)
      .def_readonly("perturbed", &StabilityCertificate::perturbed)
      .def_property_readonly("theorem", [](const StabilityCertificate& c) { return std::string(to_string(c.theorem)); })
      .def("to_dict", [](const StabilityCertificate& c) { return to_python(to_json(c)); });

  m.def("paley_wiener_certificate", &paley_wiener_certificate, py::arg("A"), py::arg("B"), py::arg("lam"),
        py::arg("mu"));
  m.def("certify_compact_support", &certify_compact_support, py::arg("window"), py::arg("a"), py::arg("b"),
        py::arg("bounds"), py::arg("pattern"));
  m.def("certify_bspline", &certify_bspline, py::arg("window"), py::arg("p"), py::arg("a"), py::arg("b"),
        py::arg("bounds_p"), py::arg("pattern"));
  m.def("certify_wiener_amalgam", &certify_wiener_amalgam, py::arg("window"), py::arg("a"), py::arg("b"),
        py::arg("bounds"), py::arg("pattern"));
  m.def("certify_bandlimited", &certify_bandlimited, py::arg("window"), py::arg("a"), py::arg("b"),
        py::arg("bounds"), py::arg("pattern"));
  m.def("certify_nsgf_overlap", &certify_nsgf_overlap, py::arg("window"), py::arg("a"), py::arg("b"),
        py::arg("column_deltas"));
  m.def(
      "kadec_constant",
      [](double delta, int M) {
        const auto k = kadec_constant(delta, M);
        py::dict d;
        d["value"] = k.value;
        d["factor"] = k.factor;
        d["guaranteed"] = k.guaranteed;
        return d;
      },
      py::arg("delta"), py::arg("M"));

  m.def(
      "empirical_frame_bounds",
      [](const Window& w, double a, double b, std::pair<int, int> n_range, std::pair<int, int> k_range,
         const std::optional<JitterPattern>& pattern, double x_min, double x_max, std::size_t n_points,
         const std::string& overflow, const std::string& domain, double half_width, double max_freq) {
        const auto lattice = make_lattice(a, b, range(n_range), range(k_range));
        const auto grid = GridSpec::make(x_min, x_max, n_points);
        const auto p = pattern.value_or(JitterPattern());
        DiscretizedSystem sys;
        if (domain == "time")
          sys = discretize(w, lattice, p, grid, overflow_policy(overflow));
        else if (domain == "frequency")
          sys = discretize_fourier(w, lattice, p, grid, overflow_policy(overflow));
        else
          throw py::value_error("domain must be 'time' or 'frequency'");
        TestSubspaceSpec spec;
        spec.half_width = half_width;
        spec.max_freq = max_freq;
        return to_python(to_json(empirical_frame_bounds(sys, spec)));
      },
      py::arg("window"), py::arg("a"), py::arg("b"), py::arg("n_range"), py::arg("k_range"),
      py::arg("pattern") = py::none(), py::arg("x_min") = -16.0, py::arg("x_max") = 16.0,
      py::arg("n_points") = 8192, py::arg("overflow") = "reject", py::arg("domain") = "time",
      py::arg("half_width") = 0.0, py::arg("max_freq") = 0.0,
      "Extremal eigenvalues of the discretized frame operator on an interior test subspace.");

  m.def(
      "run_config",
      [](const py::object& config, const std::optional<std::string>& base_dir, std::optional<std::uint64_t> seed,
         std::optional<std::string> sweep_param, std::optional<std::vector<double>> values) {
        Overrides o;
        o.seed = seed;
        const auto dir = base_dir ? std::filesystem::path(*base_dir) : std::filesystem::current_path();
        return run(parse_config(from_python(config), dir, o), sweep_param, values);
      },
      py::arg("config"), py::arg("base_dir") = py::none(), py::arg("seed") = py::none(),
      py::arg("sweep_param") = py::none(), py::arg("values") = py::none(),
      "Runs a config given as a dict; returns {report, exit_code, csv}.");
  m.def(
      "run_config_file",
      [](const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> sweep_param,
         std::optional<std::vector<double>> values) {
        Overrides o;
        o.seed = seed;
        return run(load_config(path, o), sweep_param, values);
      },
      py::arg("path"), py::arg("seed") = py::none(), py::arg("sweep_param") = py::none(),
      py::arg("values") = py::none());
}

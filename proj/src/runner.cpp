#include "gaborstab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gaborstab/bounds.hpp"
#include "gaborstab/error.hpp"
#include "gaborstab/stability.hpp"

#ifndef GABORSTAB_VERSION
#define GABORSTAB_VERSION "0.0.0"
#endif

namespace gaborstab {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError(what); }

double as_number(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_value(v.get<std::string>());
    } catch (const ConfigError&) {
    }
  }
  config_fail(where + ": expected a number");
}

double get_number(const Json& j, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    config_fail("missing required field '" + key + "'");
  }
  return as_number(j.at(key), "field '" + key + "'");
}

int get_int(const Json& j, const std::string& key, std::optional<int> fallback = std::nullopt) {
  const double v = get_number(j, key, fallback ? std::optional<double>(*fallback) : std::nullopt);
  if (v != std::floor(v) || std::abs(v) > 1e9) config_fail("field '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::string get_string(const Json& j, const std::string& key, std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    config_fail("missing required field '" + key + "'");
  }
  if (!j.at(key).is_string()) config_fail("field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

IndexRange get_range(const Json& j, const std::string& key, IndexRange fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) config_fail("field '" + key + "' must be [lo, hi]");
  IndexRange r{static_cast<int>(as_number(v[0], key)), static_cast<int>(as_number(v[1], key))};
  if (r.size() == 0) config_fail("field '" + key + "' is an empty range");
  return r;
}

std::map<int, double> get_int_map(const Json& j, const std::string& key) {
  std::map<int, double> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (!v.is_object()) config_fail("field '" + key + "' must be an object {index: value}");
  for (const auto& [k, val] : v.items()) {
    try {
      std::size_t used = 0;
      const int idx = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
      out[idx] = as_number(val, key);
    } catch (const std::logic_error&) {
      config_fail("field '" + key + "': key '" + k + "' is not an integer");
    }
  }
  return out;
}

Window parse_window(const Json& spec, const fs::path& base) {
  if (!spec.is_object()) config_fail("'window' must be an object");
  const auto kind = get_string(spec, "kind");
  Window w = Window::rect();
  if (kind == "rect") {
    w = Window::rect();
  } else if (kind == "bspline") {
    const int p = get_int(spec, "p");
    if (p < 1 || p > 16) config_fail("window.p must be in [1, 16]");
    w = Window::bspline(p);
  } else if (kind == "sinc") {
    const int band = get_int(spec, "band", 1);
    if (band < 1) config_fail("window.band must be a positive integer");
    w = Window::sinc(band);
  } else if (kind == "sampled") {
    fs::path file = get_string(spec, "file");
    if (file.is_relative()) file = base / file;
    if (!fs::exists(file)) config_fail("window file does not exist: " + file.string());
    try {
      w = load_window_csv(file);
    } catch (const Error& e) {
      config_fail(e.what());
    }
  } else {
    config_fail("unknown window kind '" + kind + "' (rect | bspline | sinc | sampled)");
  }
  if (spec.contains("band") && kind != "sinc") {
    const int band = get_int(spec, "band");
    if (band < 1) config_fail("window.band must be a positive integer");
    w = w.with_band_limit(band);
  }
  return w;
}

bool needs_compact_target(const std::vector<Json>& tasks) {
  for (const auto& t : tasks) {
    const auto type = t.value("type", std::string());
    if (type == "certify") {
      const auto th = t.value("theorem", std::string());
      if (th == "thm1-compact" || th == "cor-bspline") return true;
    }
    if (type == "sweep" && t.contains("tasks") && needs_compact_target(t.at("tasks").get<std::vector<Json>>()))
      return true;
  }
  return false;
}

Json normalize_task(const Json& t) {
  if (t.is_string()) {
    const auto s = t.get<std::string>();
    const auto colon = s.find(':');
    const auto head = s.substr(0, colon);
    if (colon == std::string::npos) return Json{{"type", s}};
    if (head == "certify") return Json{{"type", "certify"}, {"theorem", s.substr(colon + 1)}};
    if (head == "sweep") return Json{{"type", "sweep"}, {"param", s.substr(colon + 1)}};
    config_fail("unknown task '" + s + "'");
  }
  if (!t.is_object()) config_fail("each task must be an object or a string");
  return t;
}

void validate_task(const Json& t, bool nested) {
  const auto type = get_string(t, "type");
  if (type == "bounds") {
    const auto m = t.value("method", std::string("auto"));
    if (m != "auto" && m != "painless" && m != "fourier" && m != "rect" && m != "bspline-recursion")
      config_fail("bounds.method must be auto | painless | fourier | rect | bspline-recursion");
  } else if (type == "certify") {
    try {
      const auto th = theorem_from_string(get_string(t, "theorem"));
      if (th == Theorem::paley_wiener && (!t.contains("lambda") || !t.contains("mu")))
        config_fail("certify paley-wiener needs 'lambda' and 'mu'");
    } catch (const Error& e) {
      config_fail(e.what());
    }
    if (t.contains("expect")) {
      const auto e = get_string(t, "expect");
      if (e != "pass" && e != "fail") config_fail("certify.expect must be 'pass' or 'fail'");
    }
    if (t.contains("bounds")) {
      const auto& b = t.at("bounds");
      get_number(b, "A");
      get_number(b, "B");
    }
  } else if (type == "verify") {
    const auto d = t.value("domain", std::string("auto"));
    if (d != "auto" && d != "time" && d != "frequency") config_fail("verify.domain must be auto | time | frequency");
  } else if (type == "sweep") {
    if (nested) config_fail("sweep tasks cannot be nested");
    const auto param = get_string(t, "param");
    if (param != "jitter_amplitude" && param != "a" && param != "b" && param != "p")
      config_fail("sweep.param must be jitter_amplitude | a | b | p");
    if (!t.contains("values") || !t.at("values").is_array() || t.at("values").empty())
      config_fail("sweep needs a nonempty 'values' list");
    for (const auto& v : t.at("values")) as_number(v, "sweep.values");
    if (t.contains("tasks"))
      for (const auto& inner : t.at("tasks")) validate_task(normalize_task(inner), true);
  } else {
    config_fail("unknown task type '" + type + "' (bounds | certify | verify | sweep)");
  }
}

// --- execution ----------------------------------------------------------------

struct Context {
  Window window;
  double a;
  double b;
  IndexRange n_range;
  IndexRange k_range;
  JitterPattern pattern;
  std::optional<int> p;  // sweep override for the B-spline power
  const ExperimentConfig* cfg;
};

bool in_painless_regime(const Window& w, double a, double b) {
  const double c = w.support_length();
  return std::isfinite(c) && a <= c * (1 + 1e-12) && c <= (1.0 / b) * (1 + 1e-12);
}

// Only methods that give valid frame bounds for (w, a, b).
FrameBounds auto_bounds(const Window& w, double a, double b) {
  if (in_painless_regime(w, a, b)) return painless_bounds(w, a, b);
  if (fourier_side_exact(w, a)) return fourier_side_bounds(w, a, b);
  fail("no exact bound method applies (need a <= c <= 1/b, or h^ supported in a band M <= 1/a); "
       "pass explicit 'bounds' {A, B}");
}

FrameBounds explicit_bounds(const Json& j) {
  return make_bounds(get_number(j, "A"), get_number(j, "B"), Provenance::painless, false);
}

Json run_bounds(const Context& ctx, const Json& t) {
  const auto method = t.value("method", std::string("auto"));
  Json out;
  FrameBounds fb;
  if (method == "auto") {
    fb = auto_bounds(ctx.window, ctx.a, ctx.b);
  } else if (method == "painless") {
    fb = painless_bounds(ctx.window, ctx.a, ctx.b);
  } else if (method == "fourier") {
    fb = fourier_side_bounds(ctx.window, ctx.a, ctx.b, get_int(t, "trunc", kDefaultFourierTrunc));
    if (!fb.optimal)
      out["note"] = "formula value outside the Fourier-side painless regime; not a certified frame bound";
  } else if (method == "rect") {
    if (ctx.window.kind() != WindowKind::rect) fail("bounds method 'rect' needs the rect window");
    fb = rect_bounds(ctx.a, ctx.b);
  } else {
    const int p = ctx.p.value_or(get_int(t, "p", 2));
    const auto base = auto_bounds(ctx.window, ctx.a, ctx.b);
    const auto nh = compute_N_h(ctx.window, ctx.b, get_int(t, "trunc", kDefaultNhTrunc));
    fb = bspline_bound_recursion(base.A, base.B, ctx.a, ctx.b, ctx.window.support_length(), nh, p);
    out["base"] = to_json(base);
    out["N_h"] = to_json(nh);
    out["lattice_p"] = Json{{"a", number(p * ctx.a)}, {"b", number(ctx.b / p)}};
  }
  Json res = to_json(fb);
  for (auto& [k, v] : out.items()) res[k] = v;
  return res;
}

Json run_certify(const Context& ctx, const Json& t) {
  const auto th = theorem_from_string(get_string(t, "theorem"));
  const auto& w = ctx.window;
  const double a = ctx.a, b = ctx.b;
  StabilityCertificate cert;
  Json extra = Json::object();
  switch (th) {
    case Theorem::paley_wiener: {
      const auto fb = t.contains("bounds") ? explicit_bounds(t.at("bounds")) : auto_bounds(w, a, b);
      cert = paley_wiener_certificate(fb.A, fb.B, get_number(t, "lambda"), get_number(t, "mu"));
      extra["bounds"] = to_json(fb);
      break;
    }
    case Theorem::thm1_compact: {
      const auto fb = t.contains("bounds") ? explicit_bounds(t.at("bounds")) : auto_bounds(w, a, b);
      cert = certify_compact_support(w, a, b, fb, ctx.pattern);
      extra["bounds"] = to_json(fb);
      break;
    }
    case Theorem::cor_bspline: {
      const int p = ctx.p.value_or(get_int(t, "p", 2));
      FrameBounds fb;
      if (t.contains("bounds")) {
        fb = explicit_bounds(t.at("bounds"));
      } else {
        const auto base = auto_bounds(w, a, b);
        const auto nh = compute_N_h(w, b);
        fb = bspline_bound_recursion(base.A, base.B, a, b, w.support_length(), nh, p);
        extra["N_h"] = to_json(nh);
      }
      cert = certify_bspline(w, p, a, b, fb, ctx.pattern);
      extra["bounds"] = to_json(fb);
      break;
    }
    case Theorem::thm_wiener_amalgam: {
      const auto fb = t.contains("bounds") ? explicit_bounds(t.at("bounds")) : auto_bounds(w, a, b);
      cert = certify_wiener_amalgam(w, a, b, fb, ctx.pattern);
      extra["bounds"] = to_json(fb);
      break;
    }
    case Theorem::thm_bandlimited: {
      const auto fb = t.contains("bounds") ? explicit_bounds(t.at("bounds")) : auto_bounds(w, a, b);
      cert = certify_bandlimited(w, a, b, fb, ctx.pattern);
      extra["bounds"] = to_json(fb);
      break;
    }
    case Theorem::cor_nsgf_overlap: {
      auto deltas = get_int_map(t, "column_deltas");
      if (deltas.empty()) deltas = ctx.pattern.column_constants();
      if (deltas.empty()) fail("cor-nsgf-overlap needs column-constant jitter or 'column_deltas'");
      cert = certify_nsgf_overlap(w, a, b, deltas);
      break;
    }
  }
  Json res = to_json(cert);
  for (auto& [k, v] : extra.items()) res[k] = v;
  return res;
}

Json run_verify(const Context& ctx, const Json& t) {
  const auto& cfg = *ctx.cfg;
  const auto lattice = make_lattice(ctx.a, ctx.b, ctx.n_range, ctx.k_range);
  auto domain = t.value("domain", std::string("auto"));
  if (domain == "auto") domain = ctx.window.compact() ? "time" : "frequency";
  GridSpec grid = cfg.grid;
  if (t.contains("grid")) {
    const auto& g = t.at("grid");
    grid = GridSpec::make(get_number(g, "x_min", grid.x_min), get_number(g, "x_max", grid.x_max),
                          static_cast<std::size_t>(get_int(g, "n_points", static_cast<int>(grid.n_points))));
  }
  const auto sys = domain == "time" ? discretize(ctx.window, lattice, ctx.pattern, grid, cfg.overflow)
                                    : discretize_fourier(ctx.window, lattice, ctx.pattern, grid, cfg.overflow);
  TestSubspaceSpec spec;
  if (t.contains("subspace")) {
    const auto& s = t.at("subspace");
    if (s.contains("center")) {
      spec.center = get_number(s, "center");
      spec.center_set = true;
    }
    spec.half_width = get_number(s, "half_width", 0.0);
    spec.max_freq = get_number(s, "max_freq", 0.0);
  }
  Json res = to_json(empirical_frame_bounds(sys, spec));
  res["domain"] = domain;
  return res;
}

Json run_task(const Context& ctx, const Json& t) {
  const auto type = get_string(t, "type");
  if (type == "bounds") return run_bounds(ctx, t);
  if (type == "certify") return run_certify(ctx, t);
  if (type == "verify") return run_verify(ctx, t);
  fail("task type '" + type + "' cannot run here");
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

struct TaskRecord {
  Json entry;
  bool failed = false;
};

TaskRecord execute(const Context& ctx, const Json& t, std::size_t index, bool timing) {
  TaskRecord rec;
  rec.entry = Json{{"index", index}, {"type", t.value("type", std::string())}};
  if (t.contains("theorem")) rec.entry["theorem"] = t.at("theorem");
  const auto start = std::chrono::steady_clock::now();
  try {
    rec.entry["result"] = run_task(ctx, t);
    rec.entry["status"] = "ok";
    if (t.contains("expect")) {
      const bool want = t.at("expect") == "pass";
      const bool got = rec.entry["result"].value("passed", false);
      rec.entry["expect"] = t.at("expect");
      rec.entry["expectation_met"] = want == got;
      if (want != got) rec.failed = true;
    }
  } catch (const Error& e) {
    rec.entry["status"] = "error";
    rec.entry["error"] = Json{{"kind", kind_name(e.kind())}, {"message", e.what()}};
    rec.failed = true;
  } catch (const std::exception& e) {
    rec.entry["status"] = "error";
    rec.entry["error"] = Json{{"kind", "internal"}, {"message", e.what()}};
    rec.failed = true;
  }
  if (timing)
    rec.entry["elapsed_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_number(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

std::string csv_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

Context base_context(const ExperimentConfig& cfg) {
  return Context{cfg.window, cfg.lattice.a, cfg.lattice.b, cfg.lattice.n_range, cfg.lattice.k_range,
                 JitterPattern(), std::nullopt, &cfg};
}

// Applies one sweep value; errors here belong to the row.
Context sweep_context(const ExperimentConfig& cfg, const JitterPattern& pattern, const std::string& param,
                      double v) {
  Context ctx = base_context(cfg);
  ctx.pattern = pattern;
  if (param == "a") {
    ctx.a = v;
  } else if (param == "b") {
    ctx.b = v;
  } else if (param == "p") {
    if (v != std::floor(v) || v < 1 || v > 16) fail("sweep value for p must be an integer in [1, 16]");
    ctx.p = static_cast<int>(v);
    if (ctx.window.kind() == WindowKind::rect || ctx.window.kind() == WindowKind::bspline)
      ctx.window = Window::bspline(static_cast<int>(v));
  } else {
    require(std::isfinite(v) && v >= 0.0, "jitter amplitude must be >= 0");
    if (!(pattern.bound() > 0.0)) fail("jitter amplitude sweep needs a pattern with a positive declared bound");
    ctx.pattern = pattern.scaled(v / pattern.bound());
  }
  make_lattice(ctx.a, ctx.b, ctx.n_range, ctx.k_range);
  return ctx;
}

struct SweepResult {
  Json json;
  std::string csv;
  bool failed = false;
};

SweepResult sweep_impl(const ExperimentConfig& cfg, const JitterPattern& pattern, const std::string& param,
                       const std::vector<double>& values, const std::vector<Json>& tasks, bool timing) {
  SweepResult out;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "param,value,task,type,theorem,status,A,B,margin,threshold,passed,A_prime,B_prime,lambda_min,lambda_max,error\n";
  for (double v : values) {
    std::optional<Context> ctx;
    std::string row_error;
    try {
      ctx = sweep_context(cfg, pattern, param, v);
    } catch (const std::exception& e) {
      row_error = e.what();
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      TaskRecord rec;
      if (ctx) {
        rec = execute(*ctx, tasks[i], i, timing);
      } else {
        rec.entry = Json{{"index", i}, {"type", tasks[i].value("type", std::string())}, {"status", "error"},
                         {"error", Json{{"kind", "precondition"}, {"message", row_error}}}};
        rec.failed = true;
      }
      out.failed = out.failed || rec.failed;
      rec.entry["param"] = param;
      rec.entry["value"] = number(v);
      const Json res = rec.entry.value("result", Json::object());
      auto field = [&](const char* k) { return csv_number(res.value(k, Json(nullptr))); };
      csv << param << ',' << csv_number(v) << ',' << i << ',' << rec.entry["type"].get<std::string>() << ','
          << (tasks[i].contains("theorem") ? tasks[i].at("theorem").get<std::string>() : "") << ','
          << rec.entry["status"].get<std::string>() << ',' << field("A") << ',' << field("B") << ','
          << field("margin") << ',' << field("threshold") << ',' << field("passed") << ',' << field("A_prime")
          << ',' << field("B_prime") << ',' << field("lambda_min") << ',' << field("lambda_max") << ','
          << (rec.entry.contains("error") ? csv_text(rec.entry["error"]["message"].get<std::string>()) : "")
          << '\n';
      rows.push_back(rec.entry);
    }
  }
  Json vals = Json::array();
  for (double v : values) vals.push_back(number(v));
  out.csv = csv.str();
  out.json = Json{{"param", param}, {"values", vals}, {"rows", rows}, {"csv", out.csv}};
  return out;
}

Json report_header(const ExperimentConfig& cfg, const JitterPattern& pattern) {
  return Json{{"schema_version", kSchemaVersion},
              {"tool_version", GABORSTAB_VERSION},
              {"config", cfg.raw},
              {"effective",
               Json{{"seed", cfg.seed},
                    {"window", cfg.window.describe()},
                    {"lattice", Json{{"a", number(cfg.lattice.a)},
                                     {"b", number(cfg.lattice.b)},
                                     {"n_range", to_json(cfg.lattice.n_range)},
                                     {"k_range", to_json(cfg.lattice.k_range)}}},
                    {"grid", to_json(cfg.grid)},
                    {"overflow", cfg.overflow == OverflowPolicy::reject ? "reject" : "clip"},
                    {"jitter", Json{{"digest", hex64(pattern.digest())},
                                    {"bound", number(pattern.bound())},
                                    {"n_extent", to_string(pattern.n_extent())},
                                    {"entries", pattern.entries().size()},
                                    {"max_abs", number(pattern.max_abs())}}}}}};
}

std::vector<Json> plain_tasks(const std::vector<Json>& tasks) {
  std::vector<Json> out;
  for (const auto& t : tasks)
    if (t.value("type", std::string()) != "sweep") out.push_back(t);
  return out;
}

}  // namespace

double parse_value(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) throw ConfigError("empty value");
  auto parse_plain = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + text + "'");
    }
    if (used != part.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + text + "'");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_plain(s);
  const double num = parse_plain(s.substr(0, slash));
  const double den = parse_plain(s.substr(slash + 1));
  if (den == 0.0) throw ConfigError("division by zero in '" + text + "'");
  return num / den;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_value(item));
  }
  if (out.empty()) throw ConfigError("sweep value list is empty");
  return out;
}

ExperimentConfig parse_config(const Json& j, const fs::path& base_dir, const Overrides& o) {
  if (!j.is_object()) config_fail("config must be a JSON object");
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.base_dir = base_dir;

  if (!j.contains("window")) config_fail("missing required field 'window'");
  cfg.window_spec = j.at("window");
  cfg.window = parse_window(cfg.window_spec, base_dir);

  if (!j.contains("lattice")) config_fail("missing required field 'lattice'");
  const auto& L = j.at("lattice");
  try {
    cfg.lattice = make_lattice(get_number(L, "a"), get_number(L, "b"), get_range(L, "n_range", {-8, 8}),
                               get_range(L, "k_range", {-8, 8}));
  } catch (const Error& e) {
    config_fail(std::string("lattice: ") + e.what());
  }

  const Json g = j.value("grid", Json::object());
  try {
    cfg.grid = GridSpec::make(get_number(g, "x_min", -16.0), get_number(g, "x_max", 16.0),
                              o.grid_points ? *o.grid_points
                                            : static_cast<std::size_t>(get_int(g, "n_points", 8192)));
  } catch (const Error& e) {
    config_fail(std::string("grid: ") + e.what());
  }
  const auto overflow = g.value("overflow", std::string("reject"));
  if (overflow == "reject")
    cfg.overflow = OverflowPolicy::reject;
  else if (overflow == "clip")
    cfg.overflow = OverflowPolicy::clip;
  else
    config_fail("grid.overflow must be 'reject' or 'clip'");

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) config_fail("seed must be a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (o.seed) cfg.seed = *o.seed;

  if (!j.contains("tasks") || !j.at("tasks").is_array() || j.at("tasks").empty())
    config_fail("'tasks' must be a nonempty list");
  for (const auto& t : j.at("tasks")) {
    auto norm = normalize_task(t);
    validate_task(norm, false);
    if (norm.contains("tasks"))
      for (auto& inner : norm.at("tasks")) inner = normalize_task(inner);
    cfg.tasks.push_back(norm);
  }

  cfg.jitter_spec = j.value("jitter", Json{{"shape", "none"}});
  if (j.contains("output")) {
    fs::path out = get_string(j, "output");
    cfg.output = out.is_relative() ? base_dir / out : out;
  }
  if (o.output) cfg.output = *o.output;

  try {
    build_jitter(cfg);
  } catch (const Error& e) {
    config_fail(std::string("jitter: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, const Overrides& o) {
  std::ifstream in(path);
  if (!in) config_fail("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    config_fail(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path(), o);
}

JitterPattern build_jitter(const ExperimentConfig& cfg) {
  const auto& s = cfg.jitter_spec;
  if (!s.is_object()) config_fail("'jitter' must be an object");
  const auto shape = get_string(s, "shape", std::string("none"));
  const auto target = needs_compact_target(cfg.tasks) ? JitterTarget::compact_support : JitterTarget::general;
  if (shape == "none") return JitterPattern(0.0);
  if (shape == "uniform") {
    UniformRandomJitter u;
    u.bound = get_number(s, "bound");
    u.seed = s.contains("seed") ? s.at("seed").get<std::uint64_t>() : cfg.seed;
    u.n_range = get_range(s, "n_range", cfg.lattice.n_range);
    u.k_range = get_range(s, "k_range", cfg.lattice.k_range);
    return generate_jitter(u, target);
  }
  if (shape == "geometric") {
    GeometricJitter gj;
    gj.peak = get_number(s, "peak");
    gj.ratio = get_number(s, "ratio", 0.5);
    if (s.contains("columns")) {
      gj.columns.clear();
      for (const auto& c : s.at("columns")) gj.columns.push_back(static_cast<int>(as_number(c, "jitter.columns")));
    }
    return generate_jitter(gj, target);
  }
  if (shape == "column") {
    ColumnConstantJitter cj;
    cj.d = get_int_map(s, "d");
    if (s.contains("value")) {
      const double v = get_number(s, "value");
      const auto r = get_range(s, "columns", cfg.lattice.k_range);
      for (int k = r.lo; k <= r.hi; ++k) cj.d[k] = v;
    }
    return generate_jitter(cj, target);
  }
  if (shape == "separable") {
    SeparableJitter sj;
    sj.row = get_int_map(s, "row");
    sj.col = get_int_map(s, "col");
    return generate_jitter(sj, target);
  }
  if (shape == "file") {
    fs::path file = get_string(s, "path");
    if (file.is_relative()) file = cfg.base_dir / file;
    if (!fs::exists(file)) config_fail("jitter file does not exist: " + file.string());
    auto p = load_jitter_csv(file, get_number(s, "bound", 0.5));
    if (target == JitterTarget::compact_support && !(p.bound() < 0.5))
      fail("jitter bound must be < 1/2 for compact-support certificates");
    return p;
  }
  config_fail("unknown jitter shape '" + shape + "' (none | uniform | geometric | column | separable | file)");
}

RunOutcome run_experiment(const ExperimentConfig& cfg, bool timing) {
  const auto pattern = build_jitter(cfg);
  Context ctx = base_context(cfg);
  ctx.pattern = pattern;

  RunOutcome out;
  out.report = report_header(cfg, pattern);
  Json entries = Json::array();
  std::size_t errors = 0, unmet = 0;
  for (std::size_t i = 0; i < cfg.tasks.size(); ++i) {
    const auto& t = cfg.tasks[i];
    if (t.at("type") == "sweep") {
      std::vector<double> values;
      for (const auto& v : t.at("values")) values.push_back(as_number(v, "sweep.values"));
      std::vector<Json> inner;
      if (t.contains("tasks")) {
        for (const auto& x : t.at("tasks")) inner.push_back(normalize_task(x));
      } else {
        inner = plain_tasks(cfg.tasks);
      }
      auto sw = sweep_impl(cfg, pattern, t.at("param").get<std::string>(), values, inner, timing);
      if (!out.csv.empty()) out.csv += '\n';
      out.csv += sw.csv;
      if (sw.failed) ++errors;
      entries.push_back(Json{{"index", i}, {"type", "sweep"}, {"status", sw.failed ? "partial" : "ok"}, {"result", sw.json}});
      continue;
    }
    auto rec = execute(ctx, t, i, timing);
    if (rec.entry["status"] == "error")
      ++errors;
    else if (rec.failed)
      ++unmet;
    entries.push_back(rec.entry);
  }
  out.exit_code = (errors || unmet) ? 1 : 0;
  out.report["tasks"] = entries;
  out.report["summary"] = Json{{"tasks", cfg.tasks.size()}, {"errors", errors}, {"unmet_expectations", unmet}};
  out.report["exit_code"] = out.exit_code;
  return out;
}

RunOutcome run_sweep(const ExperimentConfig& cfg, const std::string& param, const std::vector<double>& values,
                     bool timing) {
  if (values.empty()) throw ConfigError("sweep value list is empty");
  if (param != "jitter_amplitude" && param != "a" && param != "b" && param != "p")
    throw ConfigError("sweep param must be jitter_amplitude | a | b | p");
  const auto tasks = plain_tasks(cfg.tasks);
  if (tasks.empty()) throw ConfigError("config has no non-sweep tasks to sweep over");
  const auto pattern = build_jitter(cfg);

  RunOutcome out;
  out.report = report_header(cfg, pattern);
  auto sw = sweep_impl(cfg, pattern, param, values, tasks, timing);
  out.csv = sw.csv;
  out.exit_code = sw.failed ? 1 : 0;
  out.report["sweep"] = sw.json;
  out.report["exit_code"] = out.exit_code;
  return out;
}

}  // namespace gaborstab

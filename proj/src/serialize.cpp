#include "gaborstab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace gaborstab {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const GridSpec& g) {
  return Json{{"x_min", number(g.x_min)}, {"x_max", number(g.x_max)}, {"n_points", g.n_points}, {"dx", number(g.dx())}};
}

Json to_json(const IndexRange& r) { return Json::array({r.lo, r.hi}); }

Json to_json(const FrameBounds& b) {
  return Json{{"A", number(b.A)}, {"B", number(b.B)}, {"provenance", to_string(b.provenance)}, {"optimal", b.optimal}};
}

Json to_json(const NhValue& n) {
  return Json{{"value", number(n.value)},       {"b", number(n.b)},
              {"convention", to_string(n.convention)}, {"truncation", n.truncation},
              {"tail_bound", number(n.tail_bound)}, {"argmax", number(n.argmax)}};
}

Json to_json(const StabilityCertificate& c) {
  Json j{{"theorem", to_string(c.theorem)},
         {"margin", number(c.margin)},
         {"threshold", number(c.threshold)},
         {"passed", c.passed},
         {"A_prime", c.perturbed ? number(c.perturbed->A) : Json(nullptr)},
         {"B_prime", c.perturbed ? number(c.perturbed->B) : Json(nullptr)},
         {"inputs_digest", hex64(c.inputs_digest)}};
  if (!c.extras.empty()) {
    Json extras = Json::object();
    for (const auto& [k, v] : c.extras) extras[k] = number(v);
    j["details"] = extras;
  }
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

Json to_json(const EmpiricalBounds& e) {
  Json residuals = Json::array();
  for (double r : e.residuals) residuals.push_back(number(r));
  return Json{{"lambda_min", number(e.lambda_min)},
              {"lambda_max", number(e.lambda_max)},
              {"iters", e.iters},
              {"residuals", residuals},
              {"grid", to_json(e.grid)},
              {"truncation", Json{{"n_range", to_json(e.n_range)}, {"k_range", to_json(e.k_range)},
                                  {"clipped_atoms", e.clipped}, {"dropped_atoms", e.dropped},
                                  {"loss_bound", number(e.loss_bound)}}},
              {"subspace", Json{{"center", number(e.center)}, {"half_width", number(e.half_width)},
                                {"max_freq", number(e.max_freq)}, {"dimension", e.dimension}}}};
}

Json to_json(const PainlessCheck& p) {
  Json residuals = Json::array();
  for (double r : p.residuals) residuals.push_back(number(r));
  return Json{{"residuals", residuals},
              {"max_residual", number(p.max_residual)},
              {"multiplier_min", number(p.multiplier_min)},
              {"multiplier_max", number(p.multiplier_max)},
              {"period", p.period}};
}

Json to_json(const PoissonCheck& p) {
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    Json row{{"y", number(r.y)},
             {"lhs", number(r.lhs)},
             {"tail", number(r.tail)},
             {"rhs_general", number(r.rhs_general)},
             {"residual_general", number(r.residual_general)}};
    if (r.rhs_unit) row["rhs_unit"] = number(*r.rhs_unit);
    if (r.residual_unit) row["residual_unit"] = number(*r.residual_unit);
    rows.push_back(row);
  }
  return Json{{"tail_exact", p.tail_exact}, {"truncation", p.truncation}, {"rows", rows}};
}

Json to_json(const std::vector<SamplingRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows)
    out.push_back(Json{{"t", number(r.t)}, {"lhs", number(r.lhs)}, {"rhs", number(r.rhs)}, {"residual", number(r.residual)}});
  return out;
}

}  // namespace gaborstab

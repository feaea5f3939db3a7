#pragma once

#include <nlohmann/json.hpp>

#include "gaborstab/bounds.hpp"
#include "gaborstab/grid.hpp"
#include "gaborstab/numerics.hpp"
#include "gaborstab/stability.hpp"

namespace gaborstab {

using Json = nlohmann::ordered_json;

Json to_json(const GridSpec& g);
Json to_json(const IndexRange& r);
Json to_json(const FrameBounds& b);                 // {A, B, provenance, optimal}
Json to_json(const NhValue& n);
Json to_json(const StabilityCertificate& c);        // {theorem, margin, threshold, passed, A_prime, B_prime, inputs_digest, ...}
Json to_json(const EmpiricalBounds& e);             // {lambda_min, lambda_max, iters, residuals, grid, truncation, ...}
Json to_json(const PainlessCheck& p);
Json to_json(const PoissonCheck& p);
Json to_json(const std::vector<SamplingRow>& rows);

// Finite doubles as numbers; NaN and infinities as the strings "nan", "inf", "-inf".
Json number(double v);

}  // namespace gaborstab

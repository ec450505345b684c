#pragma once

#include <json.hpp>

#include "mot/analysis.hpp"
#include "mot/market.hpp"
#include "mot/measure.hpp"
#include "mot/mot.hpp"

namespace mot {

using Json = nlohmann::ordered_json;

Json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const Json& j);

Json to_json(const CallQuoteSurface& s);
CallQuoteSurface surface_from_json(const Json& j);

Json to_json(const RepairReport& r);
Json to_json(const std::vector<Violation>& violations);

/// Schema "mot-solution/1": objective, sense, nonzero coupling entries as
/// [[k1,...,kn], p], and the dual arrays.
Json to_json(const MotSolution& sol);

Json to_json(const ImprovementReport& r);
Json to_json(const SweepResult& r);

/// Serialization with doubles at 17 significant digits; byte-identical for
/// identical inputs.
std::string dump_json(const Json& j);

}  // namespace mot

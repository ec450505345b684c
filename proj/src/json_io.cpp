#include "mot/json_io.hpp"

namespace mot {

Json to_json(const DiscreteMeasure& m) {
    return Json{{"atoms", m.atoms}, {"weights", m.weights}};
}

DiscreteMeasure measure_from_json(const Json& j) {
    return DiscreteMeasure::make(j.at("atoms").get<std::vector<double>>(),
                                 j.at("weights").get<std::vector<double>>());
}

Json to_json(const CallQuoteSurface& s) {
    Json maturities = Json::array();
    for (const auto& m : s.maturities) {
        maturities.push_back(
            Json{{"maturity", m.maturity}, {"strikes", m.strikes}, {"prices", m.prices}});
    }
    return Json{{"spot", s.spot}, {"maturities", maturities}};
}

CallQuoteSurface surface_from_json(const Json& j) {
    CallQuoteSurface s;
    s.spot = j.at("spot").get<double>();
    for (const auto& m : j.at("maturities")) {
        MaturityQuotes q;
        q.maturity = m.at("maturity").get<double>();
        q.strikes = m.at("strikes").get<std::vector<double>>();
        q.prices = m.at("prices").get<std::vector<double>>();
        s.maturities.push_back(std::move(q));
    }
    return s;
}

Json to_json(const RepairReport& r) {
    return Json{{"original", to_json(r.original)},
                {"repaired", to_json(r.repaired)},
                {"l1_adjustment", r.l1_adjustment},
                {"deltas", r.deltas}};
}

Json to_json(const std::vector<Violation>& violations) {
    Json arr = Json::array();
    for (const auto& v : violations) {
        arr.push_back(Json{{"kind", to_string(v.kind)},
                           {"maturity", v.maturity},
                           {"strike", v.strike},
                           {"magnitude", v.magnitude},
                           {"message", v.message}});
    }
    return arr;
}

Json to_json(const MotSolution& sol) {
    Json coupling = Json::array();
    for (const auto& e : sol.coupling) {
        coupling.push_back(Json::array({e.index, e.probability}));
    }
    return Json{{"schema", "mot-solution/1"},
                {"objective", sol.objective},
                {"sense", sol.dual.sense == Sense::minimize ? "min" : "max"},
                {"shape", sol.shape},
                {"coupling", coupling},
                {"dual", Json{{"u", sol.dual.u}, {"delta", sol.dual.delta}}},
                {"certificate_value", sol.certificate_value},
                {"lp",
                 Json{{"iterations", sol.lp_iterations},
                      {"duality_gap", sol.duality_gap},
                      {"max_marginal_residual", sol.max_marginal_residual},
                      {"max_martingale_residual", sol.max_martingale_residual},
                      {"max_subhedge_violation", sol.max_subhedge_violation}}}};
}

Json to_json(const ImprovementReport& r) {
    return Json{{"payoff", r.payoff},
                {"lower_13", r.lower_13},
                {"lower_123", r.lower_123},
                {"upper_123", r.upper_123},
                {"upper_13", r.upper_13},
                {"rel_lower", r.rel_lower},
                {"rel_upper", r.rel_upper},
                {"rel_lower_is_absolute", r.rel_lower_is_absolute},
                {"rel_upper_is_absolute", r.rel_upper_is_absolute}};
}

Json to_json(const SweepResult& r) {
    Json arr = Json::array();
    for (const auto& e : r.entries) {
        arr.push_back(Json{{"included", e.included}, {"lower", e.lower}, {"upper", e.upper}});
    }
    return Json{{"entries", arr}};
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mot

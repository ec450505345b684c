#include "mot/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

#include "mot/lp.hpp"

namespace mot {

namespace {

std::string quote_label(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_shape(const CallQuoteSurface& s) {
    if (s.maturities.empty()) throw std::invalid_argument("surface has no maturities");
    for (std::size_t i = 0; i < s.maturities.size(); ++i) {
        const auto& m = s.maturities[i];
        if (m.strikes.empty() || m.strikes.size() != m.prices.size()) {
            throw std::invalid_argument("maturity " + std::to_string(i) +
                                        ": empty or mismatched strike/price arrays");
        }
        if (i > 0 && !(s.maturities[i - 1].maturity < m.maturity)) {
            throw std::invalid_argument("maturities must be strictly increasing");
        }
    }
}

// Pairs of (index in a, index in b) for strikes present in both grids.
std::vector<std::pair<int, int>> shared_strikes(const std::vector<double>& a,
                                                const std::vector<double>& b) {
    std::vector<std::pair<int, int>> out;
    std::size_t jb = 0;
    for (std::size_t ja = 0; ja < a.size(); ++ja) {
        while (jb < b.size() && b[jb] < a[ja] - 1e-9 * (1.0 + std::abs(a[ja]))) ++jb;
        if (jb < b.size() && std::abs(b[jb] - a[ja]) <= 1e-9 * (1.0 + std::abs(a[ja]))) {
            out.push_back({static_cast<int>(ja), static_cast<int>(jb)});
        }
    }
    return out;
}

}  // namespace

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::strike_grid: return "strike_grid";
        case ViolationKind::spot_anchor: return "spot_anchor";
        case ViolationKind::monotonicity: return "monotonicity";
        case ViolationKind::convexity: return "convexity";
        case ViolationKind::slope_bound: return "slope_bound";
        case ViolationKind::terminal_price: return "terminal_price";
        case ViolationKind::calendar: return "calendar";
    }
    return "unknown";
}

std::vector<Violation> validate(const CallQuoteSurface& surface, double tol) {
    check_shape(surface);
    std::vector<Violation> out;
    auto add = [&](ViolationKind kind, int i, int j, double mag, std::string msg) {
        out.push_back({kind, i, j, mag, std::move(msg)});
    };

    for (std::size_t i = 0; i < surface.maturities.size(); ++i) {
        const auto& m = surface.maturities[i];
        const int mi = static_cast<int>(i);
        const auto& K = m.strikes;
        const auto& P = m.prices;
        const int last = static_cast<int>(K.size()) - 1;

        if (std::abs(K[0]) > tol) {
            add(ViolationKind::strike_grid, mi, 0, std::abs(K[0]),
                "first strike must be 0 at maturity " + std::to_string(m.maturity));
        }
        for (int j = 0; j < last; ++j) {
            if (!(K[static_cast<std::size_t>(j)] < K[static_cast<std::size_t>(j) + 1])) {
                add(ViolationKind::strike_grid, mi, j + 1, 0.0,
                    "strikes not strictly increasing at " + quote_label(mi, j + 1));
            }
        }
        if (std::abs(P[0] - surface.spot) > tol) {
            add(ViolationKind::spot_anchor, mi, 0, std::abs(P[0] - surface.spot),
                "price at strike 0 must equal the spot at " + quote_label(mi, 0));
        }
        for (int j = 0; j < last; ++j) {
            const double rise = P[static_cast<std::size_t>(j) + 1] - P[static_cast<std::size_t>(j)];
            if (rise > tol) {
                add(ViolationKind::monotonicity, mi, j + 1, rise,
                    "prices increase in strike at " + quote_label(mi, j + 1));
            }
        }
        if (std::abs(P[static_cast<std::size_t>(last)]) > tol) {
            add(ViolationKind::terminal_price, mi, last, std::abs(P[static_cast<std::size_t>(last)]),
                "terminal price must be 0 at " + quote_label(mi, last));
        }
        if (last >= 1) {
            // slope at the origin bounded below by -1
            const double breach = (P[0] - P[1]) - (K[1] - K[0]);
            if (breach > tol) {
                add(ViolationKind::slope_bound, mi, 0, breach,
                    "initial slope below -1 at " + quote_label(mi, 0));
            }
        }
        for (int j = 1; j < last; ++j) {
            // price above the chord of its neighbours breaks convexity
            const std::size_t ju = static_cast<std::size_t>(j);
            const double w = (K[ju] - K[ju - 1]) / (K[ju + 1] - K[ju - 1]);
            const double chord = P[ju - 1] + w * (P[ju + 1] - P[ju - 1]);
            if (P[ju] - chord > tol) {
                add(ViolationKind::convexity, mi, j, P[ju] - chord,
                    "price above neighbour chord at " + quote_label(mi, j));
            }
        }
    }

    for (std::size_t i = 0; i + 1 < surface.maturities.size(); ++i) {
        const auto& a = surface.maturities[i];
        const auto& b = surface.maturities[i + 1];
        for (const auto& [ja, jb] : shared_strikes(a.strikes, b.strikes)) {
            const double drop = a.prices[static_cast<std::size_t>(ja)] -
                                b.prices[static_cast<std::size_t>(jb)];
            if (drop > tol) {
                out.push_back({ViolationKind::calendar, static_cast<int>(i), ja, drop,
                               "calendar ordering violated at strike " +
                                   std::to_string(a.strikes[static_cast<std::size_t>(ja)]) +
                                   " between maturities " + std::to_string(i) + " and " +
                                   std::to_string(i + 1)});
            }
        }
    }
    return out;
}

RepairReport repair_l1(const CallQuoteSurface& surface) {
    check_shape(surface);
    for (std::size_t i = 0; i < surface.maturities.size(); ++i) {
        const auto& K = surface.maturities[i].strikes;
        if (std::abs(K[0]) > 1e-8) {
            throw std::invalid_argument("repair_l1: maturity " + std::to_string(i) +
                                        " must quote strike 0");
        }
        for (std::size_t j = 0; j + 1 < K.size(); ++j) {
            if (!(K[j] < K[j + 1])) {
                throw std::invalid_argument("repair_l1: strikes not strictly increasing at maturity " +
                                            std::to_string(i));
            }
        }
    }
    // One (p, n) pair per quote; repaired price v_ij = P_ij + p_ij - n_ij.
    LinearProgram lp;
    lp.sense = Sense::minimize;
    std::vector<std::vector<int>> var(surface.maturities.size());
    for (std::size_t i = 0; i < surface.maturities.size(); ++i) {
        for (std::size_t j = 0; j < surface.maturities[i].strikes.size(); ++j) {
            var[i].push_back(lp.add_variable(1.0));  // p
            lp.add_variable(1.0);                    // n, at var[i][j] + 1
        }
    }
    // Adds the row  sum_k coeff_k * v_{i,j_k}  rel  rhs  expressed in (p,n).
    auto add_price_row = [&](Relation rel, double rhs,
                             std::initializer_list<std::pair<std::pair<int, int>, double>> terms) {
        double shift = 0.0;
        for (const auto& [idx, coeff] : terms) {
            shift += coeff * surface.maturities[static_cast<std::size_t>(idx.first)]
                                 .prices[static_cast<std::size_t>(idx.second)];
        }
        const int row = lp.add_row(rel, rhs - shift);
        for (const auto& [idx, coeff] : terms) {
            const int base = var[static_cast<std::size_t>(idx.first)][static_cast<std::size_t>(idx.second)];
            lp.add_entry(row, base, coeff);
            lp.add_entry(row, base + 1, -coeff);
        }
    };

    for (std::size_t i = 0; i < surface.maturities.size(); ++i) {
        const auto& K = surface.maturities[i].strikes;
        const int mi = static_cast<int>(i);
        const int last = static_cast<int>(K.size()) - 1;
        add_price_row(Relation::equal, surface.spot, {{{mi, 0}, 1.0}});
        add_price_row(Relation::equal, 0.0, {{{mi, last}, 1.0}});
        for (int j = 0; j < last; ++j) {
            add_price_row(Relation::less_equal, 0.0, {{{mi, j + 1}, 1.0}, {{mi, j}, -1.0}});
        }
        if (last >= 1) {
            add_price_row(Relation::greater_equal, -(K[1] - K[0]),
                          {{{mi, 1}, 1.0}, {{mi, 0}, -1.0}});
        }
        for (int j = 1; j < last; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            const double dl = K[ju] - K[ju - 1];
            const double dr = K[ju + 1] - K[ju];
            add_price_row(Relation::greater_equal, 0.0,
                          {{{mi, j - 1}, dr}, {{mi, j}, -(dl + dr)}, {{mi, j + 1}, dl}});
        }
    }
    for (std::size_t i = 0; i + 1 < surface.maturities.size(); ++i) {
        for (const auto& [ja, jb] :
             shared_strikes(surface.maturities[i].strikes, surface.maturities[i + 1].strikes)) {
            add_price_row(Relation::greater_equal, 0.0,
                          {{{static_cast<int>(i) + 1, jb}, 1.0}, {{static_cast<int>(i), ja}, -1.0}});
        }
    }

    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::optimal) {
        throw std::runtime_error("internal error: repair LP is infeasible or unbounded");
    }

    RepairReport report;
    report.original = surface;
    report.repaired = surface;
    report.deltas.resize(surface.maturities.size());
    for (std::size_t i = 0; i < surface.maturities.size(); ++i) {
        report.deltas[i].assign(surface.maturities[i].strikes.size(), 0.0);
        for (std::size_t j = 0; j < surface.maturities[i].strikes.size(); ++j) {
            const int base = var[i][j];
            const double d = sol.primal[static_cast<std::size_t>(base)] -
                             sol.primal[static_cast<std::size_t>(base) + 1];
            report.deltas[i][j] = d;
            report.repaired.maturities[i].prices[j] += d;
            report.l1_adjustment += std::abs(d);
        }
    }
    return report;
}

std::vector<DiscreteMeasure> implied_marginals(const CallQuoteSurface& surface) {
    auto violations = validate(surface);
    if (!violations.empty()) {
        std::string msg = "surface fails validation: " + violations.front().message;
        if (violations.size() > 1) {
            msg += " (+" + std::to_string(violations.size() - 1) + " more)";
        }
        throw ValidationError(std::move(msg), std::move(violations));
    }

    std::vector<DiscreteMeasure> out;
    out.reserve(surface.maturities.size());
    for (const auto& m : surface.maturities) {
        const auto& K = m.strikes;
        const auto& P = m.prices;
        const std::size_t count = K.size();
        std::vector<double> weights(count);
        for (std::size_t j = 0; j < count; ++j) {
            const double slope_right =
                j + 1 < count ? (P[j + 1] - P[j]) / (K[j + 1] - K[j]) : 0.0;
            const double slope_left = j > 0 ? (P[j] - P[j - 1]) / (K[j] - K[j - 1]) : -1.0;
            weights[j] = std::max(slope_right - slope_left, 0.0);
        }
        out.push_back(DiscreteMeasure::make(K, std::move(weights)));
    }
    return out;
}

IngestResult read_quotes_csv(std::istream& in, std::optional<double> spot) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty quote file");
    auto strip = [](std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(),
                               [](unsigned char c) { return std::isspace(c) != 0; }),
                s.end());
        return s;
    };
    if (strip(line) != "maturity,strike,mid") {
        throw ParseError("expected header 'maturity,strike,mid', got '" + line + "'");
    }

    std::map<double, std::map<double, double>> quotes;  // maturity -> strike -> mid
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        std::istringstream row(line);
        std::string f1, f2, f3;
        if (!std::getline(row, f1, ',') || !std::getline(row, f2, ',') || !std::getline(row, f3)) {
            throw ParseError("line " + std::to_string(lineno) + ": expected 3 comma-separated fields");
        }
        try {
            const double t = std::stod(strip(f1));
            const double k = std::stod(strip(f2));
            const double p = std::stod(strip(f3));
            if (!std::isfinite(t) || !std::isfinite(k) || !std::isfinite(p) || t <= 0.0 || k < 0.0) {
                throw ParseError("line " + std::to_string(lineno) + ": bad quote values");
            }
            quotes[t][k] = p;
        } catch (const std::invalid_argument&) {
            throw ParseError("line " + std::to_string(lineno) + ": unparseable number");
        } catch (const std::out_of_range&) {
            throw ParseError("line " + std::to_string(lineno) + ": number out of range");
        }
    }
    if (quotes.empty()) throw ParseError("quote file contains no data rows");

    if (!spot) {
        for (const auto& [t, by_strike] : quotes) {
            const auto it = by_strike.find(0.0);
            if (it != by_strike.end()) {
                spot = it->second;
                break;
            }
        }
        if (!spot) throw ParseError("no strike-0 quote found and no spot supplied");
    }

    IngestResult result;
    result.surface.spot = *spot;
    char note[160];
    for (const auto& [t, by_strike] : quotes) {
        MaturityQuotes m;
        m.maturity = t;
        if (by_strike.find(0.0) == by_strike.end()) {
            m.strikes.push_back(0.0);
            m.prices.push_back(*spot);
            std::snprintf(note, sizeof(note), "maturity %g: synthesized strike 0 at spot %.17g", t,
                          *spot);
            result.synthesized.push_back(note);
        }
        for (const auto& [k, p] : by_strike) {
            m.strikes.push_back(k);
            m.prices.push_back(p);
        }
        const std::size_t last = m.strikes.size() - 1;
        if (m.prices[last] > 0.0) {
            double terminal;
            if (last >= 1) {
                const double slope = (m.prices[last] - m.prices[last - 1]) /
                                     (m.strikes[last] - m.strikes[last - 1]);
                terminal = slope < -1e-12 ? m.strikes[last] + m.prices[last] / (-slope)
                                          : m.strikes[last] + std::max(m.prices[last], 1.0);
            } else {
                terminal = m.strikes[last] + std::max(m.prices[last], 1.0);
            }
            std::snprintf(note, sizeof(note),
                          "maturity %g: appended terminal strike %.17g at price 0", t, terminal);
            result.synthesized.push_back(note);
            m.strikes.push_back(terminal);
            m.prices.push_back(0.0);
        }
        result.surface.maturities.push_back(std::move(m));
    }
    return result;
}

}  // namespace mot

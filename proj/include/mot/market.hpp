#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mot/measure.hpp"

namespace mot {

struct MaturityQuotes {
    double maturity = 0.0;  // decimal years
    std::vector<double> strikes;
    std::vector<double> prices;
};

/// Call-quote surface: spot plus per-maturity strike/price arrays. A valid
/// surface has strikes starting at 0, prices anchored at the spot,
/// nonincreasing and convex in strike with terminal price 0, slope bounded
/// below by -1 at the origin, and calendar-monotone prices on strikes shared
/// by consecutive maturities.
struct CallQuoteSurface {
    double spot = 0.0;
    std::vector<MaturityQuotes> maturities;
};

enum class ViolationKind {
    strike_grid,
    spot_anchor,
    monotonicity,
    convexity,
    slope_bound,
    terminal_price,
    calendar,
};

struct Violation {
    ViolationKind kind;
    int maturity = -1;   // index into surface.maturities
    int strike = -1;     // index of the offending quote
    double magnitude = 0.0;  // breach size in price units
    std::string message;
};

const char* to_string(ViolationKind kind);

/// Returns one record per violated inequality; empty iff the surface is
/// statically arbitrage-free within tol (price units).
std::vector<Violation> validate(const CallQuoteSurface& surface, double tol = 1e-8);

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string what, std::vector<Violation> violations)
        : std::runtime_error(std::move(what)), violations(std::move(violations)) {}
    std::vector<Violation> violations;
};

struct RepairReport {
    CallQuoteSurface original;
    CallQuoteSurface repaired;
    double l1_adjustment = 0.0;
    std::vector<std::vector<double>> deltas;  // repaired - original, per maturity
};

/// Minimal total absolute price adjustment that restores the no-arbitrage
/// inequalities (anchor, monotonicity, convexity, slope bound, terminal
/// zero, and calendar ordering on shared strikes). Solved as an LP with the
/// usual positive/negative split of the adjustment.
RepairReport repair_l1(const CallQuoteSurface& surface);

/// The discrete marginals consistent with the quotes: second differences of
/// price in strike, one measure per maturity supported on that maturity's
/// strikes. Throws ValidationError when the surface does not validate.
std::vector<DiscreteMeasure> implied_marginals(const CallQuoteSurface& surface);

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IngestResult {
    CallQuoteSurface surface;
    std::vector<std::string> synthesized;  // notes on quotes added during ingestion
};

/// Reads a CSV with header "maturity,strike,mid". A strike-0 row is
/// synthesized at the spot when absent, and a terminal zero-price strike is
/// appended (tangent extrapolation) when the largest quoted price is
/// positive; both are flagged in `synthesized`. When `spot` is not given it
/// is taken from the first strike-0 quote found.
IngestResult read_quotes_csv(std::istream& in, std::optional<double> spot = std::nullopt);

}  // namespace mot

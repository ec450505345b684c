#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mot {

/// Payoff over the coordinates of an n-marginal problem. `reads` lists the
/// (0-based) coordinates the evaluator actually depends on; the evaluator
/// receives the full tuple.
struct Payoff {
    std::string name;
    std::size_t arity = 0;
    std::vector<int> reads;
    std::function<double(const std::vector<double>&)> eval;
};

/// A two-coordinate payoff shape c(x_first, x_last) that can be bound to the
/// first and last coordinate of a problem with any number of marginals.
struct PayoffSpec {
    std::string name;
    double (*fn)(double x_first, double x_last, double param) = nullptr;
    double param = 0.0;
};

PayoffSpec straddle_payoff();                  // |x_last - x_first|
PayoffSpec asian_payoff(double strike);        // ((x_first + x_last)/2 - K)^+
PayoffSpec spence_mirrlees_payoff();           // x_first * (x_last - x_first)^2
PayoffSpec forward_call_payoff();              // (x_last - x_first)^+

/// Parses "name" or "name:param=value", e.g. "asian:strike=100".
/// Throws std::invalid_argument for unknown names.
PayoffSpec parse_payoff(const std::string& text);

/// The built-in payoffs with default parameters, for sampling in tests and
/// property sweeps.
const std::vector<PayoffSpec>& payoff_registry();

/// Binds a spec to the first/last coordinates of an n-marginal problem.
Payoff bind_payoff(const PayoffSpec& spec, std::size_t n_marginals);

/// Payoff reading a single coordinate linearly; used for sanity checks.
Payoff linear_coordinate_payoff(std::size_t n_marginals, int coordinate);

}  // namespace mot

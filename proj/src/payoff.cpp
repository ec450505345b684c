#include "mot/payoff.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mot {

namespace {

double straddle_fn(double x1, double x2, double) { return std::abs(x2 - x1); }
double asian_fn(double x1, double x2, double k) { return std::max(0.5 * (x1 + x2) - k, 0.0); }
double sm_fn(double x1, double x2, double) { return x1 * (x2 - x1) * (x2 - x1); }
double fwd_call_fn(double x1, double x2, double) { return std::max(x2 - x1, 0.0); }

std::string format_param(const char* name, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.17g", name, v);
    return buf;
}

}  // namespace

PayoffSpec straddle_payoff() { return {"straddle", straddle_fn, 0.0}; }

PayoffSpec asian_payoff(double strike) {
    return {"asian:" + format_param("strike", strike), asian_fn, strike};
}

PayoffSpec spence_mirrlees_payoff() { return {"spence_mirrlees", sm_fn, 0.0}; }

PayoffSpec forward_call_payoff() { return {"forward_call", fwd_call_fn, 0.0}; }

PayoffSpec parse_payoff(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    double param = 0.0;
    bool has_param = false;
    if (colon != std::string::npos) {
        const std::string rest = text.substr(colon + 1);
        const auto eq = rest.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("payoff parameter must be name=value: " + text);
        }
        param = std::stod(rest.substr(eq + 1));
        has_param = true;
    }
    if (name == "straddle") return straddle_payoff();
    if (name == "asian") {
        if (!has_param) throw std::invalid_argument("asian payoff requires :strike=K");
        return asian_payoff(param);
    }
    if (name == "spence_mirrlees") return spence_mirrlees_payoff();
    if (name == "forward_call" || name == "forward_start_call") return forward_call_payoff();
    throw std::invalid_argument("unknown payoff: " + name);
}

const std::vector<PayoffSpec>& payoff_registry() {
    static const std::vector<PayoffSpec> registry = {
        straddle_payoff(),        asian_payoff(70.0),  asian_payoff(100.0),
        asian_payoff(130.0),      spence_mirrlees_payoff(), forward_call_payoff(),
    };
    return registry;
}

Payoff bind_payoff(const PayoffSpec& spec, std::size_t n_marginals) {
    if (n_marginals < 2) throw std::invalid_argument("payoff binding needs >= 2 marginals");
    if (spec.fn == nullptr) throw std::invalid_argument("payoff spec has no evaluator");
    Payoff p;
    p.name = spec.name;
    p.arity = n_marginals;
    const int first = 0;
    const int last = static_cast<int>(n_marginals) - 1;
    p.reads = {first, last};
    const auto fn = spec.fn;
    const double param = spec.param;
    p.eval = [fn, param, first, last](const std::vector<double>& x) {
        return fn(x[static_cast<std::size_t>(first)], x[static_cast<std::size_t>(last)], param);
    };
    return p;
}

Payoff linear_coordinate_payoff(std::size_t n_marginals, int coordinate) {
    if (coordinate < 0 || static_cast<std::size_t>(coordinate) >= n_marginals) {
        throw std::invalid_argument("linear payoff coordinate out of range");
    }
    Payoff p;
    p.name = "coordinate:" + std::to_string(coordinate);
    p.arity = n_marginals;
    p.reads = {coordinate};
    p.eval = [coordinate](const std::vector<double>& x) {
        return x[static_cast<std::size_t>(coordinate)];
    };
    return p;
}

}  // namespace mot

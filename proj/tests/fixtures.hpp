#pragma once

#include <vector>

#include "mot/market.hpp"
#include "mot/measure.hpp"

namespace fixtures {

/// Synthetic three-maturity quote surface on strikes {0,50,80,100,120,200,250}.
inline mot::CallQuoteSurface artificial_surface() {
    mot::CallQuoteSurface s;
    s.spot = 100.0;
    const std::vector<double> strikes = {0, 50, 80, 100, 120, 200, 250};
    s.maturities = {
        {0.25, strikes, {100, 50, 23, 6, 3, 0.2, 0}},
        {0.50, strikes, {100, 53, 24.8, 6, 5.2, 2, 0}},
        {1.00, strikes, {100, 57, 34, 20, 8, 2, 0}},
    };
    return s;
}

inline std::vector<mot::DiscreteMeasure> artificial_marginals() {
    return mot::implied_marginals(artificial_surface());
}

}  // namespace fixtures

#include "causalfm/stats/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "causalfm/core/error.hpp"

namespace causalfm::stats {

std::vector<double> bh_adjust(std::span<const double> pvalues) {
    const std::size_t m = pvalues.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (std::isnan(pvalues[i]) || pvalues[i] < 0.0 || pvalues[i] > 1.0) {
            throw InvalidArgument("bh_adjust: p-value at index " + std::to_string(i) +
                                  " is outside [0, 1]");
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable so tied p-values keep input order; the result does not depend on it.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

    std::vector<double> adjusted(m);
    double running = 1.0;
    for (std::size_t rank = m; rank-- > 0;) {
        const std::size_t idx = order[rank];
        const double candidate = pvalues[idx] * (static_cast<double>(m) / static_cast<double>(rank + 1));
        running = std::min(running, candidate);
        adjusted[idx] = std::min(running, 1.0);
    }
    return adjusted;
}

}  // namespace causalfm::stats

#include "causalfm/stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "causalfm/core/error.hpp"

namespace causalfm::stats {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InvalidArgument("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw InvalidArgument("pearson: need at least 3 pairs");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw InvalidArgument("pearson: constant input, correlation undefined");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_t_statistic(double rho, std::size_t n) {
    if (n < 3) {
        throw InvalidArgument("correlation_t_statistic: need n >= 3");
    }
    const double denom = 1.0 - rho * rho;
    if (denom <= 0.0) {
        return rho > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return rho * std::sqrt(static_cast<double>(n - 2) / denom);
}

}  // namespace causalfm::stats

#pragma once

#include <cstddef>
#include <span>

namespace causalfm::stats {

/// Pearson correlation, clamped to [-1, 1]. Requires equal lengths >= 3 and
/// two non-constant inputs.
double pearson(std::span<const double> x, std::span<const double> y);

/// t = rho * sqrt((n - 2) / (1 - rho^2)); infinite for |rho| == 1.
double correlation_t_statistic(double rho, std::size_t n);

}  // namespace causalfm::stats

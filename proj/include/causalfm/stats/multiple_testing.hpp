#pragma once

#include <span>
#include <vector>

namespace causalfm::stats {

/// Benjamini-Hochberg step-up adjustment. Output is in input order:
/// adjusted_(i) = min_{j >= i} min(1, m * p_(j) / j) over the sorted family.
/// Throws when any input lies outside [0, 1].
std::vector<double> bh_adjust(std::span<const double> pvalues);

}  // namespace causalfm::stats

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "causalfm/forecast/spec.hpp"

namespace causalfm::forecast {

/// Additive-error exponential smoothing without seasonality:
///   yhat_t = l_{t-1} + phi b_{t-1}
///   l_t    = l_{t-1} + phi b_{t-1} + alpha e_t
///   b_t    = phi b_{t-1} + beta e_t
/// SES fixes b = 0; Holt fixes phi = 1.
struct EtsFit {
    EtsTrend trend = EtsTrend::None;
    double alpha = 0.0;
    double beta = 0.0;
    double phi = 1.0;
    double level = 0.0;  ///< final level
    double slope = 0.0;  ///< final slope
    double sse = 0.0;
    double aicc = 0.0;
    std::size_t n_errors = 0;
    /// smoothing + damping + initial-state parameters counted by AICc.
    std::size_t n_params = 0;
};

/// Fits one trend variant by minimizing in-sample one-step SSE over the
/// smoothing parameters (coarse grid, then pattern-search refinement).
/// Initial states: l0 = y0, b0 = y1 - y0.
EtsFit fit_ets_model(std::span<const double> history, EtsTrend trend);

/// Fixed trend, or (nullopt) the lowest-AICc of none/additive/damped.
/// Requires at least 3 points.
EtsFit fit_ets(std::span<const double> history, std::optional<EtsTrend> trend);

/// h-step forecasts l + (phi + ... + phi^h) b.
std::vector<double> forecast(const EtsFit &fit, std::size_t horizon);

}  // namespace causalfm::forecast

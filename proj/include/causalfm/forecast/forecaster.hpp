#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "causalfm/core/error.hpp"
#include "causalfm/forecast/external.hpp"
#include "causalfm/forecast/spec.hpp"

namespace causalfm::forecast {

struct Forecast {
    std::vector<double> values;

    std::size_t horizon() const noexcept { return values.size(); }
};

/// History shorter than the forecaster's minimal context.
class InsufficientHistory : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Fits spec on history and forecasts `horizon` steps ahead (recursively for
/// the AR-family models). External specs need a bridge pool.
Forecast fit_predict(const ForecasterSpec &spec, std::span<const double> history, std::size_t horizon,
                     BridgePool *bridges = nullptr);

/// Recursive forecasts of the linear autoregression on `window` lags. The
/// fit is a least-squares regression on centered data (minimum-norm when
/// there are fewer rows than lags), so adding a constant to the history
/// shifts every forecast by the same constant.
std::vector<double> linreg_forecast(std::span<const double> history, std::size_t window, std::size_t horizon);

struct RollingResult {
    std::vector<double> predictions;
    std::vector<double> residuals;
};

/// rolling_one_step failed at a particular time index.
class RollingError : public Error {
public:
    RollingError(std::size_t t, const std::string &what) : Error(what), index_(t) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// For t in [w, T): predict y_t from exactly y[t-w, t) and record
/// r_t = y_t - yhat_t. Output vectors have length T - w. External
/// forecasters send all windows as one batch when the bridge supports it.
RollingResult rolling_one_step(const ForecasterSpec &spec, std::span<const double> series, std::size_t context_w,
                               BridgePool *bridges = nullptr);

/// Floor on |y| in the MAPE denominator.
inline constexpr double kMapeEpsilon = 1e-8;

/// (1/n) sum |y - yhat| / max(|y|, eps), as a fraction (not percent).
double mape(std::span<const double> actual, std::span<const double> predicted);

}  // namespace causalfm::forecast

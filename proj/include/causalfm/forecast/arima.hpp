#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "causalfm/forecast/spec.hpp"

namespace causalfm::forecast {

/// ARMA(p, q) on the d-times differenced history, estimated by the
/// two-stage Hannan-Rissanen regression.
struct ArimaFit {
    ArimaOrder order{};
    double intercept = 0.0;
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    /// OLS standard errors of (intercept, ar..., ma...) from the final stage.
    Eigen::VectorXd std_errors;
    double sigma2 = 0.0;
    /// The second stage was rank deficient or produced a non-invertible MA
    /// polynomial, so the model was refit as a pure AR(p).
    bool ar_fallback = false;
    /// Order of the long autoregression used for innovation proxies (0 if skipped).
    std::size_t long_ar_order = 0;

    /// Differenced series and the innovations implied by the fitted model.
    std::vector<double> differenced;
    std::vector<double> innovations;
    /// Last observation of the undifferenced series (used when d = 1).
    double last_level = 0.0;
};

/// Throws InvalidArgument when history is shorter than p + q + 2 after
/// differencing, and RankDeficient when even the AR(p) refit is singular.
ArimaFit fit_arima(std::span<const double> history, ArimaOrder order);

/// Recursive multi-step forecast: future innovations are zero, predictions
/// feed back as lags, then the differencing is undone.
std::vector<double> forecast(const ArimaFit &fit, std::size_t horizon);

/// Largest root modulus of 1 + theta_1 z + ... expressed via the companion
/// matrix of the MA polynomial; < 1 means invertible.
double ma_companion_radius(const Eigen::VectorXd &ma);

}  // namespace causalfm::forecast

#include "causalfm/forecast/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "causalfm/forecast/arima.hpp"
#include "causalfm/forecast/ets.hpp"

namespace causalfm::forecast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::vector<double> external_forecast(std::span<const double> history, std::size_t horizon,
                                      BridgePool *bridges) {
    if (bridges == nullptr) {
        throw InvalidArgument("external forecaster requested but no bridge is configured");
    }
    auto lease = bridges->acquire();
    try {
        return lease->forecast(BridgeRequest{history, horizon, {}});
    } catch (const RemoteForecastError &) {
        throw;
    } catch (const BridgeError &) {
        lease.discard();
        throw;
    }
}

}  // namespace

std::vector<double> linreg_forecast(std::span<const double> history, std::size_t window, std::size_t horizon) {
    const std::size_t n = history.size();
    if (window < 1) throw InvalidArgument("linreg: window must be >= 1");
    if (n < window + 1) {
        throw InsufficientHistory("linreg(" + std::to_string(window) + ") needs at least " +
                                  std::to_string(window + 1) + " points, got " + std::to_string(n));
    }
    const auto rows = static_cast<Eigen::Index>(n - window);
    const auto w = static_cast<Eigen::Index>(window);
    Eigen::MatrixXd x(rows, w);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<std::size_t>(r) + window;
        y(r) = history[t];
        for (Eigen::Index k = 0; k < w; ++k) x(r, k) = history[t - 1 - static_cast<std::size_t>(k)];
    }
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(w);
    if (xc.norm() > 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
        cod.setThreshold(1e-10);
        beta = cod.solve(yc);
    }

    std::vector<double> path(history.begin(), history.end());
    path.reserve(n + horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double pred = y_mean;
        const std::size_t t = path.size();
        for (Eigen::Index k = 0; k < w; ++k) {
            pred += beta(k) * (path[t - 1 - static_cast<std::size_t>(k)] - x_mean(k));
        }
        path.push_back(pred);
    }
    return {path.begin() + static_cast<std::ptrdiff_t>(n), path.end()};
}

Forecast fit_predict(const ForecasterSpec &spec, std::span<const double> history, std::size_t horizon,
                     BridgePool *bridges) {
    validate(spec);
    if (horizon == 0) throw InvalidArgument("forecast horizon must be >= 1");
    if (history.size() < min_history(spec)) {
        throw InsufficientHistory(to_string(spec) + " needs at least " + std::to_string(min_history(spec)) +
                                  " points of history, got " + std::to_string(history.size()));
    }
    for (const double v : history) {
        if (!std::isfinite(v)) throw InvalidArgument("history contains a non-finite value");
    }

    auto values = std::visit(
        overloaded{
            [&](const NaiveMean &) {
                const double mean = std::accumulate(history.begin(), history.end(), 0.0) /
                                    static_cast<double>(history.size());
                return std::vector<double>(horizon, mean);
            },
            [&](const NaiveLast &) { return std::vector<double>(horizon, history.back()); },
            [&](const LinReg &s) { return linreg_forecast(history, s.window, horizon); },
            [&](const Arima &s) { return forecast(fit_arima(history, s.order), horizon); },
            [&](const Ets &s) { return forecast(fit_ets(history, s.trend), horizon); },
            [&](const External &) { return external_forecast(history, horizon, bridges); },
        },
        spec);

    for (const double v : values) {
        if (!std::isfinite(v)) throw Error(to_string(spec) + " produced a non-finite forecast");
    }
    return Forecast{std::move(values)};
}

RollingResult rolling_one_step(const ForecasterSpec &spec, std::span<const double> series, std::size_t context_w,
                               BridgePool *bridges) {
    const std::size_t t_len = series.size();
    if (context_w == 0 || t_len <= context_w) {
        throw InvalidArgument("rolling_one_step needs series length (" + std::to_string(t_len) +
                              ") > context window (" + std::to_string(context_w) + ") >= 1");
    }
    if (context_w < min_history(spec)) {
        throw InsufficientHistory("context window " + std::to_string(context_w) + " is shorter than the " +
                                  std::to_string(min_history(spec)) + " points " + to_string(spec) + " needs");
    }

    RollingResult out;
    out.predictions.resize(t_len - context_w);
    out.residuals.resize(t_len - context_w);

    if (std::holds_alternative<External>(spec)) {
        if (bridges == nullptr) {
            throw InvalidArgument("external forecaster requested but no bridge is configured");
        }
        std::vector<BridgeRequest> requests;
        requests.reserve(t_len - context_w);
        for (std::size_t t = context_w; t < t_len; ++t) {
            requests.push_back({series.subspan(t - context_w, context_w), 1, {}});
        }
        auto lease = bridges->acquire();
        std::vector<std::vector<double>> answers;
        try {
            answers = lease->forecast_batch(requests);
        } catch (const RemoteForecastError &e) {
            throw RollingError(context_w, std::string("rolling forecast failed: ") + e.what());
        } catch (const BridgeError &e) {
            lease.discard();
            throw RollingError(context_w, std::string("rolling forecast failed: ") + e.what());
        }
        for (std::size_t i = 0; i < answers.size(); ++i) {
            out.predictions[i] = answers[i].front();
            out.residuals[i] = series[context_w + i] - out.predictions[i];
        }
        return out;
    }

    for (std::size_t t = context_w; t < t_len; ++t) {
        try {
            const auto f = fit_predict(spec, series.subspan(t - context_w, context_w), 1, bridges);
            out.predictions[t - context_w] = f.values.front();
        } catch (const Error &e) {
            throw RollingError(t, "rolling forecast failed at t=" + std::to_string(t) + ": " + e.what());
        }
        out.residuals[t - context_w] = series[t] - out.predictions[t - context_w];
    }
    return out;
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw InvalidArgument("mape: length mismatch (" + std::to_string(actual.size()) + " vs " +
                              std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) throw InvalidArgument("mape: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double err = std::abs(actual[i] - predicted[i]);
        if (err == 0.0) continue;
        total += err / std::max(std::abs(actual[i]), kMapeEpsilon);
    }
    return total / static_cast<double>(actual.size());
}

}  // namespace causalfm::forecast

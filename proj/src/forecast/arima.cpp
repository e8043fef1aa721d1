#include "causalfm/forecast/arima.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "causalfm/core/error.hpp"
#include "causalfm/stats/ols.hpp"

namespace causalfm::forecast {

namespace {

// MA roots closer to the unit circle than this are treated as non-invertible.
constexpr double kInvertibilityLimit = 0.999;

std::vector<double> difference(std::span<const double> y, std::size_t d) {
    std::vector<double> out(y.begin(), y.end());
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = out.size() - 1; i > 0; --i) out[i] -= out[i - 1];
        out.erase(out.begin());
    }
    return out;
}

// Rows t in [start, n): intercept, y_{t-1..t-p}, e_{t-1..t-q}.
Eigen::MatrixXd lag_design(const std::vector<double> &y, const std::vector<double> &e, std::size_t p,
                           std::size_t q, std::size_t start) {
    const std::size_t rows = y.size() - start;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(1 + p + q));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = start + r;
        const auto row = static_cast<Eigen::Index>(r);
        x(row, 0) = 1.0;
        for (std::size_t i = 1; i <= p; ++i) x(row, static_cast<Eigen::Index>(i)) = y[t - i];
        for (std::size_t j = 1; j <= q; ++j) x(row, static_cast<Eigen::Index>(p + j)) = e[t - j];
    }
    return x;
}

Eigen::VectorXd tail_response(const std::vector<double> &y, std::size_t start) {
    return Eigen::Map<const Eigen::VectorXd>(y.data() + start, static_cast<Eigen::Index>(y.size() - start));
}

Eigen::VectorXd std_errors(const Eigen::MatrixXd &design, const stats::OlsFit &fit) {
    const auto dof = static_cast<double>(fit.n_obs - fit.n_params);
    const double s2 = fit.rss / dof;
    const Eigen::MatrixXd xtx = design.transpose() * design;
    const Eigen::MatrixXd cov = xtx.ldlt().solve(Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols())) * s2;
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

// Innovations e_t = y_t - c - sum phi_i y_{t-i} - sum theta_j e_{t-j}, with
// e_t = 0 for t < p (pre-sample values unknown).
std::vector<double> innovations(const std::vector<double> &y, const ArimaFit &fit) {
    const std::size_t p = static_cast<std::size_t>(fit.ar.size());
    const std::size_t q = static_cast<std::size_t>(fit.ma.size());
    std::vector<double> e(y.size(), 0.0);
    for (std::size_t t = p; t < y.size(); ++t) {
        double pred = fit.intercept;
        for (std::size_t i = 1; i <= p; ++i) pred += fit.ar[static_cast<Eigen::Index>(i - 1)] * y[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) pred += fit.ma[static_cast<Eigen::Index>(j - 1)] * e[t - j];
        e[t] = y[t] - pred;
    }
    return e;
}

void fit_pure_ar(const std::vector<double> &y, std::size_t p, ArimaFit &fit) {
    const std::vector<double> none;
    const Eigen::MatrixXd x = lag_design(y, none, p, 0, p);
    const auto ols = stats::ols(x, tail_response(y, p));
    fit.intercept = ols.coefficients[0];
    fit.ar = ols.coefficients.segment(1, static_cast<Eigen::Index>(p));
    fit.ma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fit.order.q));
    fit.std_errors = std_errors(x, ols);
    fit.sigma2 = ols.rss / static_cast<double>(ols.n_obs - ols.n_params);
}

}  // namespace

double ma_companion_radius(const Eigen::VectorXd &ma) {
    const auto q = ma.size();
    if (q == 0) return 0.0;
    // Roots of z^q + theta_1 z^{q-1} + ... + theta_q are the reciprocals of
    // the roots of 1 + theta_1 z + ... + theta_q z^q.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(q, q);
    companion.row(0) = -ma.transpose();
    if (q > 1) companion.bottomLeftCorner(q - 1, q - 1).setIdentity();
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

ArimaFit fit_arima(std::span<const double> history, ArimaOrder order) {
    if (order.d > 1) throw InvalidArgument("arima: d must be 0 or 1");
    const std::size_t p = order.p;
    const std::size_t q = order.q;
    if (history.size() < p + q + 2 + order.d) {
        throw InvalidArgument("arima(" + std::to_string(p) + "," + std::to_string(order.d) + "," +
                              std::to_string(q) + ") needs at least " + std::to_string(p + q + 2 + order.d) +
                              " points, got " + std::to_string(history.size()));
    }

    ArimaFit fit;
    fit.order = order;
    fit.last_level = history.back();
    fit.differenced = difference(history, order.d);
    const auto &y = fit.differenced;
    const std::size_t n = y.size();

    // A constant (differenced) series is its own fixed point; every lag
    // design would be singular.
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        fit.intercept = y.front();
        fit.ar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
        fit.ma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
        fit.std_errors = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(1 + p + q));
        fit.innovations.assign(n, 0.0);
        return fit;
    }

    bool need_fallback = (q == 0);
    if (q > 0) {
        const std::size_t m = std::min(n / 4, 2 * (p + q));
        fit.long_ar_order = m;
        const std::size_t start = std::max(p, m + q);
        if (m < 1 || n <= start + 1 + p + q) {
            need_fallback = true;
        } else {
            try {
                // Stage 1: long AR for innovation proxies.
                const std::vector<double> none;
                const Eigen::MatrixXd x1 = lag_design(y, none, m, 0, m);
                const auto stage1 = stats::ols(x1, tail_response(y, m));
                std::vector<double> proxy(n, 0.0);
                for (std::size_t t = m; t < n; ++t) proxy[t] = stage1.residuals[static_cast<Eigen::Index>(t - m)];

                // Stage 2: y on its own lags and lagged proxies.
                const Eigen::MatrixXd x2 = lag_design(y, proxy, p, q, start);
                const auto stage2 = stats::ols(x2, tail_response(y, start));
                fit.intercept = stage2.coefficients[0];
                fit.ar = stage2.coefficients.segment(1, static_cast<Eigen::Index>(p));
                fit.ma = stage2.coefficients.segment(static_cast<Eigen::Index>(1 + p), static_cast<Eigen::Index>(q));
                fit.std_errors = std_errors(x2, stage2);
                fit.sigma2 = stage2.rss / static_cast<double>(stage2.n_obs - stage2.n_params);
                if (!fit.ma.allFinite() || ma_companion_radius(fit.ma) >= kInvertibilityLimit) {
                    need_fallback = true;
                }
            } catch (const stats::RankDeficient &) {
                need_fallback = true;
            }
        }
        fit.ar_fallback = need_fallback;
    }
    if (need_fallback) {
        fit_pure_ar(y, p, fit);
    }
    fit.innovations = innovations(y, fit);
    return fit;
}

std::vector<double> forecast(const ArimaFit &fit, std::size_t horizon) {
    const std::size_t p = static_cast<std::size_t>(fit.ar.size());
    const std::size_t q = static_cast<std::size_t>(fit.ma.size());
    std::vector<double> y = fit.differenced;
    std::vector<double> e = fit.innovations;
    const std::size_t n = y.size();
    y.resize(n + horizon);
    e.resize(n + horizon, 0.0);
    for (std::size_t t = n; t < n + horizon; ++t) {
        double pred = fit.intercept;
        for (std::size_t i = 1; i <= p; ++i) pred += fit.ar[static_cast<Eigen::Index>(i - 1)] * y[t - i];
        for (std::size_t j = 1; j <= q; ++j) pred += fit.ma[static_cast<Eigen::Index>(j - 1)] * e[t - j];
        y[t] = pred;
    }
    std::vector<double> out(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
    if (fit.order.d == 1) {
        double level = fit.last_level;
        for (auto &v : out) {
            level += v;
            v = level;
        }
    }
    return out;
}

}  // namespace causalfm::forecast

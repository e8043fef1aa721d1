#include <cmath>
#include <limits>
#include <string>

#include "causalfm/causality/causality.hpp"
#include "causalfm/stats/distributions.hpp"
#include "causalfm/stats/multiple_testing.hpp"
#include "causalfm/stats/ols.hpp"

namespace causalfm::causality {

namespace {

LagResult granger_order(std::span<const double> x, std::span<const double> y, std::size_t p) {
    const std::size_t t_len = y.size();
    const auto n = static_cast<Eigen::Index>(t_len - p);
    const auto pp = static_cast<Eigen::Index>(p);

    Eigen::MatrixXd full(n, 1 + 2 * pp);
    Eigen::VectorXd response(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t t = static_cast<std::size_t>(r) + p;
        response(r) = y[t];
        full(r, 0) = 1.0;
        for (std::size_t k = 1; k <= p; ++k) {
            full(r, static_cast<Eigen::Index>(k)) = y[t - k];
            full(r, pp + static_cast<Eigen::Index>(k)) = x[t - k];
        }
    }
    const Eigen::MatrixXd restricted = full.leftCols(1 + pp);

    const auto fit_r = stats::ols(restricted, response);
    const auto fit_f = stats::ols(full, response);

    const double df1 = static_cast<double>(p);
    const double df2 = static_cast<double>(n) - 2.0 * static_cast<double>(p) - 1.0;
    const double gain = std::max(0.0, fit_r.rss - fit_f.rss);

    LagResult out;
    out.lag = p;
    if (fit_f.rss <= 0.0) {
        out.statistic = gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        out.statistic = (gain / df1) / (fit_f.rss / df2);
    }
    out.raw_p = stats::f_sf(out.statistic, df1, df2);
    out.r_squared = fit_f.r_squared;
    const double cross_sum = fit_f.coefficients.tail(pp).sum();
    out.sign = cross_sum < 0.0 ? Sign::Inhibitory : Sign::Excitatory;
    return out;
}

}  // namespace

PairSweep granger_sweep(std::span<const double> x, std::span<const double> y, const CausalityConfig &cfg) {
    validate(cfg);
    if (x.size() != y.size()) {
        throw InvalidArgument("granger: series lengths differ (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    }
    const std::size_t top = cfg.granger_fixed_lag.value_or(cfg.max_lag);
    if (y.size() <= 2 * top + 2) {
        throw InvalidArgument("granger: series of length " + std::to_string(y.size()) + " too short for order " +
                              std::to_string(top));
    }

    PairSweep sweep;
    sweep.method = Method::Granger;
    if (cfg.granger_fixed_lag) {
        sweep.lags.push_back(granger_order(x, y, *cfg.granger_fixed_lag));
    } else {
        for (std::size_t p = 1; p <= cfg.max_lag; ++p) sweep.lags.push_back(granger_order(x, y, p));
    }
    return sweep;
}

EdgeTest finalize(const PairSweep &sweep, std::span<const double> adjusted, double alpha) {
    if (sweep.lags.empty() || adjusted.size() != sweep.lags.size()) {
        throw InvalidArgument("finalize: adjusted p-values must match the lag sweep");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < adjusted.size(); ++i) {
        if (adjusted[i] < adjusted[best]) best = i;
    }
    const auto &lag = sweep.lags[best];
    EdgeTest e;
    e.source = sweep.source;
    e.target = sweep.target;
    e.method = sweep.method;
    e.chosen_lag = lag.lag;
    e.statistic = lag.statistic;
    e.raw_p = lag.raw_p;
    e.adjusted_p = adjusted[best];
    e.r_squared = lag.r_squared;
    e.sign = lag.sign;
    e.no_signal = sweep.no_signal;
    e.significant = !sweep.no_signal && e.adjusted_p < alpha;
    return e;
}

EdgeTest granger_pair(std::span<const double> x, std::span<const double> y, const CausalityConfig &cfg) {
    const auto sweep = granger_sweep(x, y, cfg);
    std::vector<double> raw;
    for (const auto &l : sweep.lags) raw.push_back(l.raw_p);
    return finalize(sweep, stats::bh_adjust(raw), cfg.alpha);
}

}  // namespace causalfm::causality

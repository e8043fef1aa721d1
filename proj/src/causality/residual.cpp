#include <algorithm>
#include <string>

#include "causalfm/causality/causality.hpp"
#include "causalfm/forecast/forecaster.hpp"
#include "causalfm/stats/correlation.hpp"
#include "causalfm/stats/distributions.hpp"
#include "causalfm/stats/multiple_testing.hpp"
#include "causalfm/stats/ols.hpp"

namespace causalfm::causality {

PairSweep residual_sweep(std::span<const double> x, std::span<const double> residuals, const CausalityConfig &cfg) {
    validate(cfg);
    const std::size_t w = cfg.context_w;
    if (x.size() != residuals.size() + w) {
        throw InvalidArgument("residual test: covariate length " + std::to_string(x.size()) +
                              " does not match " + std::to_string(residuals.size()) + " residuals + context " +
                              std::to_string(w));
    }
    if (residuals.size() < cfg.max_lag + 3) {
        throw InvalidArgument("residual test: " + std::to_string(residuals.size()) +
                              " residuals are too few for max lag " + std::to_string(cfg.max_lag));
    }

    PairSweep sweep;
    sweep.method = Method::Residual;
    sweep.no_signal = std::all_of(residuals.begin(), residuals.end(),
                                  [&](double r) { return r == residuals.front(); });

    for (std::size_t lag = 1; lag <= cfg.max_lag; ++lag) {
        LagResult res;
        res.lag = lag;
        const std::size_t n = residuals.size() - lag;
        const auto r = residuals.subspan(lag, n);
        const auto cov = x.subspan(w, n);
        const bool flat = std::all_of(r.begin(), r.end(), [&](double v) { return v == r.front(); });
        if (!flat) {
            const double rho = stats::pearson(r, cov);
            res.statistic = stats::correlation_t_statistic(rho, n);
            res.raw_p = stats::t_two_sided(res.statistic, static_cast<double>(n - 2));

            Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
            design.col(0).setOnes();
            design.col(1) = Eigen::Map<const Eigen::VectorXd>(cov.data(), static_cast<Eigen::Index>(n));
            const auto fit = stats::ols(design, Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(n)));
            res.r_squared = fit.r_squared;
            res.sign = fit.coefficients(1) < 0.0 ? Sign::Inhibitory : Sign::Excitatory;
        }
        sweep.lags.push_back(res);
    }
    return sweep;
}

EdgeTest residual_pair(std::span<const double> x, std::span<const double> y, const CausalityConfig &cfg,
                       forecast::BridgePool *bridges) {
    validate(cfg);
    if (x.size() != y.size()) {
        throw InvalidArgument("residual test: series lengths differ (" + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + ")");
    }
    if (y.size() <= cfg.context_w + cfg.max_lag + 3) {
        throw InvalidArgument("residual test: series of length " + std::to_string(y.size()) +
                              " too short for context " + std::to_string(cfg.context_w) + " and max lag " +
                              std::to_string(cfg.max_lag));
    }
    const auto rolled = forecast::rolling_one_step(cfg.forecaster, y, cfg.context_w, bridges);
    const auto sweep = residual_sweep(x, rolled.residuals, cfg);
    std::vector<double> raw;
    for (const auto &l : sweep.lags) raw.push_back(l.raw_p);
    return finalize(sweep, stats::bh_adjust(raw), cfg.alpha);
}

}  // namespace causalfm::causality

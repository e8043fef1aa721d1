#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalfm/core/error.hpp"
#include "causalfm/core/series.hpp"
#include "causalfm/forecast/external.hpp"
#include "causalfm/forecast/spec.hpp"
#include "causalfm/synth/graph.hpp"

namespace causalfm::causality {

enum class Method { Granger, Residual };

/// Which p-values share one Benjamini-Hochberg family: the max_lag
/// candidates of one directed pair, or every (pair, lag) in the panel.
enum class BhFamily { PerPair, PerPanel };

std::string_view to_string(Method m);
std::string_view to_string(BhFamily f);
Method parse_method(std::string_view text);
BhFamily parse_bh_family(std::string_view text);

struct CausalityConfig {
    Method method = Method::Granger;
    double alpha = 0.05;
    std::size_t max_lag = 5;
    /// Context length of the rolling forecaster (residual method).
    std::size_t context_w = 30;
    /// Test only this Granger order instead of sweeping 1..max_lag.
    std::optional<std::size_t> granger_fixed_lag;
    BhFamily bh_family = BhFamily::PerPair;
    forecast::ForecasterSpec forecaster = forecast::Arima{{5, 0, 0}};
};

void validate(const CausalityConfig &cfg);

/// Raw outcome of testing one lag (Granger order or residual lag).
struct LagResult {
    std::size_t lag = 1;
    /// F for Granger, t for the residual correlation test.
    double statistic = 0.0;
    double raw_p = 1.0;
    double r_squared = 0.0;
    Sign sign = Sign::Excitatory;
};

struct PairSweep {
    std::size_t source = 0;
    std::size_t target = 0;
    Method method = Method::Granger;
    std::vector<LagResult> lags;
    /// Residual method only: the forecaster left constant residuals.
    bool no_signal = false;
};

struct EdgeTest {
    std::size_t source = 0;
    std::size_t target = 0;
    Method method = Method::Granger;
    std::size_t chosen_lag = 1;
    double statistic = 0.0;
    double raw_p = 1.0;
    double adjusted_p = 1.0;
    double r_squared = 0.0;
    Sign sign = Sign::Excitatory;
    bool significant = false;
    bool no_signal = false;
};

/// Error raised while testing one directed pair.
class PairError : public Error {
public:
    PairError(std::size_t source, std::size_t target, const std::string &what)
        : Error(what), source_(source), target_(target) {}
    std::size_t source() const noexcept { return source_; }
    std::size_t target() const noexcept { return target_; }

private:
    std::size_t source_;
    std::size_t target_;
};

/// For each order p: restricted OLS of y_t on (1, y_{t-1..t-p}) versus the
/// full model adding x_{t-1..t-p}, over rows t in [p, T).
/// F = ((RSS_r - RSS_f) / p) / (RSS_f / (n - 2p - 1)).
/// Sign is that of the sum of the full model's x coefficients.
PairSweep granger_sweep(std::span<const double> x, std::span<const double> y, const CausalityConfig &cfg);

/// residuals[k] is the one-step residual of the target at time context_w + k.
/// For each lag l: Pearson correlation of residuals[k + l] with x[context_w + k]
/// over the n = residuals.size() - l aligned pairs, two-sided t test with
/// n - 2 degrees of freedom, plus the OLS fit r = delta + theta x for R^2.
PairSweep residual_sweep(std::span<const double> x, std::span<const double> residuals, const CausalityConfig &cfg);

/// Picks the lag with the smallest adjusted p (ties: smaller lag).
/// `adjusted` is parallel to sweep.lags.
EdgeTest finalize(const PairSweep &sweep, std::span<const double> adjusted, double alpha);

/// granger_sweep + per-pair BH.
EdgeTest granger_pair(std::span<const double> x, std::span<const double> y, const CausalityConfig &cfg);

/// Rolling residuals of cfg.forecaster on y, then residual_sweep + per-pair BH.
EdgeTest residual_pair(std::span<const double> x, std::span<const double> y, const CausalityConfig &cfg,
                       forecast::BridgePool *bridges = nullptr);

struct GraphInference {
    CausalGraph graph;
    /// One test per ordered pair (i != j), sorted by (source, target).
    std::vector<EdgeTest> tests;
};

/// Tests every ordered pair of the panel with cfg.method. Rejects panels with
/// a constant column. `jobs` bounds the worker threads (0 = all cores).
GraphInference infer_graph(const MultiSeries &panel, const CausalityConfig &cfg,
                           forecast::BridgePool *bridges = nullptr, unsigned jobs = 1);

/// Edge-list CSV: source,target,lag,stat,raw_p,adj_p,r2,sign,significant
/// with series names for source/target.
void write_edge_tests_csv(std::ostream &out, const std::vector<EdgeTest> &tests,
                          const std::vector<std::string> &names);

}  // namespace causalfm::causality

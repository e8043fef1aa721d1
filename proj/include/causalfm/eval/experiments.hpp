#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalfm/causality/causality.hpp"
#include "causalfm/core/rng.hpp"
#include "causalfm/core/series.hpp"
#include "causalfm/eval/report.hpp"
#include "causalfm/eval/score.hpp"
#include "causalfm/forecast/external.hpp"
#include "causalfm/forecast/spec.hpp"

namespace causalfm::eval {

/// A labelled causal-inference setup compared inside one experiment.
struct MethodSpec {
    std::string label;
    causality::CausalityConfig causality;
};

/// Classical Granger and the residual method with an AR(5) forecaster.
std::vector<MethodSpec> default_methods();

struct LogisticExperimentConfig {
    std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t trials = 10;
    std::size_t n = 100;
    double r = 3.8;
    double noise_halfwidth = 0.01;
    std::vector<MethodSpec> methods = default_methods();
    Seed master{20240101};
    unsigned jobs = 1;
};

struct MouExperimentConfig {
    std::vector<double> densities{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t trials = 10;
    std::size_t n_nodes = 10;
    std::size_t t_points = 100;
    double sigma2 = 0.2;
    double dt = 0.1;
    std::size_t burn_in = 200;
    std::optional<double> leak = -1.0;
    std::vector<MethodSpec> methods = default_methods();
    Seed master{20240101};
    unsigned jobs = 1;
};

struct ForecastBenchmarkConfig {
    SplitSpec split{};
    std::vector<forecast::ForecasterSpec> forecasters{forecast::NaiveMean{}, forecast::NaiveLast{},
                                                      forecast::LinReg{}, forecast::Arima{}, forecast::Ets{}};
    unsigned jobs = 1;
};

/// Seed of one trial: derive_seed(master, "<experiment>/<param>/<trial>").
Seed trial_seed(Seed master, const std::string &experiment, double param, std::size_t trial);

/// Per-trial row metrics of a graph score. The sign-mismatch metric is NaN
/// when nothing true was detected. Flags name every misclassified pair as
/// fp:A->B, fn:A->B or sign:A->B, plus precision_undefined / recall_undefined.
void fill_score(TrialRow &row, const GraphScore &score, const CausalGraph &predicted, const CausalGraph &truth,
                const std::vector<std::string> &names);

/// For each alpha and trial: generate a logistic panel, infer it with every
/// method, score against the truth. Failed inferences become failed rows.
ExperimentReport run_logistic_experiment(const LogisticExperimentConfig &cfg,
                                         forecast::BridgePool *bridges = nullptr);

/// Density sweep over random MOU networks. Rows carry a true_edges metric.
ExperimentReport run_mou_experiment(const MouExperimentConfig &cfg, forecast::BridgePool *bridges = nullptr);

/// Per series: MinMax scale on the full series, split, fit each forecaster on
/// the train part, forecast the test horizon and record its MAPE. A failing
/// forecaster yields a failed row and the run continues.
ExperimentReport run_forecast_benchmark(const MultiSeries &panel, const ForecastBenchmarkConfig &cfg,
                                        forecast::BridgePool *bridges = nullptr);

/// n_series independent AR(1) series y_t = phi y_{t-1} + e_t with phi drawn
/// from U(0.5, 0.9), unit-variance noise and a 100-step burn-in.
MultiSeries make_ar_panel(std::size_t n_series, std::size_t length, Seed seed);

struct ErrorMode {
    std::string flag;
    std::size_t count = 0;
};

/// Error flags (fp:, fn:, sign:) of one method's rows, most frequent first
/// (ties by flag text).
std::vector<ErrorMode> error_modes(const ExperimentReport &report, const std::string &method);

nlohmann::json to_json(const MethodSpec &m);
nlohmann::json to_json(const LogisticExperimentConfig &cfg);
nlohmann::json to_json(const MouExperimentConfig &cfg);
nlohmann::json to_json(const ForecastBenchmarkConfig &cfg);

/// Overrides the fields present in j. Unknown keys are rejected.
void apply_json(const nlohmann::json &j, causality::CausalityConfig &cfg);
MethodSpec method_from_json(const nlohmann::json &j);
void apply_json(const nlohmann::json &j, LogisticExperimentConfig &cfg);
void apply_json(const nlohmann::json &j, MouExperimentConfig &cfg);
void apply_json(const nlohmann::json &j, ForecastBenchmarkConfig &cfg);

}  // namespace causalfm::eval

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "causalfm/core/error.hpp"
#include "causalfm/eval/experiments.hpp"
#include "causalfm/eval/plot.hpp"
#include "causalfm/eval/report.hpp"
#include "causalfm/eval/score.hpp"
#include "causalfm/forecast/forecaster.hpp"

using namespace causalfm;
using namespace causalfm::eval;

namespace {

CausalGraph chain() {
    CausalGraph g(3);
    g.add_edge(0, 1, Sign::Excitatory);
    g.add_edge(1, 2, Sign::Excitatory);
    return g;
}

void expect_same_rows(const std::vector<TrialRow> &a, const std::vector<TrialRow> &b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].method, b[i].method);
        EXPECT_EQ(a[i].param, b[i].param);
        EXPECT_EQ(a[i].trial, b[i].trial);
        EXPECT_EQ(a[i].seed, b[i].seed);
        EXPECT_EQ(a[i].ok, b[i].ok);
        EXPECT_EQ(a[i].flags, b[i].flags);
        ASSERT_EQ(a[i].metrics.size(), b[i].metrics.size());
        for (const auto &[k, v] : a[i].metrics) {
            const double w = b[i].metrics.at(k);
            EXPECT_TRUE((std::isnan(v) && std::isnan(w)) || v == w) << k;
        }
    }
}

}  // namespace

TEST(ScoreGraph, SpuriousEdge) {
    auto pred = chain();
    pred.add_edge(0, 2, Sign::Excitatory);
    const auto s = score_graph(pred, chain());
    EXPECT_EQ(s.tp, 2u);
    EXPECT_EQ(s.fp, 1u);
    EXPECT_EQ(s.tn, 3u);
    EXPECT_EQ(s.fn, 0u);
    EXPECT_NEAR(s.accuracy, 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(s.precision, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(s.recall, 1.0);
    ASSERT_EQ(s.errors.size(), 1u);
    EXPECT_TRUE(s.errors[0].false_positive);
}

TEST(ScoreGraph, PerfectAndSignFlip) {
    const auto s = score_graph(chain(), chain());
    EXPECT_EQ(s.accuracy, 1.0);
    EXPECT_EQ(s.precision, 1.0);
    EXPECT_EQ(s.recall, 1.0);
    EXPECT_EQ(s.sign_mismatch_rate, 0.0);

    CausalGraph truth(3), pred(3);
    truth.add_edge(0, 1, Sign::Excitatory);
    pred.add_edge(0, 1, Sign::Inhibitory);
    const auto f = score_graph(pred, truth);
    EXPECT_EQ(f.recall, 1.0);
    EXPECT_EQ(f.sign_mismatch_rate, 1.0);
}

TEST(ScoreGraph, UndefinedRates) {
    const auto none = score_graph(CausalGraph(3), chain());
    EXPECT_TRUE(none.precision_undefined);
    EXPECT_EQ(none.precision, 1.0);
    EXPECT_TRUE(none.sign_mismatch_undefined);
    const auto empty_truth = score_graph(chain(), CausalGraph(3));
    EXPECT_TRUE(empty_truth.recall_undefined);
    EXPECT_EQ(empty_truth.fp, 2u);
    EXPECT_THROW(score_graph(CausalGraph(2), CausalGraph(3)), InvalidArgument);
}

TEST(ScoreGraph, SwapExchangesFpAndFn) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        Rng rng(Seed{s});
        CausalGraph a(5), b(5);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                if (i == j) continue;
                if (rng.bernoulli(0.4)) a.add_edge(i, j, rng.bernoulli(0.5) ? Sign::Excitatory : Sign::Inhibitory);
                if (rng.bernoulli(0.4)) b.add_edge(i, j, rng.bernoulli(0.5) ? Sign::Excitatory : Sign::Inhibitory);
            }
        }
        const auto ab = score_graph(a, b);
        const auto ba = score_graph(b, a);
        EXPECT_EQ(ab.fp, ba.fn);
        EXPECT_EQ(ab.fn, ba.fp);
        EXPECT_EQ(ab.tp, ba.tp);
        EXPECT_EQ(ab.accuracy, ba.accuracy);
        EXPECT_EQ(ab.accuracy, static_cast<double>(ab.tp + ab.tn) / 20.0);
        for (double r : {ab.accuracy, ab.precision, ab.recall, ab.sign_mismatch_rate}) {
            EXPECT_GE(r, 0.0);
            EXPECT_LE(r, 1.0);
        }
    }
}

TEST(Report, AggregatesMatchRecomputation) {
    std::vector<TrialRow> rows;
    Rng rng(Seed{4});
    for (int t = 0; t < 40; ++t) {
        TrialRow r;
        r.method = t % 2 ? "a" : "b";
        r.param = 0.1 * (t % 4);
        r.trial = static_cast<std::size_t>(t);
        r.metrics["m"] = rng.normal();
        r.metrics["maybe"] = t % 5 == 0 ? std::nan("") : rng.uniform01();
        r.ok = t != 7;
        rows.push_back(r);
    }
    const auto agg = aggregate(rows);
    for (const auto &s : agg) {
        std::vector<double> v;
        for (const auto &r : rows) {
            if (!r.ok || r.method != s.method) continue;
            if (s.param && std::abs(r.param - *s.param) > 1e-12) continue;
            const double x = r.metrics.at(s.metric);
            if (std::isfinite(x)) v.push_back(x);
        }
        ASSERT_EQ(v.size(), s.n);
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        EXPECT_NEAR(s.mean, mean, 1e-12);
        EXPECT_NEAR(s.variance, var, 1e-12);
        EXPECT_NEAR(s.stddev, std::sqrt(var), 1e-12);
    }
    EXPECT_EQ(find_summary(ExperimentReport{"x", {}, rows, agg}, "a", "m").n, 19u);
    EXPECT_THROW(find_summary(ExperimentReport{"x", {}, rows, agg}, "zzz", "m"), InvalidArgument);
}

TEST(Report, RowsCsvRoundTrip) {
    LogisticExperimentConfig cfg;
    cfg.alphas = {0.0, 0.5};
    cfg.trials = 3;
    const auto report = run_logistic_experiment(cfg);
    std::stringstream ss;
    write_rows_csv(ss, report);
    std::string id;
    const auto back = read_rows_csv(ss, &id);
    EXPECT_EQ(id, "logistic");
    expect_same_rows(report.rows, back);
    const auto agg = aggregate(back);
    ASSERT_EQ(agg.size(), report.aggregates.size());
    for (std::size_t i = 0; i < agg.size(); ++i) EXPECT_NEAR(agg[i].mean, report.aggregates[i].mean, 1e-12);

    TrialRow odd;
    odd.method = "arima:5,0,5";
    odd.param_name = "series";
    odd.ok = false;
    odd.error = "bad, \"very\" bad";
    odd.metrics["mape"] = 0.5;
    odd.flags = {"AR1", "constant"};
    ExperimentReport quoted{"forecast", {}, {odd}, aggregate({odd})};
    std::stringstream qs;
    write_rows_csv(qs, quoted);
    expect_same_rows(quoted.rows, read_rows_csv(qs));

    std::stringstream bad("method,foo\n");
    EXPECT_THROW(read_rows_csv(bad), FormatError);
}

TEST(Report, JsonHasSchema) {
    LogisticExperimentConfig cfg;
    cfg.alphas = {0.3};
    cfg.trials = 2;
    const auto j = to_json(run_logistic_experiment(cfg));
    EXPECT_EQ(j["experiment"], "logistic");
    EXPECT_EQ(j["rows"].size(), 4u);
    EXPECT_TRUE(j["config"].contains("methods"));
    EXPECT_FALSE(j["aggregates"].empty());
}

TEST(Logistic, DecoupledTrialsCountDetectionsAsFalsePositives) {
    LogisticExperimentConfig cfg;
    cfg.alphas = {0.0};
    cfg.trials = 5;
    const auto report = run_logistic_experiment(cfg);
    for (const auto &r : report.rows) {
        ASSERT_TRUE(r.ok) << r.error;
        EXPECT_EQ(r.metrics.at("true_edges"), 0.0);
        EXPECT_EQ(r.metrics.at("tp"), 0.0);
        EXPECT_EQ(r.metrics.at("fn"), 0.0);
        EXPECT_EQ(r.metrics.at("tn") + r.metrics.at("fp"), 6.0);
        EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "recall_undefined"), r.flags.end());
    }
}

TEST(Logistic, DeterministicAcrossJobs) {
    LogisticExperimentConfig cfg;
    cfg.alphas = {0.2, 0.7};
    cfg.trials = 4;
    const auto a = run_logistic_experiment(cfg);
    cfg.jobs = 3;
    const auto b = run_logistic_experiment(cfg);
    expect_same_rows(a.rows, b.rows);
    EXPECT_EQ(a.rows.size(), 2u * 4u * 2u);
}

TEST(Logistic, TrialSeedsAreIsolated) {
    EXPECT_EQ(trial_seed(Seed{1}, "logistic", 0.3, 2), trial_seed(Seed{1}, "logistic", 0.3, 2));
    EXPECT_NE(trial_seed(Seed{1}, "logistic", 0.3, 2), trial_seed(Seed{1}, "logistic", 0.4, 2));
    EXPECT_NE(trial_seed(Seed{1}, "logistic", 0.3, 2), trial_seed(Seed{1}, "mou", 0.3, 2));
}

TEST(ErrorModes, CountsFlags) {
    ExperimentReport r;
    r.rows.push_back({"m", "a", 0, 0, 0, true, "", {}, {"fp:X1->X3", "fn:X1->X2"}, 0});
    r.rows.push_back({"m", "a", 0, 1, 0, true, "", {}, {"fp:X1->X3", "precision_undefined"}, 0});
    r.rows.push_back({"other", "a", 0, 0, 0, true, "", {}, {"fn:X2->X3"}, 0});
    const auto modes = error_modes(r, "m");
    ASSERT_EQ(modes.size(), 2u);
    EXPECT_EQ(modes[0].flag, "fp:X1->X3");
    EXPECT_EQ(modes[0].count, 2u);
}

TEST(Mou, ZeroNoiseTrialsFail) {
    MouExperimentConfig cfg;
    cfg.densities = {0.5};
    cfg.trials = 2;
    cfg.sigma2 = 0.0;
    const auto report = run_mou_experiment(cfg);
    ASSERT_EQ(report.rows.size(), 4u);
    for (const auto &r : report.rows) {
        EXPECT_FALSE(r.ok);
        EXPECT_NE(r.error.find("constant"), std::string::npos) << r.error;
    }
}

TEST(Mou, SmallSweepRunsAndPlots) {
    MouExperimentConfig cfg;
    cfg.densities = {0.2, 0.8};
    cfg.trials = 2;
    const auto report = run_mou_experiment(cfg);
    for (const auto &r : report.rows) EXPECT_TRUE(r.ok) << r.error;
    std::ostringstream svg;
    write_curves_svg(svg, report, {"accuracy", "precision", "recall", "sign_mismatch"}, "density");
    const auto text = svg.str();
    EXPECT_EQ(text.rfind("<svg", 0), 0u);
    EXPECT_NE(text.find("<polyline"), std::string::npos);
    EXPECT_NE(text.find("residual_ar5"), std::string::npos);
}

TEST(ForecastBenchmark, ConstantPanelIsExact) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(80, 3, 2.5);
    const MultiSeries panel({"a", "b", "c"}, m);
    ForecastBenchmarkConfig cfg;
    cfg.forecasters = {forecast::NaiveMean{}, forecast::NaiveLast{}, forecast::LinReg{10}, forecast::Arima{},
                       forecast::Ets{}};
    const auto report = run_forecast_benchmark(panel, cfg);
    for (const auto &r : report.rows) {
        ASSERT_TRUE(r.ok) << r.method << ": " << r.error;
        EXPECT_EQ(r.metrics.at("mape"), 0.0) << r.method;
    }
}

TEST(ForecastBenchmark, FullRoiPanelGeometry) {
    const auto panel = make_ar_panel(117, 600, Seed{2});
    ForecastBenchmarkConfig cfg;
    cfg.forecasters = {forecast::NaiveMean{}, forecast::NaiveLast{}};
    const auto report = run_forecast_benchmark(panel, cfg);
    EXPECT_EQ(report.config["horizon"], 60);
    EXPECT_EQ(report.rows.size(), 234u);
}

TEST(ForecastBenchmark, FailuresAreRecordedPerSeries) {
    const auto panel = make_ar_panel(3, 40, Seed{2});
    ForecastBenchmarkConfig cfg;
    cfg.forecasters = {forecast::LinReg{60}, forecast::NaiveLast{}};
    const auto report = run_forecast_benchmark(panel, cfg);
    ASSERT_EQ(report.rows.size(), 6u);
    for (const auto &r : report.rows) {
        if (r.method == "linreg:60") {
            EXPECT_FALSE(r.ok);
            EXPECT_FALSE(r.error.empty());
        } else {
            EXPECT_TRUE(r.ok);
        }
    }
}

TEST(ForecastBenchmark, MapeMatchesManualPipeline) {
    const auto panel = make_ar_panel(4, 120, Seed{7});
    ForecastBenchmarkConfig cfg;
    cfg.forecasters = {forecast::NaiveMean{}, forecast::Arima{{2, 0, 1}}};
    const auto report = run_forecast_benchmark(panel, cfg);
    ASSERT_EQ(report.rows.size(), 8u);
    for (const auto &r : report.rows) {
        ASSERT_TRUE(r.ok) << r.error;
        const auto scaled = minmax_scale(panel.series(r.trial));
        const auto &y = scaled.series.values();
        const std::vector<double> train(y.begin(), y.begin() + 108);
        const std::vector<double> test(y.begin() + 108, y.end());
        const auto spec = forecast::parse_forecaster(r.method);
        const auto fc = forecast::fit_predict(spec, train, test.size()).values;
        EXPECT_DOUBLE_EQ(r.metrics.at("mape"), forecast::mape(test, fc)) << r.method << " series " << r.trial;
    }
}

TEST(Config, JsonOverridesAndRejectsUnknownKeys) {
    LogisticExperimentConfig cfg;
    apply_json(nlohmann::json::parse(R"({"alphas":[0.2],"trials":3,"seed":9,
        "methods":[{"label":"g2","method":"granger","max_lag":2},{"method":"residual","forecaster":"naive_mean","context":20}]})"),
               cfg);
    EXPECT_EQ(cfg.alphas, std::vector<double>{0.2});
    EXPECT_EQ(cfg.trials, 3u);
    EXPECT_EQ(cfg.master, Seed{9});
    ASSERT_EQ(cfg.methods.size(), 2u);
    EXPECT_EQ(cfg.methods[0].label, "g2");
    EXPECT_EQ(cfg.methods[0].causality.max_lag, 2u);
    EXPECT_EQ(cfg.methods[1].causality.context_w, 20u);
    EXPECT_THROW(apply_json(nlohmann::json::parse(R"({"alpha":[0.2]})"), cfg), InvalidArgument);

    MouExperimentConfig mou;
    apply_json(nlohmann::json::parse(R"({"leak":null,"densities":[0.3]})"), mou);
    EXPECT_FALSE(mou.leak.has_value());
    const auto echoed = to_json(mou);
    EXPECT_TRUE(echoed["leak"].is_null());
}

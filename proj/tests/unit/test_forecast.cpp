#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "causalfm/core/error.hpp"
#include "causalfm/core/rng.hpp"
#include "causalfm/forecast/arima.hpp"
#include "causalfm/forecast/ets.hpp"
#include "causalfm/forecast/forecaster.hpp"
#include "causalfm/stats/ols.hpp"

using namespace causalfm;
using namespace causalfm::forecast;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed, double sd = 1.0, double mean = 0.0) {
    Rng rng(Seed{seed});
    std::vector<double> y(n);
    double v = 0.0;
    for (int k = 0; k < 100; ++k) v = phi * v + sd * rng.normal();
    for (auto &x : y) {
        v = phi * v + sd * rng.normal();
        x = mean + v;
    }
    return y;
}

const std::vector<ForecasterSpec> kNative{NaiveMean{}, NaiveLast{}, LinReg{5}, Arima{{2, 0, 1}}, Ets{}};

}  // namespace

TEST(FitPredict, NaiveExamples) {
    const std::vector<double> h{0.1, 0.3, 0.7};
    EXPECT_EQ(fit_predict(NaiveLast{}, h, 3).values, (std::vector<double>{0.7, 0.7, 0.7}));
    const std::vector<double> two{0.0, 1.0};
    EXPECT_EQ(fit_predict(NaiveMean{}, two, 2).values, (std::vector<double>{0.5, 0.5}));
}

TEST(FitPredict, InsufficientHistory) {
    const std::vector<double> h(5, 1.0);
    EXPECT_THROW(fit_predict(LinReg{5}, h, 1), InsufficientHistory);
    EXPECT_THROW(fit_predict(Arima{{2, 0, 2}}, std::span(h).first(5), 1), InsufficientHistory);
    EXPECT_THROW(fit_predict(Ets{}, std::span(h).first(2), 1), InsufficientHistory);
    EXPECT_THROW(fit_predict(NaiveMean{}, std::span(h).first(0), 1), InsufficientHistory);
    EXPECT_THROW(fit_predict(External{"true"}, h, 1), InvalidArgument);
}

TEST(FitPredict, HorizonLengthAndFiniteness) {
    const auto y = ar1(0.6, 120, 3);
    for (const auto &spec : kNative) {
        for (std::size_t h : {1u, 7u, 60u}) {
            const auto fc = fit_predict(spec, y, h);
            ASSERT_EQ(fc.horizon(), h) << to_string(spec);
            for (double v : fc.values) EXPECT_TRUE(std::isfinite(v));
        }
    }
}

TEST(FitPredict, Deterministic) {
    const auto y = ar1(0.7, 200, 9);
    for (const auto &spec : kNative) {
        EXPECT_EQ(fit_predict(spec, y, 10).values, fit_predict(spec, y, 10).values) << to_string(spec);
    }
}

TEST(FitPredict, ShiftEquivariance) {
    const auto y = ar1(0.5, 150, 4);
    for (const ForecasterSpec &spec : {ForecasterSpec{NaiveMean{}}, ForecasterSpec{NaiveLast{}},
                                       ForecasterSpec{LinReg{10}}, ForecasterSpec{LinReg{60}}}) {
        for (double c : {-3.0, 0.25, 100.0}) {
            std::vector<double> shifted(y);
            for (auto &v : shifted) v += c;
            const auto a = fit_predict(spec, y, 8).values;
            const auto b = fit_predict(spec, shifted, 8).values;
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], a[i] + c, 1e-9) << to_string(spec);
        }
    }
}

TEST(LinReg, MinimumNormWhenUnderdetermined) {
    const auto y = ar1(0.5, 70, 8);
    const auto fc = linreg_forecast(y, 60, 5);
    ASSERT_EQ(fc.size(), 5u);
    for (double v : fc) EXPECT_TRUE(std::isfinite(v));
}

TEST(LinReg, RecoversExactAutoregression) {
    std::vector<double> clean{1.0, 0.5};
    for (int t = 2; t < 80; ++t) clean.push_back(0.3 + 0.6 * clean[t - 1] - 0.2 * clean[t - 2]);
    const auto fc = linreg_forecast(clean, 2, 1);
    EXPECT_NEAR(fc[0], 0.3 + 0.6 * clean[79] - 0.2 * clean[78], 1e-9);
}

TEST(Arima, RecoversAr1) {
    int hits = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto y = ar1(0.8, 500, 100 + s, 0.1);
        const auto fit = fit_arima(y, {1, 0, 0});
        hits += std::abs(fit.ar(0) - 0.8) <= 0.1 ? 1 : 0;
    }
    EXPECT_GE(hits, 45);
}

TEST(Arima, PureArEqualsOls) {
    const auto y = ar1(0.5, 300, 21);
    const std::size_t p = 3;
    const auto fit = fit_arima(y, {p, 0, 0});
    Eigen::MatrixXd x(static_cast<Eigen::Index>(y.size() - p), static_cast<Eigen::Index>(p));
    Eigen::VectorXd r(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto t = static_cast<std::size_t>(i) + p;
        r(i) = y[t];
        for (std::size_t k = 0; k < p; ++k) x(i, static_cast<Eigen::Index>(k)) = y[t - k - 1];
    }
    const auto ols = stats::ols(stats::with_intercept(x), r);
    EXPECT_NEAR(fit.intercept, ols.coefficients(0), 1e-10);
    for (std::size_t k = 0; k < p; ++k) {
        EXPECT_NEAR(fit.ar(static_cast<Eigen::Index>(k)), ols.coefficients(static_cast<Eigen::Index>(k + 1)), 1e-10);
    }
    EXPECT_EQ(fit.ma.size(), 0);
    EXPECT_FALSE(fit.ar_fallback);
}

TEST(Arima, WhiteNoiseCoefficientsInsideThreeSe) {
    int ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(Seed{500 + s});
        std::vector<double> y(300);
        for (auto &v : y) v = rng.normal();
        const auto fit = fit_arima(y, {2, 0, 1});
        bool inside = true;
        const Eigen::Index p = fit.ar.size();
        for (Eigen::Index k = 0; k < p; ++k) inside &= std::abs(fit.ar(k)) <= 3 * fit.std_errors(1 + k);
        for (Eigen::Index k = 0; k < fit.ma.size(); ++k) inside &= std::abs(fit.ma(k)) <= 3 * fit.std_errors(1 + p + k);
        ok += inside ? 1 : 0;
    }
    EXPECT_GE(ok, 80);
}

TEST(Arima, DifferencedRampContinuesSlope) {
    Rng rng(Seed{31});
    std::vector<double> y(300);
    double e = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        e = 0.5 * e + 0.2 * rng.normal();
        y[t] = 0.05 * static_cast<double>(t) + e;
    }
    const auto fit = fit_arima(y, {2, 1, 0});
    const auto fc = forecast::forecast(fit, 40);
    const double slope = (fc[39] - fc[19]) / 20.0;
    EXPECT_NEAR(slope, 0.05, 0.2 * 0.05);
}

TEST(Arima, ConstantSeriesForecastsConstant) {
    const std::vector<double> y(40, 0.3);
    for (double v : fit_predict(Arima{}, y, 5).values) EXPECT_NEAR(v, 0.3, 1e-12);
}

TEST(Arima, InvertibleOrFlagged) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto y = ar1(0.3, 120, 700 + s);
        const auto fit = fit_arima(y, {5, 0, 5});
        if (!fit.ar_fallback && fit.ma.size() > 0) EXPECT_LT(ma_companion_radius(fit.ma), 1.0);
        for (double v : forecast::forecast(fit, 20)) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(Ets, ConstantSeries) {
    const std::vector<double> y(25, 4.2);
    for (auto trend : {std::optional<EtsTrend>{}, std::optional(EtsTrend::None), std::optional(EtsTrend::Additive),
                       std::optional(EtsTrend::Damped)}) {
        const auto fit = fit_ets(y, trend);
        EXPECT_NEAR(fit.level, 4.2, 1e-12);
        for (double v : forecast::forecast(fit, 6)) EXPECT_NEAR(v, 4.2, 1e-9);
    }
}

TEST(Ets, NoiselessRampSelectsHolt) {
    for (double slope : {0.5, -2.0, 0.01}) {
        std::vector<double> y(40);
        for (std::size_t t = 0; t < y.size(); ++t) y[t] = 3.0 + slope * static_cast<double>(t);
        const auto fit = fit_ets(y, std::nullopt);
        EXPECT_EQ(fit.trend, EtsTrend::Additive);
        const auto fc = forecast::forecast(fit, 10);
        for (std::size_t h = 1; h <= 10; ++h) EXPECT_NEAR(fc[h - 1], y.back() + slope * static_cast<double>(h), 1e-6);
    }
}

TEST(Ets, SesPreferredOnStochasticLevel) {
    int ses = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(Seed{900 + s});
        std::vector<double> y(100);
        double level = 0.0;
        for (auto &v : y) {
            level += 0.3 * rng.normal();
            v = level + rng.normal();
        }
        ses += fit_ets(y, std::nullopt).trend == EtsTrend::None ? 1 : 0;
    }
    EXPECT_GE(ses, 70);
}

TEST(Ets, ParameterBoundsAndCounts) {
    const auto y = ar1(0.9, 80, 5);
    const auto ses = fit_ets_model(y, EtsTrend::None);
    const auto holt = fit_ets_model(y, EtsTrend::Additive);
    const auto damped = fit_ets_model(y, EtsTrend::Damped);
    EXPECT_EQ(ses.n_params, 2u);
    EXPECT_EQ(holt.n_params, 4u);
    EXPECT_EQ(damped.n_params, 5u);
    for (const auto &f : {ses, holt, damped}) {
        EXPECT_GT(f.alpha, 0.0);
        EXPECT_LT(f.alpha, 1.0);
        EXPECT_LE(f.beta, f.alpha);
        EXPECT_GE(f.phi, 0.8);
        EXPECT_LE(f.phi, 1.0);
    }
    EXPECT_LE(damped.phi, 0.98);
}

TEST(Rolling, NaiveLastExample) {
    const std::vector<double> y{1, 2, 3, 4};
    const auto r = rolling_one_step(NaiveLast{}, y, 2);
    EXPECT_EQ(r.predictions, (std::vector<double>{2, 3}));
    EXPECT_EQ(r.residuals, (std::vector<double>{1, 1}));
}

TEST(Rolling, NaiveLastResidualsAreDifferences) {
    const auto y = ar1(0.4, 100, 12);
    const auto r = rolling_one_step(NaiveLast{}, y, 30);
    ASSERT_EQ(r.residuals.size(), 70u);
    for (std::size_t k = 0; k < r.residuals.size(); ++k) EXPECT_EQ(r.residuals[k], y[30 + k] - y[29 + k]);
}

TEST(Rolling, ConstantSeriesHasZeroResiduals) {
    const std::vector<double> y(60, 0.25);
    for (const auto &spec : kNative) {
        const auto r = rolling_one_step(spec, y, 30);
        for (double e : r.residuals) EXPECT_NEAR(e, 0.0, 1e-12) << to_string(spec);
    }
}

TEST(Rolling, UsesExactlyTheWindow) {
    const auto y = ar1(0.4, 50, 13);
    const auto r = rolling_one_step(NaiveMean{}, y, 10);
    for (std::size_t k = 0; k < r.predictions.size(); ++k) {
        const double m = std::accumulate(y.begin() + static_cast<long>(k), y.begin() + static_cast<long>(k + 10), 0.0) / 10.0;
        EXPECT_NEAR(r.predictions[k], m, 1e-14);
    }
}

TEST(Rolling, Errors) {
    const std::vector<double> y(10, 1.0);
    EXPECT_THROW(rolling_one_step(NaiveLast{}, y, 10), InvalidArgument);
    EXPECT_THROW(rolling_one_step(LinReg{20}, std::vector<double>(40, 1.0), 10), Error);
}

TEST(Mape, Examples) {
    const std::vector<double> y{1, 2}, yh{2, 2};
    EXPECT_EQ(mape(y, y), 0.0);
    EXPECT_NEAR(mape(y, yh), 0.5, 1e-15);
    const std::vector<double> z{0, 1};
    EXPECT_EQ(mape(z, z), 0.0);
    const std::vector<double> z_miss{0.001, 1};
    EXPECT_NEAR(mape(z, z_miss), 0.5 * 0.001 / kMapeEpsilon, 1e-3);
    EXPECT_THROW(mape(y, std::vector<double>{1}), InvalidArgument);
    EXPECT_THROW(mape(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST(Mape, ScaleInvariant) {
    const auto y = ar1(0.5, 40, 2, 1.0, 10.0);
    const auto yh = ar1(0.5, 40, 3, 1.0, 10.0);
    for (double a : {0.01, 3.0, 1e4}) {
        std::vector<double> ys(y), yhs(yh);
        for (auto &v : ys) v *= a;
        for (auto &v : yhs) v *= a;
        EXPECT_NEAR(mape(ys, yhs), mape(y, yh), 1e-12);
    }
}

TEST(Spec, TextRoundTrip) {
    for (const char *text : {"naive_mean", "naive_last", "linreg:60", "linreg:7", "arima:5,0,5", "arima:1,1,0",
                             "ets:auto", "ets:none", "ets:additive", "ets:damped", "external"}) {
        EXPECT_EQ(to_string(parse_forecaster(text)), text);
    }
    EXPECT_EQ(parse_forecaster("linreg"), ForecasterSpec{LinReg{60}});
    EXPECT_EQ(parse_forecaster("arima"), (ForecasterSpec{Arima{{5, 0, 5}}}));
    EXPECT_THROW(parse_forecaster("lstm"), InvalidArgument);
    EXPECT_THROW(parse_forecaster("arima:1,2,0"), InvalidArgument);
    EXPECT_THROW(parse_forecaster("linreg:0"), InvalidArgument);
    EXPECT_EQ(std::get<External>(with_bridge_command(External{}, "x")).command, "x");
}

TEST(Spec, MinHistory) {
    EXPECT_EQ(min_history(NaiveMean{}), 1u);
    EXPECT_EQ(min_history(NaiveLast{}), 1u);
    EXPECT_EQ(min_history(LinReg{60}), 61u);
    EXPECT_EQ(min_history(Arima{{5, 0, 5}}), 12u);
    EXPECT_EQ(min_history(Ets{}), 3u);
}

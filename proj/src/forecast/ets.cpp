#include "causalfm/forecast/ets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "causalfm/core/error.hpp"

namespace causalfm::forecast {

namespace {

constexpr double kAlphaMin = 1e-4;
constexpr double kAlphaMax = 0.9999;
constexpr double kRatioMin = 1e-4;  // beta = ratio * alpha, so beta <= alpha
constexpr double kPhiMin = 0.8;
constexpr double kPhiMax = 0.98;
constexpr double kMinStep = 1e-5;
constexpr int kMaxRefineIterations = 400;

struct Params {
    double alpha = 0.5;
    double ratio = 0.0;
    double phi = 1.0;
};

struct Recursion {
    double sse = 0.0;
    double level = 0.0;
    double slope = 0.0;
};

Recursion run(std::span<const double> y, EtsTrend trend, const Params &p) {
    Recursion r;
    r.level = y[0];
    r.slope = trend == EtsTrend::None ? 0.0 : y[1] - y[0];
    const double beta = trend == EtsTrend::None ? 0.0 : p.alpha * p.ratio;
    const double phi = trend == EtsTrend::Damped ? p.phi : 1.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double pred = r.level + phi * r.slope;
        const double e = y[t] - pred;
        r.sse += e * e;
        r.level = pred + p.alpha * e;
        r.slope = phi * r.slope + beta * e;
    }
    return r;
}

std::size_t count_params(EtsTrend trend) {
    switch (trend) {
    case EtsTrend::None: return 2;
    case EtsTrend::Additive: return 4;
    case EtsTrend::Damped: return 5;
    }
    return 2;
}

double aicc(double sse, std::size_t n, std::size_t k, double scale) {
    const double denom = static_cast<double>(n) - static_cast<double>(k) - 1.0;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    // SSE floor: relative 1e-10 error per point.
    const double floor = static_cast<double>(n) * std::pow(1e-10 * scale, 2);
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return nd * std::log(std::max(sse, floor) / nd) + 2.0 * kd + 2.0 * kd * (kd + 1.0) / denom;
}

}  // namespace

EtsFit fit_ets_model(std::span<const double> y, EtsTrend trend) {
    if (y.size() < 3) {
        throw InvalidArgument("ets needs at least 3 points, got " + std::to_string(y.size()));
    }

    std::vector<double> alphas;
    for (int i = 0; i < 10; ++i) alphas.push_back(0.05 + 0.1 * i);
    const std::vector<double> ratios = trend == EtsTrend::None ? std::vector<double>{0.0}
                                                               : std::vector<double>{0.05, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> phis = trend == EtsTrend::Damped ? std::vector<double>{0.8, 0.85, 0.9, 0.95, 0.98}
                                                               : std::vector<double>{1.0};

    Params best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (const double a : alphas) {
        for (const double r : ratios) {
            for (const double f : phis) {
                const Params cand{a, r, f};
                const double sse = run(y, trend, cand).sse;
                if (sse < best_sse) {
                    best_sse = sse;
                    best = cand;
                }
            }
        }
    }

    // Pattern search on the free coordinates, bounded, with halving steps.
    const auto clamp_params = [&](Params p) {
        p.alpha = std::clamp(p.alpha, kAlphaMin, kAlphaMax);
        if (trend != EtsTrend::None) p.ratio = std::clamp(p.ratio, kRatioMin, 1.0);
        if (trend == EtsTrend::Damped) p.phi = std::clamp(p.phi, kPhiMin, kPhiMax);
        return p;
    };
    const int dims = trend == EtsTrend::None ? 1 : (trend == EtsTrend::Additive ? 2 : 3);
    double step = 0.05;
    for (int iter = 0; iter < kMaxRefineIterations && step > kMinStep && best_sse > 0.0; ++iter) {
        bool improved = false;
        for (int d = 0; d < dims; ++d) {
            for (const double dir : {1.0, -1.0}) {
                Params cand = best;
                double *coord = d == 0 ? &cand.alpha : (d == 1 ? &cand.ratio : &cand.phi);
                *coord += dir * step;
                cand = clamp_params(cand);
                const double sse = run(y, trend, cand).sse;
                if (sse < best_sse) {
                    best_sse = sse;
                    best = cand;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }

    const auto rec = run(y, trend, best);
    EtsFit fit;
    fit.trend = trend;
    fit.alpha = best.alpha;
    fit.beta = trend == EtsTrend::None ? 0.0 : best.alpha * best.ratio;
    fit.phi = trend == EtsTrend::Damped ? best.phi : 1.0;
    fit.level = rec.level;
    fit.slope = rec.slope;
    fit.sse = rec.sse;
    fit.n_errors = y.size() - 1;
    fit.n_params = count_params(trend);
    double scale = 1.0;
    for (const double v : y) scale = std::max(scale, std::abs(v));
    fit.aicc = aicc(fit.sse, fit.n_errors, fit.n_params, scale);
    return fit;
}

EtsFit fit_ets(std::span<const double> history, std::optional<EtsTrend> trend) {
    if (trend) return fit_ets_model(history, *trend);
    EtsFit best = fit_ets_model(history, EtsTrend::None);
    for (const auto t : {EtsTrend::Additive, EtsTrend::Damped}) {
        auto cand = fit_ets_model(history, t);
        if (cand.aicc < best.aicc) best = std::move(cand);
    }
    return best;
}

std::vector<double> forecast(const EtsFit &fit, std::size_t horizon) {
    std::vector<double> out(horizon);
    double damp_sum = 0.0;
    double phi_pow = 1.0;
    for (std::size_t h = 0; h < horizon; ++h) {
        phi_pow *= fit.phi;
        damp_sum += phi_pow;
        out[h] = fit.level + damp_sum * fit.slope;
    }
    return out;
}

}  // namespace causalfm::forecast

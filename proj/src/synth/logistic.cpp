#include "causalfm/synth/logistic.hpp"

#include <algorithm>

#include "causalfm/core/error.hpp"

namespace causalfm::synth {

void validate(const LogisticSpec &spec) {
    if (spec.n < 2) throw InvalidArgument("logistic: n must be >= 2");
    if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) throw InvalidArgument("logistic: alpha must lie in [0, 1]");
    if (!(spec.r > 0.0 && spec.r <= 4.0)) throw InvalidArgument("logistic: r must lie in (0, 4]");
    if (!(spec.noise_halfwidth >= 0.0)) throw InvalidArgument("logistic: noise half-width must be >= 0");
}

GeneratedPanel gen_logistic(const LogisticSpec &spec) {
    validate(spec);
    const auto n = static_cast<Eigen::Index>(spec.n);
    Eigen::MatrixXd x(n, 3);

    std::array<double, 3> jitter{0.0, 0.0, 0.0};
    if (spec.noise_halfwidth > 0.0) {
        const auto eps = rng_uniform(spec.seed, -spec.noise_halfwidth, spec.noise_halfwidth, 3);
        std::copy(eps.begin(), eps.end(), jitter.begin());
    }
    for (Eigen::Index j = 0; j < 3; ++j) {
        x(0, j) = std::clamp(spec.base_inits[static_cast<std::size_t>(j)] + jitter[static_cast<std::size_t>(j)], 0.0, 1.0);
    }

    const double r = spec.r;
    const double a = spec.alpha;
    for (Eigen::Index t = 1; t < n; ++t) {
        const double p1 = x(t - 1, 0);
        const double p2 = x(t - 1, 1);
        const double p3 = x(t - 1, 2);
        x(t, 0) = std::clamp(r * p1 * (1.0 - p1), 0.0, 1.0);
        x(t, 1) = std::clamp(r * p2 * (1.0 - p2) + a * p1, 0.0, 1.0);
        x(t, 2) = std::clamp(r * p3 * (1.0 - p3) + a * p2, 0.0, 1.0);
    }

    CausalGraph truth(3);
    if (a > 0.0) {
        truth.add_edge(0, 1, Sign::Excitatory);
        truth.add_edge(1, 2, Sign::Excitatory);
    }
    return {MultiSeries({"X1", "X2", "X3"}, std::move(x)), std::move(truth)};
}

}  // namespace causalfm::synth

#pragma once

#include <array>
#include <cstddef>

#include "causalfm/core/rng.hpp"
#include "causalfm/core/series.hpp"
#include "causalfm/synth/graph.hpp"

namespace causalfm::synth {

/// Three logistic maps with additive unidirectional coupling 1 -> 2 -> 3.
struct LogisticSpec {
    double r = 3.8;
    double alpha = 0.1;
    std::size_t n = 100;
    Seed seed{};
    std::array<double, 3> base_inits{0.1, 0.2, 0.3};
    /// Initial conditions get U(-h, h) jitter; h = 0 disables it.
    double noise_halfwidth = 0.01;
};

struct GeneratedPanel {
    MultiSeries panel;
    CausalGraph truth;
};

void validate(const LogisticSpec &spec);

/// Series X1, X2, X3 of length spec.n. Each update is clamped to [0, 1].
/// The truth graph is {0 -> 1 (+), 1 -> 2 (+)} when alpha > 0, empty otherwise.
GeneratedPanel gen_logistic(const LogisticSpec &spec);

}  // namespace causalfm::synth

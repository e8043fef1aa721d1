#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "causalfm/core/rng.hpp"
#include "causalfm/core/series.hpp"
#include "causalfm/synth/graph.hpp"
#include "causalfm/synth/logistic.hpp"

namespace causalfm::synth {

/// Multivariate Ornstein-Uhlenbeck network dX = C X dt + sigma dW with
/// isotropic noise covariance sigma2 * I.
struct MouSpec {
    std::size_t n_nodes = 10;
    double density = 0.5;
    double sigma2 = 0.2;
    std::size_t t_points = 100;
    double dt = 0.1;
    std::size_t burn_in = 200;
    Seed seed{};
    /// Fixed diagonal of C. Without it the diagonal is sampled like the
    /// off-diagonal entries and stability is left entirely to rejection.
    std::optional<double> leak = -1.0;
};

struct Connectivity {
    Eigen::MatrixXd c;
    CausalGraph graph;
};

/// Matrices are resampled until the spectral abscissa is below this.
inline constexpr double kStabilityMargin = -0.05;
inline constexpr int kMaxStabilityResamples = 100;

void validate(const MouSpec &spec);

/// Largest real part among the eigenvalues of c.
double spectral_abscissa(const Eigen::MatrixXd &c);

/// Off-diagonal support ~ Bernoulli(density) per ordered pair, weights
/// ~ U(-1/(N d), 1/(N d)). C(i, j) != 0 yields the edge j -> i with its sign.
Connectivity gen_mou_connectivity(std::size_t n_nodes, double density, Seed seed,
                                  std::optional<double> leak = -1.0);

/// Euler-Maruyama from X0 = 0: X += C X dt + sqrt(sigma2 dt) xi. The first
/// burn_in steps are discarded, then t_points steps are recorded.
MultiSeries simulate_mou(const Eigen::MatrixXd &c, double sigma2, double dt, std::size_t t_points,
                         std::size_t burn_in, Seed seed);

/// Solution S of C S + S C^T + sigma = 0 via the Kronecker-vectorized system.
Eigen::MatrixXd lyapunov_stationary_cov(const Eigen::MatrixXd &c, const Eigen::MatrixXd &sigma);

/// Connectivity and simulated panel for one spec (independent RNG streams).
GeneratedPanel gen_mou(const MouSpec &spec);

}  // namespace causalfm::synth

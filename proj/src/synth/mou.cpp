#include "causalfm/synth/mou.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "causalfm/core/error.hpp"

namespace causalfm::synth {

namespace {

constexpr std::uint64_t kConnectivityStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr double kDivergenceBound = 1e6;

std::vector<std::string> node_names(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i + 1));
    return names;
}

}  // namespace

void validate(const MouSpec &spec) {
    if (spec.n_nodes < 2) throw InvalidArgument("mou: need at least 2 nodes");
    if (!(spec.density > 0.0 && spec.density < 1.0)) throw InvalidArgument("mou: density must lie in (0, 1)");
    if (!(spec.sigma2 >= 0.0)) throw InvalidArgument("mou: sigma2 must be >= 0");
    if (!(spec.dt > 0.0)) throw InvalidArgument("mou: dt must be > 0");
    if (spec.t_points < 2) throw InvalidArgument("mou: t_points must be >= 2");
}

double spectral_abscissa(const Eigen::MatrixXd &c) {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(c, false);
    if (solver.info() != Eigen::Success) {
        throw Error("spectral_abscissa: eigenvalue computation failed");
    }
    return solver.eigenvalues().real().maxCoeff();
}

Connectivity gen_mou_connectivity(std::size_t n_nodes, double density, Seed seed,
                                  std::optional<double> leak) {
    if (n_nodes < 2) throw InvalidArgument("mou: need at least 2 nodes");
    if (!(density > 0.0 && density < 1.0)) throw InvalidArgument("mou: density must lie in (0, 1)");

    Rng rng(seed, kConnectivityStream);
    const auto n = static_cast<Eigen::Index>(n_nodes);
    const double bound = 1.0 / (static_cast<double>(n_nodes) * density);

    for (int attempt = 0; attempt < kMaxStabilityResamples; ++attempt) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j && leak) {
                    c(i, j) = *leak;
                    continue;
                }
                if (rng.bernoulli(density)) {
                    c(i, j) = rng.uniform(-bound, bound);
                }
            }
        }
        if (spectral_abscissa(c) >= kStabilityMargin) continue;

        CausalGraph graph(n_nodes);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && c(i, j) != 0.0) {
                    graph.add_edge(static_cast<std::size_t>(j), static_cast<std::size_t>(i),
                                   c(i, j) > 0 ? Sign::Excitatory : Sign::Inhibitory);
                }
            }
        }
        return {std::move(c), std::move(graph)};
    }
    throw Error("mou: no stable connectivity matrix after " + std::to_string(kMaxStabilityResamples) +
                " resamples (N=" + std::to_string(n_nodes) + ", d=" + std::to_string(density) + ")");
}

MultiSeries simulate_mou(const Eigen::MatrixXd &c, double sigma2, double dt, std::size_t t_points,
                         std::size_t burn_in, Seed seed) {
    if (c.rows() != c.cols() || c.rows() < 1) throw InvalidArgument("simulate_mou: C must be square");
    if (!(sigma2 >= 0.0)) throw InvalidArgument("simulate_mou: sigma2 must be >= 0");
    if (!(dt > 0.0)) throw InvalidArgument("simulate_mou: dt must be > 0");
    if (t_points < 1) throw InvalidArgument("simulate_mou: t_points must be >= 1");

    const auto n = c.rows();
    Rng rng(seed, kNoiseStream);
    const double noise_scale = std::sqrt(sigma2 * dt);
    const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(n, n) + c * dt;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd xi(n);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(t_points), n);
    const std::size_t total = burn_in + t_points;
    for (std::size_t k = 0; k < total; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) xi(i) = rng.normal();
        x = step * x + noise_scale * xi;
        if (!(x.array().abs() <= kDivergenceBound).all()) {
            throw Error("simulate_mou: trajectory diverged at step " + std::to_string(k + 1) +
                        " (|x| > 1e6); C is not stable");
        }
        if (k >= burn_in) {
            out.row(static_cast<Eigen::Index>(k - burn_in)) = x.transpose();
        }
    }
    return MultiSeries(node_names(static_cast<std::size_t>(n)), std::move(out));
}

Eigen::MatrixXd lyapunov_stationary_cov(const Eigen::MatrixXd &c, const Eigen::MatrixXd &sigma) {
    const auto n = c.rows();
    if (c.cols() != n || sigma.rows() != n || sigma.cols() != n) {
        throw InvalidArgument("lyapunov_stationary_cov: C and Sigma must be square of equal size");
    }
    // vec(C S + S C^T) = (I (x) C + C (x) I) vec(S), column-major vec.
    const Eigen::Index nn = n * n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nn, nn);
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
            const Eigen::Index eq = col * n + row;
            for (Eigen::Index k = 0; k < n; ++k) {
                a(eq, col * n + k) += c(row, k);  // (C S)(row, col)
                a(eq, k * n + row) += c(col, k);  // (S C^T)(row, col)
            }
        }
    }
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(sigma.data(), nn);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        throw Error("lyapunov_stationary_cov: singular system, C has a pair of eigenvalues summing to zero");
    }
    const Eigen::VectorXd s = lu.solve(rhs);
    Eigen::MatrixXd out = Eigen::Map<const Eigen::MatrixXd>(s.data(), n, n);
    return 0.5 * (out + out.transpose());
}

GeneratedPanel gen_mou(const MouSpec &spec) {
    validate(spec);
    auto conn = gen_mou_connectivity(spec.n_nodes, spec.density, spec.seed, spec.leak);
    auto panel = simulate_mou(conn.c, spec.sigma2, spec.dt, spec.t_points, spec.burn_in, spec.seed);
    return {std::move(panel), std::move(conn.graph)};
}

}  // namespace causalfm::synth

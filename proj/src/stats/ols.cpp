#include "causalfm/stats/ols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace causalfm::stats {

namespace {

// |R_jj| below this fraction of the column's norm means column j adds no new
// direction to the span of the earlier columns.
constexpr double kRankTolerance = 1e-10;

}  // namespace

OlsFit ols(const Eigen::MatrixXd &design, const Eigen::VectorXd &response) {
    const auto n = design.rows();
    const auto k = design.cols();
    if (response.size() != n) {
        throw InvalidArgument("ols: design has " + std::to_string(n) + " rows but response has " +
                              std::to_string(response.size()));
    }
    if (k < 1 || n <= k) {
        throw InvalidArgument("ols: need more observations (" + std::to_string(n) +
                              ") than parameters (" + std::to_string(k) + ")");
    }

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < k; ++j) {
        const double col_norm = design.col(j).norm();
        if (col_norm == 0.0 || std::abs(r(j, j)) <= kRankTolerance * col_norm) {
            throw RankDeficient(static_cast<std::size_t>(j),
                                "ols: design column " + std::to_string(j) +
                                    " is linearly dependent on the preceding columns");
        }
    }

    OlsFit fit;
    fit.coefficients = qr.solve(response);
    fit.residuals = response - design * fit.coefficients;
    fit.rss = fit.residuals.squaredNorm();
    fit.n_obs = static_cast<std::size_t>(n);
    fit.n_params = static_cast<std::size_t>(k);

    const double mean = response.mean();
    const double tss = (response.array() - mean).square().sum();
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - fit.rss / tss, 0.0, 1.0) : 0.0;
    return fit;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd &columns) {
    Eigen::MatrixXd design(columns.rows(), columns.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(columns.cols()) = columns;
    return design;
}

}  // namespace causalfm::stats

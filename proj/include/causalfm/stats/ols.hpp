#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "causalfm/core/error.hpp"

namespace causalfm::stats {

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double rss = 0.0;
    /// 1 - rss / tss against the intercept-only baseline. Zero when the
    /// response is constant.
    double r_squared = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
};

/// The design matrix has a column that is (numerically) a linear combination
/// of the columns before it.
class RankDeficient : public Error {
public:
    RankDeficient(std::size_t column, const std::string &what)
        : Error(what), column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Least squares via Householder QR. The caller supplies the intercept column.
/// Requires n > k and full column rank; throws RankDeficient naming the first
/// dependent column otherwise.
OlsFit ols(const Eigen::MatrixXd &design, const Eigen::VectorXd &response);

/// Design with a leading column of ones followed by the given columns.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd &columns);

}  // namespace causalfm::stats

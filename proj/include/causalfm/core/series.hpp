#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace causalfm {

/// A named, uniformly sampled, finite-valued series. The time axis is the
/// integer index into values().
class TimeSeries {
public:
    TimeSeries(std::string name, std::vector<double> values);

    const std::string &name() const noexcept { return name_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double back() const { return values_.back(); }

private:
    std::string name_;
    std::vector<double> values_;
};

struct ScaleParams {
    double min = 0.0;
    double max = 0.0;

    /// A constant input was scaled to all zeros and cannot be inverted.
    bool degenerate() const noexcept { return max == min; }
};

struct ScaledSeries {
    TimeSeries series;
    ScaleParams params;
};

/// Affine map of s onto [0,1]. A constant series maps to all zeros with
/// params.max == params.min.
ScaledSeries minmax_scale(const TimeSeries &s);

/// Inverse of minmax_scale. For degenerate params every value maps back to min.
TimeSeries minmax_unscale(const TimeSeries &scaled, const ScaleParams &params);

/// A T x N panel: column j holds series names()[j].
class MultiSeries {
public:
    MultiSeries(std::vector<std::string> names, Eigen::MatrixXd data);

    static MultiSeries from_columns(const std::vector<TimeSeries> &columns);

    std::size_t length() const noexcept { return static_cast<std::size_t>(data_.rows()); }
    std::size_t width() const noexcept { return static_cast<std::size_t>(data_.cols()); }
    const std::vector<std::string> &names() const noexcept { return names_; }
    const Eigen::MatrixXd &data() const noexcept { return data_; }

    std::span<const double> column(std::size_t j) const;
    TimeSeries series(std::size_t j) const;

    /// Rows [begin, end) as a new panel with the same names.
    MultiSeries slice_rows(std::size_t begin, std::size_t end) const;

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd data_;
};

struct SplitSpec {
    double train_fraction = 0.9;
};

/// Train = first floor(T * train_fraction) rows, test = the rest.
std::pair<MultiSeries, MultiSeries> split(const MultiSeries &panel, SplitSpec spec);

/// Column-wise minmax_scale of a whole panel.
std::pair<MultiSeries, std::vector<ScaleParams>> minmax_scale(const MultiSeries &panel);

}  // namespace causalfm

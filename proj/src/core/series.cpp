#include "causalfm/core/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "causalfm/core/error.hpp"

namespace causalfm {

TimeSeries::TimeSeries(std::string name, std::vector<double> values)
    : name_(std::move(name)), values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgument("series '" + name_ + "' is empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            std::ostringstream os;
            os << "series '" << name_ << "' has a non-finite value at index " << i;
            throw InvalidArgument(os.str());
        }
    }
}

ScaledSeries minmax_scale(const TimeSeries &s) {
    const auto v = s.values();
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const ScaleParams params{*lo_it, *hi_it};

    std::vector<double> out(v.size(), 0.0);
    if (!params.degenerate()) {
        const double range = params.max - params.min;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] = std::clamp((v[i] - params.min) / range, 0.0, 1.0);
        }
    }
    return {TimeSeries(s.name(), std::move(out)), params};
}

TimeSeries minmax_unscale(const TimeSeries &scaled, const ScaleParams &params) {
    const auto v = scaled.values();
    std::vector<double> out(v.size());
    const double range = params.max - params.min;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = params.min + v[i] * range;
    }
    return TimeSeries(scaled.name(), std::move(out));
}

MultiSeries::MultiSeries(std::vector<std::string> names, Eigen::MatrixXd data)
    : names_(std::move(names)), data_(std::move(data)) {
    if (data_.cols() < 1 || data_.rows() < 1) {
        throw InvalidArgument("panel needs at least one row and one column");
    }
    if (static_cast<Eigen::Index>(names_.size()) != data_.cols()) {
        throw InvalidArgument("panel has " + std::to_string(data_.cols()) + " columns but " +
                              std::to_string(names_.size()) + " names");
    }
    std::unordered_set<std::string> seen;
    for (const auto &n : names_) {
        if (!seen.insert(n).second) {
            throw InvalidArgument("duplicate series name '" + n + "'");
        }
    }
    if (!data_.allFinite()) {
        throw InvalidArgument("panel contains non-finite values");
    }
}

MultiSeries MultiSeries::from_columns(const std::vector<TimeSeries> &columns) {
    if (columns.empty()) {
        throw InvalidArgument("panel needs at least one column");
    }
    const std::size_t t = columns.front().size();
    Eigen::MatrixXd data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(columns.size()));
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != t) {
            throw InvalidArgument("column '" + columns[j].name() + "' has length " +
                                  std::to_string(columns[j].size()) + ", expected " +
                                  std::to_string(t));
        }
        const auto v = columns[j].values();
        data.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(t));
        names.push_back(columns[j].name());
    }
    return MultiSeries(std::move(names), std::move(data));
}

std::span<const double> MultiSeries::column(std::size_t j) const {
    if (j >= width()) {
        throw InvalidArgument("column index " + std::to_string(j) + " out of range");
    }
    return {data_.col(static_cast<Eigen::Index>(j)).data(), length()};
}

TimeSeries MultiSeries::series(std::size_t j) const {
    const auto c = column(j);
    return TimeSeries(names_[j], std::vector<double>(c.begin(), c.end()));
}

MultiSeries MultiSeries::slice_rows(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > length()) {
        throw InvalidArgument("invalid row slice [" + std::to_string(begin) + ", " +
                              std::to_string(end) + ")");
    }
    return MultiSeries(names_, data_.middleRows(static_cast<Eigen::Index>(begin),
                                                static_cast<Eigen::Index>(end - begin)));
}

std::pair<MultiSeries, MultiSeries> split(const MultiSeries &panel, SplitSpec spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw InvalidArgument("train fraction must lie in (0, 1)");
    }
    const auto t = panel.length();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(t) * spec.train_fraction));
    if (n_train < 2 || n_train >= t) {
        std::ostringstream os;
        os << "panel of length " << t << " is too short for a " << spec.train_fraction
           << " split (train " << n_train << ", test " << (t - std::min(n_train, t)) << ")";
        throw InvalidArgument(os.str());
    }
    return {panel.slice_rows(0, n_train), panel.slice_rows(n_train, t)};
}

std::pair<MultiSeries, std::vector<ScaleParams>> minmax_scale(const MultiSeries &panel) {
    std::vector<TimeSeries> cols;
    std::vector<ScaleParams> params;
    cols.reserve(panel.width());
    params.reserve(panel.width());
    for (std::size_t j = 0; j < panel.width(); ++j) {
        auto scaled = minmax_scale(panel.series(j));
        cols.push_back(std::move(scaled.series));
        params.push_back(scaled.params);
    }
    return {MultiSeries::from_columns(cols), std::move(params)};
}

}  // namespace causalfm

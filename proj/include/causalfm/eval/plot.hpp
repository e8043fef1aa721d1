#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "causalfm/eval/report.hpp"

namespace causalfm::eval {

/// Static SVG with one panel per metric: per-parameter means of every method,
/// drawn against the parameter value. Metrics absent from the report are
/// drawn as empty panels.
void write_curves_svg(std::ostream &out, const ExperimentReport &report, const std::vector<std::string> &metrics,
                      const std::string &x_label);
void write_curves_svg(const std::filesystem::path &path, const ExperimentReport &report,
                      const std::vector<std::string> &metrics, const std::string &x_label);

}  // namespace causalfm::eval

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "causalfm/core/series.hpp"

namespace causalfm {

/// Panel CSV: a header row of series names, then one comma-separated row of
/// '.'-radix reals per time point. Missing cells are rejected.
MultiSeries read_panel_csv(std::istream &in);
MultiSeries read_panel_csv(const std::filesystem::path &path);

/// Writes with 17 significant digits so a read back is bit-exact.
void write_panel_csv(std::ostream &out, const MultiSeries &panel);
void write_panel_csv(const std::filesystem::path &path, const MultiSeries &panel);

/// Splits one CSV line on commas. Double-quoted cells may contain commas and
/// "" for a literal quote; unquoted cells are trimmed.
std::vector<std::string> split_csv_line(std::string_view line);

/// The cell as written to CSV: quoted when it holds a comma, quote or line break.
std::string csv_field(std::string_view text);

/// Strict decimal parse of a whole cell (surrounding blanks allowed).
double parse_real(std::string_view cell);

/// Shortest-exact text form of a double.
std::string format_real(double v);

}  // namespace causalfm

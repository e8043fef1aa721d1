#include "causalfm/core/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "causalfm/core/error.hpp"

namespace causalfm {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t i = 0;
    while (true) {
        std::size_t j = i;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
        if (j < line.size() && line[j] == '"') {
            std::string cell;
            ++j;
            while (true) {
                if (j >= line.size()) throw FormatError("unterminated quoted CSV cell");
                if (line[j] == '"') {
                    if (j + 1 < line.size() && line[j + 1] == '"') {
                        cell.push_back('"');
                        j += 2;
                        continue;
                    }
                    ++j;
                    break;
                }
                cell.push_back(line[j++]);
            }
            const auto next = line.find(',', j);
            if (!trim(line.substr(j, next == std::string_view::npos ? next : next - j)).empty()) {
                throw FormatError("text after a closing quote in a CSV cell");
            }
            cells.push_back(std::move(cell));
            if (next == std::string_view::npos) break;
            i = next + 1;
            continue;
        }
        const auto pos = line.find(',', i);
        if (pos == std::string_view::npos) {
            cells.emplace_back(trim(line.substr(i)));
            break;
        }
        cells.emplace_back(trim(line.substr(i, pos - i)));
        i = pos + 1;
    }
    return cells;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

double parse_real(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw FormatError("not a decimal number: '" + std::string(cell) + "'");
    }
    return value;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

MultiSeries read_panel_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("panel CSV is empty");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    auto names = split_csv_line(line);
    for (const auto &n : names) {
        if (n.empty()) throw FormatError("panel CSV header has an empty series name");
    }

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != names.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(names.size()) + " cells, got " +
                              std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (cells[j].empty()) {
                throw FormatError("line " + std::to_string(line_no) + ": missing value in column '" +
                                  names[j] + "'");
            }
            try {
                row.push_back(parse_real(cells[j]));
            } catch (const FormatError &e) {
                throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
            }
            if (!std::isfinite(row.back())) {
                throw FormatError("line " + std::to_string(line_no) + ": non-finite value");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) {
        throw FormatError("panel CSV needs at least two data rows");
    }

    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    try {
        return MultiSeries(std::move(names), std::move(data));
    } catch (const InvalidArgument &e) {
        throw FormatError(e.what());
    }
}

MultiSeries read_panel_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open panel CSV '" + path.string() + "'");
    }
    return read_panel_csv(in);
}

void write_panel_csv(std::ostream &out, const MultiSeries &panel) {
    const auto &names = panel.names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << (j ? "," : "") << csv_field(names[j]);
    }
    out << '\n';
    const auto &data = panel.data();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            out << (j ? "," : "") << format_real(data(i, j));
        }
        out << '\n';
    }
}

void write_panel_csv(const std::filesystem::path &path, const MultiSeries &panel) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    write_panel_csv(out, panel);
}

}  // namespace causalfm

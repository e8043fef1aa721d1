#include "causalfm/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "causalfm/core/csv.hpp"
#include "causalfm/core/error.hpp"

namespace causalfm::eval {

namespace {

std::string sanitize(std::string s) {
    for (auto &c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::string join(const std::vector<std::string> &parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string metric_cell(double v) {
    return std::isfinite(v) ? format_real(v) : std::string{};
}

MetricSummary summarize(const std::string &method, std::optional<double> param, const std::string &metric,
                        const std::vector<double> &values) {
    MetricSummary s;
    s.method = method;
    s.param = param;
    s.metric = metric;
    s.n = values.size();
    if (values.empty()) {
        s.mean = s.variance = s.stddev = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(values.size());
    s.stddev = std::sqrt(s.variance);
    return s;
}

}  // namespace

std::vector<MetricSummary> aggregate(const std::vector<TrialRow> &rows) {
    // key: method, pooled-flag (0 pooled first), param, metric
    std::map<std::tuple<std::string, int, double, std::string>, std::vector<double>> groups;
    for (const auto &row : rows) {
        if (!row.ok) continue;
        for (const auto &[metric, value] : row.metrics) {
            if (!std::isfinite(value)) continue;
            groups[{row.method, 0, 0.0, metric}].push_back(value);
            groups[{row.method, 1, row.param, metric}].push_back(value);
        }
    }
    std::vector<MetricSummary> out;
    out.reserve(groups.size());
    for (const auto &[key, values] : groups) {
        const auto &[method, per_param, param, metric] = key;
        out.push_back(summarize(method, per_param ? std::optional<double>(param) : std::nullopt, metric, values));
    }
    return out;
}

const MetricSummary &find_summary(const ExperimentReport &report, const std::string &method, const std::string &metric,
                                  std::optional<double> param) {
    for (const auto &s : report.aggregates) {
        if (s.method != method || s.metric != metric) continue;
        if (param.has_value() != s.param.has_value()) continue;
        if (param && std::abs(*param - *s.param) > 1e-9) continue;
        return s;
    }
    throw InvalidArgument("report '" + report.id + "' has no summary for " + method + "/" + metric);
}

void write_rows_csv(std::ostream &out, const ExperimentReport &report) {
    std::set<std::string> metric_names;
    for (const auto &r : report.rows) {
        for (const auto &[k, v] : r.metrics) metric_names.insert(k);
    }
    out << "experiment,method,param_name,param,trial,seed,status,elapsed_ms";
    for (const auto &m : metric_names) out << ',' << csv_field(m);
    out << ",flags,error\n";
    for (const auto &r : report.rows) {
        out << csv_field(report.id) << ',' << csv_field(r.method) << ',' << csv_field(r.param_name) << ','
            << format_real(r.param) << ',' << r.trial << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ','
            << format_real(r.elapsed_ms);
        for (const auto &m : metric_names) {
            const auto it = r.metrics.find(m);
            out << ',' << (it == r.metrics.end() ? std::string{} : metric_cell(it->second));
        }
        out << ',' << csv_field(join(r.flags, ';')) << ',' << csv_field(sanitize(r.error)) << '\n';
    }
}

std::vector<TrialRow> read_rows_csv(std::istream &in, std::string *experiment_id) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("rows CSV is empty");
    const auto header = split_csv_line(line);
    const std::vector<std::string> fixed{"experiment", "method", "param_name", "param",
                                         "trial",      "seed",   "status",     "elapsed_ms"};
    if (header.size() < fixed.size() + 2 || !std::equal(fixed.begin(), fixed.end(), header.begin()) ||
        header[header.size() - 2] != "flags" || header.back() != "error") {
        throw FormatError("rows CSV header does not match the report schema");
    }
    const std::vector<std::string> metric_names(header.begin() + static_cast<std::ptrdiff_t>(fixed.size()),
                                                header.end() - 2);

    std::vector<TrialRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw FormatError("rows CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                              " cells, expected " + std::to_string(header.size()));
        }
        TrialRow r;
        if (experiment_id) *experiment_id = cells[0];
        r.method = cells[1];
        r.param_name = cells[2];
        r.param = parse_real(cells[3]);
        r.trial = static_cast<std::size_t>(std::stoull(cells[4]));
        r.seed = std::stoull(cells[5]);
        r.ok = cells[6] == "ok";
        r.elapsed_ms = parse_real(cells[7]);
        for (std::size_t m = 0; m < metric_names.size(); ++m) {
            const auto &cell = cells[fixed.size() + m];
            r.metrics[metric_names[m]] =
                cell.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_real(cell);
        }
        r.flags = split(cells[cells.size() - 2], ';');
        r.error = cells.back();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summary_csv(std::ostream &out, const std::vector<MetricSummary> &summaries) {
    out << "method,param,metric,n,mean,variance,std\n";
    for (const auto &s : summaries) {
        out << csv_field(s.method) << ',' << (s.param ? format_real(*s.param) : std::string{}) << ','
            << csv_field(s.metric) << ',' << s.n
            << ',' << metric_cell(s.mean) << ',' << metric_cell(s.variance) << ',' << metric_cell(s.stddev) << '\n';
    }
}

nlohmann::json to_json(const ExperimentReport &report) {
    using nlohmann::json;
    json j;
    j["experiment"] = report.id;
    j["config"] = report.config;
    json rows = json::array();
    for (const auto &r : report.rows) {
        json row{{"method", r.method}, {"param_name", r.param_name}, {"param", r.param},
                 {"trial", r.trial},   {"seed", r.seed},             {"ok", r.ok},
                 {"elapsed_ms", r.elapsed_ms}, {"flags", r.flags}};
        json metrics = json::object();
        for (const auto &[k, v] : r.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
        row["metrics"] = metrics;
        if (!r.error.empty()) row["error"] = r.error;
        rows.push_back(std::move(row));
    }
    j["rows"] = rows;
    json aggs = json::array();
    for (const auto &s : report.aggregates) {
        const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
        aggs.push_back({{"method", s.method},
                        {"param", s.param ? json(*s.param) : json(nullptr)},
                        {"metric", s.metric},
                        {"n", s.n},
                        {"mean", num(s.mean)},
                        {"variance", num(s.variance)},
                        {"std", num(s.stddev)}});
    }
    j["aggregates"] = aggs;
    return j;
}

void write_report_files(const std::filesystem::path &dir, const ExperimentReport &report) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / (report.id + "_rows.csv"));
        if (!out) throw Error("cannot write rows CSV in '" + dir.string() + "'");
        write_rows_csv(out, report);
    }
    {
        std::ofstream out(dir / (report.id + "_summary.csv"));
        if (!out) throw Error("cannot write summary CSV in '" + dir.string() + "'");
        write_summary_csv(out, report.aggregates);
    }
    {
        std::ofstream out(dir / (report.id + ".json"));
        if (!out) throw Error("cannot write JSON report in '" + dir.string() + "'");
        out << to_json(report).dump(2) << '\n';
    }
}

}  // namespace causalfm::eval

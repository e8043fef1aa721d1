#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace causalfm::eval {

/// One (trial, method) outcome. Metrics that are undefined for a trial are
/// stored as NaN and skipped by the aggregates.
struct TrialRow {
    std::string method;
    std::string param_name;
    double param = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    std::map<std::string, double> metrics;
    std::vector<std::string> flags;
    double elapsed_ms = 0.0;
};

struct MetricSummary {
    std::string method;
    /// nullopt: pooled over every parameter value.
    std::optional<double> param;
    std::string metric;
    std::size_t n = 0;
    double mean = 0.0;
    /// Population variance (divides by n).
    double variance = 0.0;
    double stddev = 0.0;
};

struct ExperimentReport {
    std::string id;
    nlohmann::json config;
    std::vector<TrialRow> rows;
    std::vector<MetricSummary> aggregates;
};

/// Mean / variance per (method, metric), pooled and per parameter value.
/// Failed rows and non-finite metric values are skipped. Output is sorted by
/// (method, param, metric) with pooled entries first.
std::vector<MetricSummary> aggregate(const std::vector<TrialRow> &rows);

/// Finds a summary; throws InvalidArgument when absent.
const MetricSummary &find_summary(const ExperimentReport &report, const std::string &method, const std::string &metric,
                                  std::optional<double> param = std::nullopt);

/// Rows CSV: experiment,method,param_name,param,trial,seed,status,elapsed_ms,
/// <metrics in sorted order>,flags,error. Flags are ';'-joined.
void write_rows_csv(std::ostream &out, const ExperimentReport &report);
std::vector<TrialRow> read_rows_csv(std::istream &in, std::string *experiment_id = nullptr);

/// Summary CSV: method,param,metric,n,mean,variance,std (param empty when pooled).
void write_summary_csv(std::ostream &out, const std::vector<MetricSummary> &summaries);

nlohmann::json to_json(const ExperimentReport &report);

/// Writes <dir>/<id>_rows.csv, <id>_summary.csv and <id>.json.
void write_report_files(const std::filesystem::path &dir, const ExperimentReport &report);

}  // namespace causalfm::eval

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalfm/causality/causality.hpp"
#include "causalfm/core/csv.hpp"
#include "causalfm/core/error.hpp"
#include "causalfm/eval/experiments.hpp"
#include "causalfm/eval/plot.hpp"
#include "causalfm/eval/report.hpp"
#include "causalfm/eval/score.hpp"
#include "causalfm/forecast/external.hpp"
#include "causalfm/synth/logistic.hpp"
#include "causalfm/synth/mou.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace causalfm;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    fs::path output_dir = ".";
    std::string config_path;
    std::optional<unsigned> jobs;
    std::string bridge_cmd;
    json config = json::object();

    json section(const char *name) const { return config.contains(name) ? config.at(name) : json::object(); }
    Seed seed_or(Seed fallback) const { return seed ? Seed{*seed} : fallback; }
    unsigned jobs_or(unsigned fallback) const { return jobs ? *jobs : fallback; }
};

void load_config(Globals &g) {
    if (g.config_path.empty()) return;
    std::ifstream in(g.config_path);
    if (!in) throw InvalidArgument("cannot open config file '" + g.config_path + "'");
    try {
        g.config = json::parse(in);
    } catch (const json::parse_error &e) {
        throw FormatError("config file '" + g.config_path + "' is not valid JSON: " + e.what());
    }
    if (!g.config.is_object()) throw FormatError("config file must hold a JSON object");
    for (const auto &[key, value] : g.config.items()) {
        if (key != "seed" && key != "jobs" && key != "bridge_cmd" && key != "logistic" && key != "mou" &&
            key != "forecast" && key != "causality" && key != "gen") {
            throw InvalidArgument("unknown top-level config key '" + key + "'");
        }
    }
    if (!g.seed && g.config.contains("seed")) g.seed = g.config["seed"].get<std::uint64_t>();
    if (!g.jobs && g.config.contains("jobs")) g.jobs = g.config["jobs"].get<unsigned>();
    if (g.bridge_cmd.empty() && g.config.contains("bridge_cmd")) g.bridge_cmd = g.config["bridge_cmd"].get<std::string>();
}

bool needs_bridge(const forecast::ForecasterSpec &spec) {
    return std::holds_alternative<forecast::External>(spec);
}

// Fills bridge commands into external specs; returns a pool when any needs one.
std::unique_ptr<forecast::BridgePool> make_pool(const Globals &g, std::vector<forecast::ForecasterSpec *> specs) {
    bool any = false;
    for (auto *s : specs) {
        if (!needs_bridge(*s)) continue;
        if (g.bridge_cmd.empty()) throw InvalidArgument("an external forecaster needs --bridge-cmd");
        *s = forecast::with_bridge_command(*s, g.bridge_cmd);
        any = true;
    }
    if (!any) return nullptr;
    return std::make_unique<forecast::BridgePool>(forecast::External{g.bridge_cmd}, std::max(1u, g.jobs_or(1)));
}

fs::path prepare_output(const Globals &g) {
    fs::create_directories(g.output_dir);
    return g.output_dir;
}

void print_summary(const eval::ExperimentReport &report, const std::vector<std::string> &metrics) {
    std::printf("%-20s %-14s %10s %10s %6s\n", "method", "metric", "mean", "variance", "n");
    for (const auto &s : report.aggregates) {
        if (s.param) continue;
        if (std::find(metrics.begin(), metrics.end(), s.metric) == metrics.end()) continue;
        std::printf("%-20s %-14s %10.4f %10.4f %6zu\n", s.method.c_str(), s.metric.c_str(), s.mean, s.variance, s.n);
    }
    std::size_t failed = 0;
    for (const auto &r : report.rows) failed += r.ok ? 0 : 1;
    if (failed) std::printf("failed rows: %zu of %zu\n", failed, report.rows.size());
}

const std::vector<std::string> kGraphMetrics{"accuracy", "precision", "recall", "sign_mismatch"};

// ---- gen ----

struct GenArgs {
    std::string kind;
    std::string name;
    double alpha = 0.1;
    double r = 3.8;
    std::size_t n = 100;
    double density = 0.5;
    std::size_t nodes = 10;
    double sigma2 = 0.2;
    std::size_t series = 20;
};

void run_gen(const Globals &g, const GenArgs &a) {
    const auto dir = prepare_output(g);
    const std::string name = a.name.empty() ? a.kind : a.name;
    const Seed seed = g.seed_or(Seed{1});
    if (a.kind == "ar") {
        const auto panel = eval::make_ar_panel(a.series, a.n, seed);
        write_panel_csv(dir / (name + ".csv"), panel);
        std::printf("wrote %s (%zu x %zu)\n", (dir / (name + ".csv")).c_str(), panel.length(), panel.width());
        return;
    }
    synth::GeneratedPanel out = [&] {
        if (a.kind == "logistic") {
            synth::LogisticSpec spec;
            spec.alpha = a.alpha;
            spec.r = a.r;
            spec.n = a.n;
            spec.seed = seed;
            return synth::gen_logistic(spec);
        }
        synth::MouSpec spec;
        spec.density = a.density;
        spec.n_nodes = a.nodes;
        spec.sigma2 = a.sigma2;
        spec.t_points = a.n;
        spec.seed = seed;
        return synth::gen_mou(spec);
    }();
    write_panel_csv(dir / (name + ".csv"), out.panel);
    write_graph_csv(dir / (name + "_truth.csv"), out.truth);
    std::printf("wrote %s (%zu x %zu) and %s (%zu edges)\n", (dir / (name + ".csv")).c_str(), out.panel.length(),
                out.panel.width(), (dir / (name + "_truth.csv")).c_str(), out.truth.n_edges());
}

// ---- forecast ----

struct ForecastArgs {
    std::string panel;
    std::vector<std::string> forecasters;
    std::optional<double> train_fraction;
};

void run_forecast(const Globals &g, const ForecastArgs &a) {
    eval::ForecastBenchmarkConfig cfg;
    eval::apply_json(g.section("forecast"), cfg);
    if (!a.forecasters.empty()) {
        cfg.forecasters.clear();
        for (const auto &f : a.forecasters) cfg.forecasters.push_back(forecast::parse_forecaster(f));
    } else if (!g.bridge_cmd.empty() && !g.section("forecast").contains("forecasters")) {
        cfg.forecasters.push_back(forecast::External{});
    }
    if (a.train_fraction) cfg.split.train_fraction = *a.train_fraction;
    cfg.jobs = g.jobs_or(cfg.jobs);
    std::vector<forecast::ForecasterSpec *> specs;
    for (auto &f : cfg.forecasters) specs.push_back(&f);
    auto pool = make_pool(g, specs);

    const auto panel = read_panel_csv(fs::path(a.panel));
    auto report = eval::run_forecast_benchmark(panel, cfg, pool.get());
    report.config["panel"] = a.panel;
    eval::write_report_files(prepare_output(g), report);
    print_summary(report, {"mape"});
}

// ---- causality ----

struct CausalityArgs {
    std::string panel;
    std::string truth;
    std::optional<std::string> method;
    std::optional<std::string> forecaster;
    std::optional<double> alpha;
    std::optional<std::size_t> max_lag;
    std::optional<std::size_t> context;
    std::optional<std::size_t> fixed_lag;
    std::optional<std::string> bh;
};

void run_causality(const Globals &g, const CausalityArgs &a) {
    causality::CausalityConfig cfg;
    eval::apply_json(g.section("causality"), cfg);
    if (a.method) cfg.method = causality::parse_method(*a.method);
    if (a.forecaster) cfg.forecaster = forecast::parse_forecaster(*a.forecaster);
    if (a.alpha) cfg.alpha = *a.alpha;
    if (a.max_lag) cfg.max_lag = *a.max_lag;
    if (a.context) cfg.context_w = *a.context;
    if (a.fixed_lag) cfg.granger_fixed_lag = *a.fixed_lag;
    if (a.bh) cfg.bh_family = causality::parse_bh_family(*a.bh);
    auto pool = cfg.method == causality::Method::Residual ? make_pool(g, {&cfg.forecaster}) : nullptr;

    const auto panel = read_panel_csv(fs::path(a.panel));
    const auto result = causality::infer_graph(panel, cfg, pool.get(), g.jobs_or(1));

    const auto dir = prepare_output(g);
    {
        std::ofstream out(dir / "edges.csv");
        if (!out) throw Error("cannot write edges.csv in '" + dir.string() + "'");
        causality::write_edge_tests_csv(out, result.tests, panel.names());
    }
    std::printf("%zu ordered pairs tested, %zu significant; wrote %s\n", result.tests.size(), result.graph.n_edges(),
                (dir / "edges.csv").c_str());

    if (!a.truth.empty()) {
        std::ifstream in(a.truth);
        if (!in) throw InvalidArgument("cannot open truth graph '" + a.truth + "'");
        const auto truth = read_graph_csv(in, panel.width());
        const auto s = eval::score_graph(result.graph, truth);
        json j{{"tp", s.tp},
               {"fp", s.fp},
               {"tn", s.tn},
               {"fn", s.fn},
               {"accuracy", s.accuracy},
               {"precision", s.precision},
               {"recall", s.recall},
               {"sign_mismatch", s.sign_mismatch_undefined ? json(nullptr) : json(s.sign_mismatch_rate)}};
        std::ofstream(dir / "score.json") << j.dump(2) << '\n';
        std::printf("accuracy %.4f precision %.4f recall %.4f\n", s.accuracy, s.precision, s.recall);
    }
}

// ---- experiment ----

struct ExperimentArgs {
    std::optional<std::size_t> trials;
    std::vector<std::string> methods;
    bool no_plot = false;
};

std::vector<eval::MethodSpec> parse_methods(const std::vector<std::string> &texts) {
    // "granger" or "residual" optionally followed by "@<forecaster>".
    std::vector<eval::MethodSpec> out;
    for (const auto &t : texts) {
        eval::MethodSpec m;
        const auto at = t.find('@');
        m.causality.method = causality::parse_method(t.substr(0, at));
        if (at != std::string::npos) m.causality.forecaster = forecast::parse_forecaster(t.substr(at + 1));
        m.label = m.causality.method == causality::Method::Granger
                      ? "granger"
                      : "residual_" + forecast::to_string(m.causality.forecaster);
        out.push_back(std::move(m));
    }
    return out;
}

template <typename Config>
std::unique_ptr<forecast::BridgePool> prepare_methods(const Globals &g, const ExperimentArgs &a, Config &cfg) {
    if (!a.methods.empty()) cfg.methods = parse_methods(a.methods);
    if (a.trials) cfg.trials = *a.trials;
    cfg.master = g.seed_or(cfg.master);
    cfg.jobs = g.jobs_or(cfg.jobs);
    std::vector<forecast::ForecasterSpec *> specs;
    for (auto &m : cfg.methods) {
        if (m.causality.method == causality::Method::Residual) specs.push_back(&m.causality.forecaster);
    }
    return make_pool(g, specs);
}

void run_experiment_logistic(const Globals &g, const ExperimentArgs &a) {
    eval::LogisticExperimentConfig cfg;
    eval::apply_json(g.section("logistic"), cfg);
    auto pool = prepare_methods(g, a, cfg);
    const auto report = eval::run_logistic_experiment(cfg, pool.get());
    eval::write_report_files(prepare_output(g), report);
    print_summary(report, kGraphMetrics);
    for (const auto &m : cfg.methods) {
        const auto modes = eval::error_modes(report, m.label);
        if (!modes.empty()) std::printf("%s most frequent error: %s (%zu)\n", m.label.c_str(), modes[0].flag.c_str(),
                                        modes[0].count);
    }
}

void run_experiment_mou(const Globals &g, const ExperimentArgs &a) {
    eval::MouExperimentConfig cfg;
    eval::apply_json(g.section("mou"), cfg);
    auto pool = prepare_methods(g, a, cfg);
    const auto report = eval::run_mou_experiment(cfg, pool.get());
    const auto dir = prepare_output(g);
    eval::write_report_files(dir, report);
    if (!a.no_plot) eval::write_curves_svg(dir / "mou_curves.svg", report, kGraphMetrics, "density");
    print_summary(report, kGraphMetrics);
}

// ---- report ----

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string plot_metrics;
};

void run_report(const Globals &g, const ReportArgs &a) {
    eval::ExperimentReport report;
    json sources = json::array();
    for (const auto &path : a.inputs) {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open rows CSV '" + path + "'");
        std::string id;
        auto rows = eval::read_rows_csv(in, &id);
        if (report.id.empty()) report.id = id;
        for (auto &r : rows) report.rows.push_back(std::move(r));
        sources.push_back(path);
    }
    if (report.id.empty()) report.id = "report";
    report.config = {{"sources", sources}};
    report.aggregates = eval::aggregate(report.rows);

    const auto dir = prepare_output(g);
    {
        std::ofstream out(dir / (report.id + "_summary.csv"));
        if (!out) throw Error("cannot write summary CSV in '" + dir.string() + "'");
        eval::write_summary_csv(out, report.aggregates);
    }
    std::ofstream(dir / (report.id + ".json")) << eval::to_json(report).dump(2) << '\n';
    if (!a.plot_metrics.empty()) {
        std::vector<std::string> metrics;
        for (const auto &m : split_csv_line(a.plot_metrics)) metrics.push_back(m);
        const auto label = report.rows.empty() ? std::string("param") : report.rows.front().param_name;
        eval::write_curves_svg(dir / (report.id + "_curves.svg"), report, metrics, label);
    }
    std::vector<std::string> metrics;
    for (const auto &s : report.aggregates) {
        if (std::find(metrics.begin(), metrics.end(), s.metric) == metrics.end()) metrics.push_back(s.metric);
    }
    print_summary(report, metrics);
}

// ---- errors ----

int fail(const char *kind, const std::string &message, int code) {
    std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"causalfm: synthetic causal benchmarks, forecasting baselines and causality tests"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed_flag = 0;
    unsigned jobs_flag = 1;
    auto *seed_opt = app.add_option("--seed", seed_flag, "master seed");
    app.add_option("--output-dir", g.output_dir, "directory for output files");
    app.add_option("--config", g.config_path, "JSON config file");
    auto *jobs_opt = app.add_option("--jobs", jobs_flag, "worker threads (0 = all cores)");
    app.add_option("--bridge-cmd", g.bridge_cmd, "launch command of an external forecaster");

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen", "generate a synthetic panel and its truth graph");
    gen_cmd->add_option("kind", gen.kind, "logistic, mou or ar")->required()->check(CLI::IsMember({"logistic", "mou", "ar"}));
    gen_cmd->add_option("--name", gen.name, "output file stem");
    gen_cmd->add_option("--alpha", gen.alpha, "logistic coupling");
    gen_cmd->add_option("--r", gen.r, "logistic growth rate");
    gen_cmd->add_option("--length", gen.n, "series length");
    gen_cmd->add_option("--density", gen.density, "MOU edge density");
    gen_cmd->add_option("--nodes", gen.nodes, "MOU node count");
    gen_cmd->add_option("--sigma2", gen.sigma2, "MOU noise variance");
    gen_cmd->add_option("--series", gen.series, "AR panel width");

    ForecastArgs fc;
    auto *fc_cmd = app.add_subcommand("forecast", "forecast benchmark on a panel CSV");
    fc_cmd->add_option("panel", fc.panel, "panel CSV")->required();
    fc_cmd->add_option("--forecaster", fc.forecasters, "forecaster spec (repeatable)");
    fc_cmd->add_option("--train-fraction", fc.train_fraction, "train share of each series");

    CausalityArgs ca;
    auto *ca_cmd = app.add_subcommand("causality", "infer a causal graph from a panel CSV");
    ca_cmd->add_option("panel", ca.panel, "panel CSV")->required();
    ca_cmd->add_option("--method", ca.method, "granger or residual");
    ca_cmd->add_option("--forecaster", ca.forecaster, "forecaster of the residual method");
    ca_cmd->add_option("--alpha", ca.alpha, "significance level");
    ca_cmd->add_option("--max-lag", ca.max_lag, "largest lag tested");
    ca_cmd->add_option("--context", ca.context, "forecaster context window");
    ca_cmd->add_option("--fixed-lag", ca.fixed_lag, "single Granger order instead of a sweep");
    ca_cmd->add_option("--bh", ca.bh, "BH family: pair or panel");
    ca_cmd->add_option("--truth", ca.truth, "truth graph CSV to score against");

    ExperimentArgs ex;
    auto *ex_cmd = app.add_subcommand("experiment", "run a synthetic sweep");
    ex_cmd->require_subcommand(1);
    auto *ex_log = ex_cmd->add_subcommand("logistic", "coupled logistic maps over the alpha grid");
    auto *ex_mou = ex_cmd->add_subcommand("mou", "MOU networks over the density grid");
    for (auto *c : {ex_log, ex_mou}) {
        c->add_option("--trials", ex.trials, "trials per grid value");
        c->add_option("--method", ex.methods, "granger | residual[@forecaster] (repeatable)");
    }
    ex_mou->add_flag("--no-plot", ex.no_plot, "skip the SVG curves");

    ReportArgs rep;
    auto *rep_cmd = app.add_subcommand("report", "re-aggregate rows CSV files");
    rep_cmd->add_option("rows", rep.inputs, "rows CSV files")->required();
    rep_cmd->add_option("--plot", rep.plot_metrics, "comma-separated metrics to plot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return fail("usage", e.what(), 2);
    }
    if (seed_opt->count()) g.seed = seed_flag;
    if (jobs_opt->count()) g.jobs = jobs_flag;

    try {
        load_config(g);
        if (gen_cmd->parsed()) {
            run_gen(g, gen);
        } else if (fc_cmd->parsed()) {
            run_forecast(g, fc);
        } else if (ca_cmd->parsed()) {
            run_causality(g, ca);
        } else if (ex_log->parsed()) {
            run_experiment_logistic(g, ex);
        } else if (ex_mou->parsed()) {
            run_experiment_mou(g, ex);
        } else if (rep_cmd->parsed()) {
            run_report(g, rep);
        }
    } catch (const FormatError &e) {
        return fail("format", e.what(), 3);
    } catch (const forecast::BridgeError &e) {
        return fail("bridge", e.what(), 4);
    } catch (const InvalidArgument &e) {
        return fail("invalid_argument", e.what(), 2);
    } catch (const nlohmann::json::exception &e) {
        return fail("config", e.what(), 2);
    } catch (const std::exception &e) {
        return fail("runtime", e.what(), 1);
    }
    return 0;
}

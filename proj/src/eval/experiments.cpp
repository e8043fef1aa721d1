#include "causalfm/eval/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <map>

#include "causalfm/core/csv.hpp"
#include "causalfm/core/error.hpp"
#include "causalfm/core/parallel.hpp"
#include "causalfm/forecast/forecaster.hpp"
#include "causalfm/synth/logistic.hpp"
#include "causalfm/synth/mou.hpp"

namespace causalfm::eval {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string pair_label(const std::vector<std::string> &names, std::size_t s, std::size_t t) {
    return names.at(s) + "->" + names.at(t);
}

// One generated panel per (param, trial); every method sees the same data.
template <typename Generate>
std::vector<TrialRow> sweep(const std::string &experiment, const std::string &param_name,
                            const std::vector<double> &params, std::size_t trials, Seed master,
                            const std::vector<MethodSpec> &methods, unsigned jobs, forecast::BridgePool *bridges,
                            Generate &&generate) {
    if (methods.empty()) throw InvalidArgument(experiment + " experiment needs at least one method");
    for (const auto &m : methods) causality::validate(m.causality);

    const std::size_t n_tasks = params.size() * trials;
    std::vector<std::vector<TrialRow>> slots(n_tasks);
    parallel_for(n_tasks, jobs, [&](std::size_t k) {
        const double param = params[k / trials];
        const std::size_t trial = k % trials;
        const Seed seed = trial_seed(master, experiment, param, trial);

        auto base = [&](const MethodSpec &m) {
            TrialRow row;
            row.method = m.label;
            row.param_name = param_name;
            row.param = param;
            row.trial = trial;
            row.seed = seed.value;
            return row;
        };

        std::optional<synth::GeneratedPanel> generated;
        std::string gen_error;
        try {
            generated.emplace(generate(param, seed));
        } catch (const Error &e) {
            gen_error = std::string("generation failed: ") + e.what();
        }

        for (const auto &m : methods) {
            TrialRow row = base(m);
            const auto start = std::chrono::steady_clock::now();
            if (!generated) {
                row.ok = false;
                row.error = gen_error;
            } else {
                try {
                    const auto inferred = causality::infer_graph(generated->panel, m.causality, bridges, 1);
                    const auto score = score_graph(inferred.graph, generated->truth);
                    fill_score(row, score, inferred.graph, generated->truth, generated->panel.names());
                    row.metrics["true_edges"] = static_cast<double>(generated->truth.n_edges());
                } catch (const Error &e) {
                    row.ok = false;
                    row.error = e.what();
                }
            }
            row.elapsed_ms = elapsed_ms_since(start);
            slots[k].push_back(std::move(row));
        }
    });

    std::vector<TrialRow> rows;
    for (auto &s : slots) {
        for (auto &r : s) rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TrialRow &a, const TrialRow &b) {
        return std::tie(a.method, a.param, a.trial) < std::tie(b.method, b.param, b.trial);
    });
    return rows;
}

void check_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where) {
    if (!j.is_object()) throw InvalidArgument(where + " config must be an object");
    for (const auto &[key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            throw InvalidArgument("unknown key '" + key + "' in " + where + " config");
        }
    }
}

template <typename T>
void read_if(const json &j, const char *key, T &out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<MethodSpec> methods_from_json(const json &j) {
    if (!j.is_array()) throw InvalidArgument("methods must be an array");
    std::vector<MethodSpec> out;
    for (const auto &m : j) out.push_back(method_from_json(m));
    return out;
}

json leak_json(const std::optional<double> &leak) {
    return leak ? json(*leak) : json(nullptr);
}

}  // namespace

std::vector<MethodSpec> default_methods() {
    causality::CausalityConfig granger;
    granger.method = causality::Method::Granger;
    causality::CausalityConfig residual;
    residual.method = causality::Method::Residual;
    residual.forecaster = forecast::Arima{{5, 0, 0}};
    return {{"granger", granger}, {"residual_ar5", residual}};
}

Seed trial_seed(Seed master, const std::string &experiment, double param, std::size_t trial) {
    return derive_seed(master, experiment + "/" + format_real(param) + "/" + std::to_string(trial));
}

void fill_score(TrialRow &row, const GraphScore &score, const CausalGraph &predicted, const CausalGraph &truth,
                const std::vector<std::string> &names) {
    row.metrics["tp"] = static_cast<double>(score.tp);
    row.metrics["fp"] = static_cast<double>(score.fp);
    row.metrics["tn"] = static_cast<double>(score.tn);
    row.metrics["fn"] = static_cast<double>(score.fn);
    row.metrics["accuracy"] = score.accuracy;
    row.metrics["precision"] = score.precision;
    row.metrics["recall"] = score.recall;
    row.metrics["sign_mismatch"] = score.sign_mismatch_undefined ? kNaN : score.sign_mismatch_rate;
    if (score.precision_undefined) row.flags.push_back("precision_undefined");
    if (score.recall_undefined) row.flags.push_back("recall_undefined");
    for (const auto &e : score.errors) {
        row.flags.push_back((e.false_positive ? "fp:" : "fn:") + pair_label(names, e.source, e.target));
    }
    for (const auto &e : truth.edges()) {
        const auto p = predicted.edge(e.source, e.target);
        if (p && *p != e.sign) row.flags.push_back("sign:" + pair_label(names, e.source, e.target));
    }
}

ExperimentReport run_logistic_experiment(const LogisticExperimentConfig &cfg, forecast::BridgePool *bridges) {
    ExperimentReport report;
    report.id = "logistic";
    report.config = to_json(cfg);
    report.rows = sweep("logistic", "alpha", cfg.alphas, cfg.trials, cfg.master, cfg.methods, cfg.jobs, bridges,
                        [&](double alpha, Seed seed) {
                            synth::LogisticSpec spec;
                            spec.r = cfg.r;
                            spec.alpha = alpha;
                            spec.n = cfg.n;
                            spec.noise_halfwidth = cfg.noise_halfwidth;
                            spec.seed = seed;
                            return synth::gen_logistic(spec);
                        });
    report.aggregates = aggregate(report.rows);
    return report;
}

ExperimentReport run_mou_experiment(const MouExperimentConfig &cfg, forecast::BridgePool *bridges) {
    ExperimentReport report;
    report.id = "mou";
    report.config = to_json(cfg);
    report.rows = sweep("mou", "density", cfg.densities, cfg.trials, cfg.master, cfg.methods, cfg.jobs, bridges,
                        [&](double density, Seed seed) {
                            synth::MouSpec spec;
                            spec.n_nodes = cfg.n_nodes;
                            spec.density = density;
                            spec.sigma2 = cfg.sigma2;
                            spec.t_points = cfg.t_points;
                            spec.dt = cfg.dt;
                            spec.burn_in = cfg.burn_in;
                            spec.leak = cfg.leak;
                            spec.seed = seed;
                            return synth::gen_mou(spec);
                        });
    report.aggregates = aggregate(report.rows);
    return report;
}

ExperimentReport run_forecast_benchmark(const MultiSeries &panel, const ForecastBenchmarkConfig &cfg,
                                        forecast::BridgePool *bridges) {
    if (cfg.forecasters.empty()) throw InvalidArgument("forecast benchmark needs at least one forecaster");
    for (const auto &f : cfg.forecasters) forecast::validate(f);

    const auto [scaled, params] = minmax_scale(panel);
    const auto [train, test] = split(scaled, cfg.split);
    const std::size_t horizon = test.length();
    const std::size_t n_series = panel.width();
    const std::size_t n_fc = cfg.forecasters.size();

    std::vector<TrialRow> rows(n_series * n_fc);
    parallel_for(rows.size(), cfg.jobs, [&](std::size_t k) {
        const std::size_t j = k / n_fc;
        const auto &spec = cfg.forecasters[k % n_fc];
        TrialRow &row = rows[k];
        row.method = forecast::to_string(spec);
        row.param_name = "series";
        row.param = static_cast<double>(j);
        row.trial = j;
        row.flags.push_back(panel.names()[j]);
        if (params[j].degenerate()) row.flags.push_back("constant");
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto fc = forecast::fit_predict(spec, train.column(j), horizon, bridges);
            row.metrics["mape"] = forecast::mape(test.column(j), fc.values);
        } catch (const Error &e) {
            row.ok = false;
            row.error = e.what();
        }
        row.elapsed_ms = elapsed_ms_since(start);
    });
    std::stable_sort(rows.begin(), rows.end(), [](const TrialRow &a, const TrialRow &b) {
        return std::tie(a.method, a.trial) < std::tie(b.method, b.trial);
    });

    ExperimentReport report;
    report.id = "forecast";
    report.config = to_json(cfg);
    report.config["series"] = n_series;
    report.config["length"] = panel.length();
    report.config["horizon"] = horizon;
    report.rows = std::move(rows);
    report.aggregates = aggregate(report.rows);
    return report;
}

MultiSeries make_ar_panel(std::size_t n_series, std::size_t length, Seed seed) {
    if (n_series < 1 || length < 2) throw InvalidArgument("AR panel needs >= 1 series of length >= 2");
    constexpr std::size_t burn_in = 100;
    Eigen::MatrixXd data(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(n_series));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n_series; ++j) {
        Rng rng(seed, j);
        const double phi = rng.uniform(0.5, 0.9);
        double y = 0.0;
        for (std::size_t t = 0; t < burn_in + length; ++t) {
            y = phi * y + rng.normal();
            if (t >= burn_in) data(static_cast<Eigen::Index>(t - burn_in), static_cast<Eigen::Index>(j)) = y;
        }
        names.push_back("AR" + std::to_string(j + 1));
    }
    return MultiSeries(std::move(names), std::move(data));
}

std::vector<ErrorMode> error_modes(const ExperimentReport &report, const std::string &method) {
    std::map<std::string, std::size_t> counts;
    for (const auto &r : report.rows) {
        if (r.method != method || !r.ok) continue;
        for (const auto &f : r.flags) {
            if (f.rfind("fp:", 0) == 0 || f.rfind("fn:", 0) == 0 || f.rfind("sign:", 0) == 0) ++counts[f];
        }
    }
    std::vector<ErrorMode> out;
    for (const auto &[flag, n] : counts) out.push_back({flag, n});
    std::stable_sort(out.begin(), out.end(), [](const ErrorMode &a, const ErrorMode &b) { return a.count > b.count; });
    return out;
}

json to_json(const MethodSpec &m) {
    const auto &c = m.causality;
    json j{{"label", m.label},
           {"method", std::string(causality::to_string(c.method))},
           {"alpha", c.alpha},
           {"max_lag", c.max_lag},
           {"bh", std::string(causality::to_string(c.bh_family))}};
    if (c.method == causality::Method::Residual) {
        j["context"] = c.context_w;
        j["forecaster"] = forecast::to_string(c.forecaster);
    }
    if (c.granger_fixed_lag) j["fixed_lag"] = *c.granger_fixed_lag;
    return j;
}

json to_json(const LogisticExperimentConfig &cfg) {
    json methods = json::array();
    for (const auto &m : cfg.methods) methods.push_back(to_json(m));
    return {{"alphas", cfg.alphas}, {"trials", cfg.trials}, {"n", cfg.n},
            {"r", cfg.r},           {"noise_halfwidth", cfg.noise_halfwidth},
            {"methods", methods},   {"seed", cfg.master.value}};
}

json to_json(const MouExperimentConfig &cfg) {
    json methods = json::array();
    for (const auto &m : cfg.methods) methods.push_back(to_json(m));
    return {{"densities", cfg.densities}, {"trials", cfg.trials},   {"n_nodes", cfg.n_nodes},
            {"t_points", cfg.t_points},   {"sigma2", cfg.sigma2},   {"dt", cfg.dt},
            {"burn_in", cfg.burn_in},     {"leak", leak_json(cfg.leak)}, {"methods", methods},
            {"seed", cfg.master.value}};
}

json to_json(const ForecastBenchmarkConfig &cfg) {
    json fc = json::array();
    for (const auto &f : cfg.forecasters) fc.push_back(forecast::to_string(f));
    return {{"train_fraction", cfg.split.train_fraction}, {"forecasters", fc}};
}

void apply_json(const json &j, causality::CausalityConfig &cfg) {
    check_keys(j, {"label", "method", "alpha", "max_lag", "context", "fixed_lag", "bh", "forecaster"}, "method");
    if (j.contains("method")) cfg.method = causality::parse_method(j.at("method").get<std::string>());
    read_if(j, "alpha", cfg.alpha);
    read_if(j, "max_lag", cfg.max_lag);
    read_if(j, "context", cfg.context_w);
    if (j.contains("fixed_lag")) {
        const auto &v = j.at("fixed_lag");
        cfg.granger_fixed_lag = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
    }
    if (j.contains("bh")) cfg.bh_family = causality::parse_bh_family(j.at("bh").get<std::string>());
    if (j.contains("forecaster")) cfg.forecaster = forecast::parse_forecaster(j.at("forecaster").get<std::string>());
}

MethodSpec method_from_json(const json &j) {
    MethodSpec m;
    apply_json(j, m.causality);
    m.label = j.contains("label") ? j.at("label").get<std::string>() : std::string(causality::to_string(m.causality.method));
    causality::validate(m.causality);
    return m;
}

void apply_json(const json &j, LogisticExperimentConfig &cfg) {
    check_keys(j, {"alphas", "trials", "n", "r", "noise_halfwidth", "methods", "seed", "jobs"}, "logistic");
    read_if(j, "alphas", cfg.alphas);
    read_if(j, "trials", cfg.trials);
    read_if(j, "n", cfg.n);
    read_if(j, "r", cfg.r);
    read_if(j, "noise_halfwidth", cfg.noise_halfwidth);
    if (j.contains("methods")) cfg.methods = methods_from_json(j.at("methods"));
    if (j.contains("seed")) cfg.master = Seed{j.at("seed").get<std::uint64_t>()};
    read_if(j, "jobs", cfg.jobs);
}

void apply_json(const json &j, MouExperimentConfig &cfg) {
    check_keys(j,
               {"densities", "trials", "n_nodes", "t_points", "sigma2", "dt", "burn_in", "leak", "methods", "seed",
                "jobs"},
               "mou");
    read_if(j, "densities", cfg.densities);
    read_if(j, "trials", cfg.trials);
    read_if(j, "n_nodes", cfg.n_nodes);
    read_if(j, "t_points", cfg.t_points);
    read_if(j, "sigma2", cfg.sigma2);
    read_if(j, "dt", cfg.dt);
    read_if(j, "burn_in", cfg.burn_in);
    if (j.contains("leak")) {
        const auto &v = j.at("leak");
        cfg.leak = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    }
    if (j.contains("methods")) cfg.methods = methods_from_json(j.at("methods"));
    if (j.contains("seed")) cfg.master = Seed{j.at("seed").get<std::uint64_t>()};
    read_if(j, "jobs", cfg.jobs);
}

void apply_json(const json &j, ForecastBenchmarkConfig &cfg) {
    check_keys(j, {"train_fraction", "forecasters", "jobs"}, "forecast");
    read_if(j, "train_fraction", cfg.split.train_fraction);
    if (j.contains("forecasters")) {
        cfg.forecasters.clear();
        for (const auto &f : j.at("forecasters")) cfg.forecasters.push_back(forecast::parse_forecaster(f.get<std::string>()));
    }
    read_if(j, "jobs", cfg.jobs);
}

}  // namespace causalfm::eval

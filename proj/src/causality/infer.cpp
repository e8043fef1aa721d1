#include <algorithm>
#include <ostream>
#include <string>

#include "causalfm/causality/causality.hpp"
#include "causalfm/core/csv.hpp"
#include "causalfm/core/parallel.hpp"
#include "causalfm/forecast/forecaster.hpp"
#include "causalfm/stats/multiple_testing.hpp"

namespace causalfm::causality {

std::string_view to_string(Method m) {
    return m == Method::Granger ? "granger" : "residual";
}

std::string_view to_string(BhFamily f) {
    return f == BhFamily::PerPair ? "pair" : "panel";
}

Method parse_method(std::string_view text) {
    if (text == "granger") return Method::Granger;
    if (text == "residual") return Method::Residual;
    throw InvalidArgument("unknown causality method '" + std::string(text) + "'");
}

BhFamily parse_bh_family(std::string_view text) {
    if (text == "pair" || text == "per_pair") return BhFamily::PerPair;
    if (text == "panel" || text == "per_panel") return BhFamily::PerPanel;
    throw InvalidArgument("unknown BH family '" + std::string(text) + "'");
}

void validate(const CausalityConfig &cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (cfg.max_lag < 1) throw InvalidArgument("max lag must be >= 1");
    if (cfg.granger_fixed_lag && *cfg.granger_fixed_lag < 1) throw InvalidArgument("fixed Granger lag must be >= 1");
    if (cfg.method == Method::Residual && cfg.max_lag >= cfg.context_w) {
        throw InvalidArgument("max lag must be smaller than the context window");
    }
    forecast::validate(cfg.forecaster);
}

GraphInference infer_graph(const MultiSeries &panel, const CausalityConfig &cfg, forecast::BridgePool *bridges,
                           unsigned jobs) {
    validate(cfg);
    const std::size_t n = panel.width();
    if (n < 2) throw InvalidArgument("causal inference needs at least 2 series");
    for (std::size_t j = 0; j < n; ++j) {
        const auto c = panel.column(j);
        if (std::all_of(c.begin(), c.end(), [&](double v) { return v == c.front(); })) {
            throw InvalidArgument("series '" + panel.names()[j] + "' is constant; causality is untestable");
        }
    }

    // Residuals depend only on the target, so each is computed once.
    std::vector<std::vector<double>> residuals;
    if (cfg.method == Method::Residual) {
        if (panel.length() <= cfg.context_w + cfg.max_lag + 3) {
            throw InvalidArgument("panel of length " + std::to_string(panel.length()) + " too short for context " +
                                  std::to_string(cfg.context_w) + " and max lag " + std::to_string(cfg.max_lag));
        }
        residuals.resize(n);
        parallel_for(n, jobs, [&](std::size_t j) {
            try {
                residuals[j] = forecast::rolling_one_step(cfg.forecaster, panel.column(j), cfg.context_w, bridges)
                                   .residuals;
            } catch (const Error &e) {
                throw PairError(j, j, "forecasting target '" + panel.names()[j] + "': " + e.what());
            }
        });
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s != t) pairs.emplace_back(s, t);
        }
    }

    std::vector<PairSweep> sweeps(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        const auto [s, t] = pairs[k];
        try {
            sweeps[k] = cfg.method == Method::Granger ? granger_sweep(panel.column(s), panel.column(t), cfg)
                                                      : residual_sweep(panel.column(s), residuals[t], cfg);
        } catch (const Error &e) {
            throw PairError(s, t, "pair " + panel.names()[s] + " -> " + panel.names()[t] + ": " + e.what());
        }
        sweeps[k].source = s;
        sweeps[k].target = t;
    });

    std::vector<std::vector<double>> adjusted(sweeps.size());
    if (cfg.bh_family == BhFamily::PerPair) {
        for (std::size_t k = 0; k < sweeps.size(); ++k) {
            std::vector<double> raw;
            for (const auto &l : sweeps[k].lags) raw.push_back(l.raw_p);
            adjusted[k] = stats::bh_adjust(raw);
        }
    } else {
        std::vector<double> raw;
        for (const auto &s : sweeps) {
            for (const auto &l : s.lags) raw.push_back(l.raw_p);
        }
        const auto all = stats::bh_adjust(raw);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < sweeps.size(); ++k) {
            const auto m = sweeps[k].lags.size();
            adjusted[k].assign(all.begin() + static_cast<std::ptrdiff_t>(offset),
                               all.begin() + static_cast<std::ptrdiff_t>(offset + m));
            offset += m;
        }
    }

    GraphInference out{CausalGraph(n), {}};
    out.tests.reserve(sweeps.size());
    for (std::size_t k = 0; k < sweeps.size(); ++k) {
        auto e = finalize(sweeps[k], adjusted[k], cfg.alpha);
        if (e.significant) out.graph.add_edge(e.source, e.target, e.sign);
        out.tests.push_back(e);
    }
    return out;
}

void write_edge_tests_csv(std::ostream &out, const std::vector<EdgeTest> &tests,
                          const std::vector<std::string> &names) {
    out << "source,target,lag,stat,raw_p,adj_p,r2,sign,significant\n";
    for (const auto &e : tests) {
        out << csv_field(names.at(e.source)) << ',' << csv_field(names.at(e.target)) << ',' << e.chosen_lag << ','
            << format_real(e.statistic) << ',' << format_real(e.raw_p) << ',' << format_real(e.adjusted_p) << ','
            << format_real(e.r_squared) << ',' << (e.sign == Sign::Excitatory ? "+1" : "-1") << ','
            << (e.significant ? 1 : 0) << '\n';
    }
}

}  // namespace causalfm::causality

#include "causalfm/eval/score.hpp"

#include <string>

#include "causalfm/core/error.hpp"

namespace causalfm::eval {

GraphScore score_graph(const CausalGraph &predicted, const CausalGraph &truth) {
    if (predicted.n_nodes() != truth.n_nodes()) {
        throw InvalidArgument("score_graph: predicted graph has " + std::to_string(predicted.n_nodes()) +
                              " nodes, truth has " + std::to_string(truth.n_nodes()));
    }
    GraphScore s;
    const std::size_t n = truth.n_nodes();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto p = predicted.edge(i, j);
            const auto t = truth.edge(i, j);
            if (p && t) {
                ++s.tp;
                if (*p != *t) ++s.sign_mismatches;
            } else if (p) {
                ++s.fp;
                s.errors.push_back({i, j, true});
            } else if (t) {
                ++s.fn;
                s.errors.push_back({i, j, false});
            } else {
                ++s.tn;
            }
        }
    }
    const std::size_t total = s.tp + s.fp + s.tn + s.fn;
    s.accuracy = total ? static_cast<double>(s.tp + s.tn) / static_cast<double>(total) : 1.0;

    if (s.tp + s.fp == 0) {
        s.precision = 1.0;
        s.precision_undefined = true;
    } else {
        s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    }
    if (s.tp + s.fn == 0) {
        s.recall = 1.0;
        s.recall_undefined = true;
    } else {
        s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    }
    if (s.tp == 0) {
        s.sign_mismatch_undefined = true;
    } else {
        s.sign_mismatch_rate = static_cast<double>(s.sign_mismatches) / static_cast<double>(s.tp);
    }
    return s;
}

}  // namespace causalfm::eval

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "causalfm/synth/graph.hpp"

namespace causalfm::eval {

/// Ordered-pair confusion counts of a predicted graph against the truth.
struct GraphScore {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    /// Detected true edges whose sign disagrees with the truth.
    std::size_t sign_mismatches = 0;

    double accuracy = 0.0;
    /// 1.0 with precision_undefined set when nothing was predicted.
    double precision = 0.0;
    /// 1.0 with recall_undefined set when the truth has no edges.
    double recall = 0.0;
    /// sign_mismatches / tp; 0 with sign_mismatch_undefined set when tp == 0.
    double sign_mismatch_rate = 0.0;

    bool precision_undefined = false;
    bool recall_undefined = false;
    bool sign_mismatch_undefined = false;

    struct PairError {
        std::size_t source;
        std::size_t target;
        bool false_positive;  ///< false: a missed true edge
    };
    /// Every misclassified ordered pair, sorted by (source, target).
    std::vector<PairError> errors;
};

/// Throws InvalidArgument when the node counts differ.
GraphScore score_graph(const CausalGraph &predicted, const CausalGraph &truth);

}  // namespace causalfm::eval

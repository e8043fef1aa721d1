#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace causalfm {

enum class Sign : int { Inhibitory = -1, Excitatory = 1 };

inline int to_int(Sign s) { return static_cast<int>(s); }

struct Edge {
    std::size_t source = 0;
    std::size_t target = 0;
    Sign sign = Sign::Excitatory;

    friend bool operator==(const Edge &, const Edge &) = default;
};

/// Signed directed graph over n nodes, no self-loops, at most one edge per
/// ordered pair.
class CausalGraph {
public:
    explicit CausalGraph(std::size_t n_nodes);

    std::size_t n_nodes() const noexcept { return n_nodes_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }

    /// Inserts or overwrites the edge source -> target.
    void add_edge(std::size_t source, std::size_t target, Sign sign);
    std::optional<Sign> edge(std::size_t source, std::size_t target) const;
    bool has_edge(std::size_t source, std::size_t target) const { return edge(source, target).has_value(); }

    /// Edges sorted by (source, target).
    std::vector<Edge> edges() const;

    friend bool operator==(const CausalGraph &, const CausalGraph &) = default;

private:
    std::size_t n_nodes_;
    std::map<std::pair<std::size_t, std::size_t>, Sign> edges_;
};

/// Sidecar format: header "source,target,sign", one edge per line, zero-based
/// node indices, sign as +1 / -1.
void write_graph_csv(std::ostream &out, const CausalGraph &g);
void write_graph_csv(const std::filesystem::path &path, const CausalGraph &g);
CausalGraph read_graph_csv(std::istream &in, std::size_t n_nodes);

}  // namespace causalfm

#include "causalfm/synth/graph.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "causalfm/core/csv.hpp"
#include "causalfm/core/error.hpp"

namespace causalfm {

CausalGraph::CausalGraph(std::size_t n_nodes) : n_nodes_(n_nodes) {}

void CausalGraph::add_edge(std::size_t source, std::size_t target, Sign sign) {
    if (source >= n_nodes_ || target >= n_nodes_) {
        throw InvalidArgument("edge " + std::to_string(source) + "->" + std::to_string(target) +
                              " outside a graph of " + std::to_string(n_nodes_) + " nodes");
    }
    if (source == target) {
        throw InvalidArgument("self-loop on node " + std::to_string(source));
    }
    edges_[{source, target}] = sign;
}

std::optional<Sign> CausalGraph::edge(std::size_t source, std::size_t target) const {
    const auto it = edges_.find({source, target});
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

std::vector<Edge> CausalGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto &[key, sign] : edges_) {
        out.push_back({key.first, key.second, sign});
    }
    return out;
}

void write_graph_csv(std::ostream &out, const CausalGraph &g) {
    out << "source,target,sign\n";
    for (const auto &e : g.edges()) {
        out << e.source << ',' << e.target << ',' << (e.sign == Sign::Excitatory ? "+1" : "-1") << '\n';
    }
}

void write_graph_csv(const std::filesystem::path &path, const CausalGraph &g) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_graph_csv(out, g);
}

CausalGraph read_graph_csv(std::istream &in, std::size_t n_nodes) {
    CausalGraph g(n_nodes);
    std::string line;
    if (!std::getline(in, line)) return g;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3) throw FormatError("graph CSV row needs 3 cells: '" + line + "'");
        const auto source = static_cast<std::size_t>(parse_real(cells[0]));
        const auto target = static_cast<std::size_t>(parse_real(cells[1]));
        const double sign = parse_real(cells[2]);
        g.add_edge(source, target, sign < 0 ? Sign::Inhibitory : Sign::Excitatory);
    }
    return g;
}

}  // namespace causalfm

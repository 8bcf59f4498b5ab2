#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/graph.hpp"

namespace normgraph {

// Maps each logged position to its nearest node and connects (u, v) when some
// agent occupies u at t and v at t+1 at least min_count times (either
// direction qualifies the unordered edge). Staying never creates an edge.
inline std::vector<std::pair<int, int>> infer_edges(const std::vector<Vec2>& nodes,
                                                    const PositionLog& log, int min_count = 1) {
    if (nodes.empty()) throw std::invalid_argument("infer_edges: no nodes");
    if (log.graph_mode() || log.positions.empty())
        throw std::invalid_argument("infer_edges: needs a non-empty norm-mode log");

    SpatialGraph lookup = SpatialGraph::make(nodes, {});
    const size_t T1 = log.positions.size();
    const size_t n_agents = log.positions[0].size();
    std::vector<std::vector<int>> assigned(T1, std::vector<int>(n_agents));
    for (size_t t = 0; t < T1; ++t)
        for (size_t i = 0; i < n_agents; ++i)
            assigned[t][i] = nearest_node(lookup, log.positions[t][i]);

    std::map<std::pair<int, int>, int> directed;
    for (size_t t = 0; t + 1 < T1; ++t)
        for (size_t i = 0; i < n_agents; ++i) {
            const int u = assigned[t][i], v = assigned[t + 1][i];
            if (u != v) ++directed[{u, v}];
        }
    std::vector<std::pair<int, int>> edges;
    for (const auto& [key, cnt] : directed) {
        if (cnt < min_count) continue;
        auto [u, v] = key;
        if (u > v) std::swap(u, v);
        edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace normgraph

#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "normgraph/search/dtw.hpp"
#include "normgraph/search/edges.hpp"
#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/continuous.hpp"

namespace normgraph {

struct TsxmResult {
    SpatialGraph graph;
    std::vector<double> inertia_per_k;  // kept-run DTW inertia for k = 1..epsilon
    int k_star = 1;
};

// Time-series x-means: per-agent position series (normalized by the
// environment bbox) are clustered with DTW k-means for k = 1..epsilon; each k
// keeps the restart whose summed L1 distance between agent positions and the
// assigned cluster's center of mass is smallest; the elbow method picks k*.
// Nodes are the denormalized time-averaged cluster centers of mass, edges come
// from empirical transition inference over the log.
inline TsxmResult tsxm_search(const PositionLog& log, const ContinuousEnv& env,
                              const TSxMParams& tp, Rng& rng) {
    if (log.graph_mode() || log.positions.empty())
        throw std::invalid_argument("tsxm_search: needs a non-empty norm-mode log");
    const size_t T1 = log.positions.size();
    const size_t n_agents = log.positions[0].size();
    if (n_agents == 0) throw std::invalid_argument("tsxm_search: no agents");

    const double w = std::max(env.bbox.width(), 1e-12);
    const double h = std::max(env.bbox.height(), 1e-12);
    std::vector<std::vector<Vec2>> series(n_agents, std::vector<Vec2>(T1));
    for (size_t t = 0; t < T1; ++t)
        for (size_t i = 0; i < n_agents; ++i)
            series[i][t] = {(log.positions[t][i].x - env.bbox.lo.x) / w,
                            (log.positions[t][i].y - env.bbox.lo.y) / h};

    const int e_max = std::min<int>(tp.epsilon, static_cast<int>(n_agents));
    if (e_max < 1) throw std::invalid_argument("tsxm_search: epsilon must be >= 1");

    // center of mass per cluster over all member samples, in normalized space
    auto centers_of_mass = [&](const std::vector<int>& assign, int k) {
        std::vector<Vec2> com(k, {0.0, 0.0});
        std::vector<int64_t> counts(k, 0);
        for (size_t i = 0; i < n_agents; ++i) {
            for (const auto& p : series[i]) com[assign[i]] += p;
            counts[assign[i]] += static_cast<int64_t>(T1);
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) com[c] = com[c] * (1.0 / static_cast<double>(counts[c]));
        return com;
    };
    auto l1_metric = [&](const std::vector<int>& assign, const std::vector<Vec2>& com) {
        double total = 0.0;
        for (size_t i = 0; i < n_agents; ++i)
            for (const auto& p : series[i]) total += dist_l1(p, com[assign[i]]);
        return total;
    };

    TsxmResult res;
    std::vector<std::vector<int>> kept_assign(e_max);
    for (int k = 1; k <= e_max; ++k) {
        double best_metric = std::numeric_limits<double>::infinity();
        double best_inertia = 0.0;
        for (int r = 0; r < std::max(1, tp.restarts); ++r) {
            Rng sub = rng.derive(0x75c3, static_cast<uint64_t>(k), static_cast<uint64_t>(r));
            const KMeansResult km = dtw_kmeans(series, k, tp, sub);
            const auto com = centers_of_mass(km.assignments, k);
            const double metric = l1_metric(km.assignments, com);
            if (metric < best_metric) {
                best_metric = metric;
                best_inertia = km.inertia;
                kept_assign[k - 1] = km.assignments;
            }
        }
        res.inertia_per_k.push_back(best_inertia);
    }

    res.k_star = elbow_select(res.inertia_per_k);
    const auto& assign = kept_assign[res.k_star - 1];
    const auto com = centers_of_mass(assign, res.k_star);
    std::vector<Vec2> nodes(res.k_star);
    for (int c = 0; c < res.k_star; ++c)
        nodes[c] = {env.bbox.lo.x + com[c].x * w, env.bbox.lo.y + com[c].y * h};

    res.graph = SpatialGraph::make(nodes, infer_edges(nodes, log, tp.min_transition_count));
    return res;
}

}  // namespace normgraph

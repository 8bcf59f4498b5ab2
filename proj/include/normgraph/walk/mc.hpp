#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "normgraph/core/rng.hpp"
#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/graph.hpp"

namespace normgraph {

namespace detail {

inline int sample_categorical(const std::vector<double>& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

inline int fraction_bin(double f, const std::vector<double>& bounds) {
    // bounds like {0, 0.1, 0.5, 1}: bins [0,0.1), [0.1,0.5), [0.5,1]
    const int n_bins = static_cast<int>(bounds.size()) - 1;
    for (int b = 0; b < n_bins - 1; ++b)
        if (f < bounds[b + 1]) return b;
    return n_bins - 1;
}

}  // namespace detail

struct MCOptions {
    std::vector<double> bin_bounds{0.0, 0.1, 0.5, 1.0};
    double alpha_s = 1.0;  // Laplace smoothing
};

// Markov-chain walk model: transition distributions over {stay} u neighbors,
// keyed by (node, agent macro-class, binned neighbor infected-fraction
// signature), with backoff tables on (node, macro-class) and (node).
struct MCWalkModel {
    std::vector<std::vector<int>> neighbors;  // per node, ascending; self-contained copy
    std::vector<double> bin_bounds{0.0, 0.1, 0.5, 1.0};
    double alpha_s = 1.0;
    // option 0 = stay, options 1.. = neighbors in ascending order
    std::map<std::string, std::vector<double>> full;      // "node|macro|sig"
    std::map<std::string, std::vector<double>> by_class;  // "node|macro"
    std::map<std::string, std::vector<double>> by_node;   // "node"
    uint64_t illegal_training_targets = 0;

    bool operator==(const MCWalkModel& o) const {
        return neighbors == o.neighbors && bin_bounds == o.bin_bounds && alpha_s == o.alpha_s &&
               full == o.full && by_class == o.by_class && by_node == o.by_node;
    }

    static std::string key_node(int node) { return std::to_string(node); }
    static std::string key_class(int node, MacroClass m) {
        return std::to_string(node) + "|" + std::to_string(static_cast<int>(m));
    }
    static std::string key_full(int node, MacroClass m, const std::string& sig) {
        return key_class(node, m) + "|" + sig;
    }

    std::string signature(const WalkContext& ctx) const {
        std::string sig;
        for (const auto& occ : ctx.neighbor_occupancy) {
            if (!sig.empty()) sig += '-';
            sig += std::to_string(detail::fraction_bin(
                occ[static_cast<int>(MacroClass::infectious)], bin_bounds));
        }
        return sig;
    }

    // Most specific available key wins; with no data at all the distribution is
    // uniform over the legal options.
    int sample_next(const WalkContext& ctx, Rng& rng) const {
        const int node = ctx.node;
        const auto& nb = neighbors[node];
        const std::vector<double>* dist = nullptr;
        if (auto it = full.find(key_full(node, ctx.macro, signature(ctx))); it != full.end())
            dist = &it->second;
        else if (auto it2 = by_class.find(key_class(node, ctx.macro)); it2 != by_class.end())
            dist = &it2->second;
        else if (auto it3 = by_node.find(key_node(node)); it3 != by_node.end())
            dist = &it3->second;
        int opt;
        if (dist) {
            opt = detail::sample_categorical(*dist, rng);
        } else {
            opt = static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(nb.size())));
        }
        return opt == 0 ? kStay : nb[opt - 1];
    }
};

// Fits transition tables from projected node sequences. Distributions use
// Laplace smoothing (count + alpha) / (total + alpha * n_options); targets that
// are not legal moves on the graph are counted as stay.
inline MCWalkModel fit_mc(const std::vector<std::vector<int>>& sequences, const EpiLog& epi,
                          const SpatialGraph& graph, const MCOptions& opts = {}) {
    if (sequences.empty() || sequences[0].size() < 2)
        throw std::invalid_argument("fit_mc: need at least one transition");
    const size_t T1 = sequences[0].size();
    if (epi.obs.size() != T1 || epi.obs[0].size() != sequences.size())
        throw std::invalid_argument("fit_mc: epi log shape mismatch");

    MCWalkModel model;
    model.neighbors = graph.adj;
    model.bin_bounds = opts.bin_bounds;
    model.alpha_s = opts.alpha_s;

    // residents and infectious counts per node per recorded step
    const int n_nodes = graph.size();
    std::vector<std::vector<int>> total_at(T1, std::vector<int>(n_nodes, 0));
    std::vector<std::vector<int>> inf_at(T1, std::vector<int>(n_nodes, 0));
    for (size_t t = 0; t < T1; ++t)
        for (size_t i = 0; i < sequences.size(); ++i) {
            const int v = sequences[i][t];
            ++total_at[t][v];
            inf_at[t][v] += epi.obs[t][i].macro == MacroClass::infectious;
        }
    auto sig_at = [&](size_t t, int node) {
        std::string sig;
        for (int nb : graph.adj[node]) {
            if (!sig.empty()) sig += '-';
            const double f = total_at[t][nb] > 0
                                 ? static_cast<double>(inf_at[t][nb]) / total_at[t][nb]
                                 : 0.0;
            sig += std::to_string(detail::fraction_bin(f, model.bin_bounds));
        }
        return sig;
    };

    std::map<std::string, std::vector<int64_t>> cnt_full, cnt_class, cnt_node;
    for (size_t i = 0; i < sequences.size(); ++i) {
        if (sequences[i].size() != T1) throw std::invalid_argument("fit_mc: ragged sequences");
        for (size_t t = 0; t + 1 < T1; ++t) {
            const int u = sequences[i][t];
            const int v = sequences[i][t + 1];
            const auto& nb = graph.adj[u];
            int opt = 0;
            if (v != u) {
                const auto it = std::lower_bound(nb.begin(), nb.end(), v);
                if (it != nb.end() && *it == v) {
                    opt = static_cast<int>(it - nb.begin()) + 1;
                } else {
                    ++model.illegal_training_targets;
                }
            }
            const MacroClass mc = epi.obs[t][i].macro;
            const size_t n_opts = nb.size() + 1;
            auto bump = [&](std::map<std::string, std::vector<int64_t>>& table,
                            const std::string& key) {
                auto& counts = table[key];
                if (counts.empty()) counts.assign(n_opts, 0);
                ++counts[opt];
            };
            bump(cnt_full, MCWalkModel::key_full(u, mc, sig_at(t, u)));
            bump(cnt_class, MCWalkModel::key_class(u, mc));
            bump(cnt_node, MCWalkModel::key_node(u));
        }
    }

    auto finalize = [&](const std::map<std::string, std::vector<int64_t>>& counts,
                        std::map<std::string, std::vector<double>>& out) {
        for (const auto& [key, c] : counts) {
            int64_t total = 0;
            for (int64_t x : c) total += x;
            std::vector<double> dist(c.size());
            const double denom =
                static_cast<double>(total) + opts.alpha_s * static_cast<double>(c.size());
            for (size_t k = 0; k < c.size(); ++k)
                dist[k] = (static_cast<double>(c[k]) + opts.alpha_s) / denom;
            out[key] = std::move(dist);
        }
    };
    finalize(cnt_full, model.full);
    finalize(cnt_class, model.by_class);
    finalize(cnt_node, model.by_node);
    return model;
}

inline int mc_sample_next(const MCWalkModel& model, const WalkContext& ctx, Rng& rng) {
    return model.sample_next(ctx, rng);
}

// Replaces each logged position with its nearest graph node; graph-mode logs
// are passed through. Output is per-agent node sequences [agent][t].
inline std::vector<std::vector<int>> project_log_to_graph(const PositionLog& log,
                                                          const SpatialGraph& graph) {
    if (log.rows() == 0) throw std::invalid_argument("project_log_to_graph: empty log");
    const size_t T1 = log.rows();
    const size_t n = log.n_agents();
    std::vector<std::vector<int>> seq(n, std::vector<int>(T1));
    for (size_t t = 0; t < T1; ++t)
        for (size_t i = 0; i < n; ++i)
            seq[i][t] = log.graph_mode() ? log.node_ids[t][i]
                                         : nearest_node(graph, log.positions[t][i]);
    return seq;
}

}  // namespace normgraph

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "normgraph/core/rng.hpp"
#include "normgraph/core/vec2.hpp"
#include "normgraph/epi/agent.hpp"

namespace normgraph {

inline constexpr int kStay = -1;

struct SpatialGraph {
    std::vector<Vec2> nodes;                  // id = index
    std::vector<std::pair<int, int>> edges;   // src < dst, sorted, unique
    std::vector<std::vector<int>> adj;        // ascending neighbour ids

    int size() const { return static_cast<int>(nodes.size()); }
    int degree(int v) const { return static_cast<int>(adj[v].size()); }

    bool has_edge(int u, int v) const {
        if (u > v) std::swap(u, v);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
    }

    static SpatialGraph make(std::vector<Vec2> nodes, std::vector<std::pair<int, int>> edges) {
        if (nodes.empty()) throw std::invalid_argument("graph needs at least one node");
        const int n = static_cast<int>(nodes.size());
        for (auto& e : edges) {
            if (e.first > e.second) std::swap(e.first, e.second);
            if (e.first == e.second) throw std::invalid_argument("graph edges may not be self-loops");
            if (e.first < 0 || e.second >= n)
                throw std::invalid_argument("graph edge references unknown node");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        SpatialGraph g;
        g.nodes = std::move(nodes);
        g.edges = std::move(edges);
        g.adj.assign(n, {});
        for (const auto& [u, v] : g.edges) {
            g.adj[u].push_back(v);
            g.adj[v].push_back(u);
        }
        for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
        return g;
    }
};

// Closest node by Euclidean distance; ties break to the lowest id.
inline int nearest_node(const SpatialGraph& g, const Vec2& p) {
    int best = 0;
    double best_d = dist2(p, g.nodes[0]);
    for (int i = 1; i < g.size(); ++i) {
        const double d = dist2(p, g.nodes[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

struct GraphAgent {
    AgentEpi epi;
    int node = 0;
};

// Per-agent view handed to a walk model: the agent's macro class and clock
// ratio, the node it sits on, step fraction, and for each neighbour (ascending
// id) the macro-class occupancy fractions of that neighbour's residents.
struct WalkContext {
    MacroClass macro = MacroClass::susceptible;
    double theta_frac = 0.0;
    int node = 0;
    double t_frac = 0.0;
    std::vector<std::array<double, 3>> neighbor_occupancy;
};

struct WalkDiagnostics {
    uint64_t coerced_moves = 0;
};

// Moves the agent to the model-proposed target when the move is legal
// ({stay} or a neighbour of the current node); anything else is coerced to
// stay and counted. Dead agents never move.
template <class WalkModelT>
GraphAgent graph_walk_step(const GraphAgent& agent, const SpatialGraph& g, const WalkModelT& model,
                           Model epi_model, const WalkContext& ctx, Rng& rng,
                           WalkDiagnostics* diag = nullptr) {
    if (is_dead(epi_model, agent.epi.comp)) return agent;
    const int target = model.sample_next(ctx, rng);
    if (target == kStay || target == agent.node) return agent;
    const auto& nb = g.adj[agent.node];
    if (std::binary_search(nb.begin(), nb.end(), target)) {
        GraphAgent out = agent;
        out.node = target;
        return out;
    }
    if (diag) ++diag->coerced_moves;
    return agent;
}

// Well-mixed interaction inside every node. Each unordered
// (susceptible, infectious) pair carries an independent infection trial with
// p_scale = 1 - exp(-dt / max(N_v - 1, 1)), which reproduces the
// frequency-dependent ODE infection flux for small dt. Trials are evaluated
// against the step-start snapshot of infectious residents and aggregated per
// susceptible (exactly the same joint distribution, one draw per susceptible
// per source group), so the step costs O(N_v) instead of O(N_v^2).
inline void node_interaction_step(std::vector<GraphAgent>& pop, const SpatialGraph& g,
                                  const EpiParams& ep, double dt, Rng& rng,
                                  std::vector<uint8_t>& transitioned) {
    const int n_nodes = g.size();
    std::vector<std::vector<int>> residents(n_nodes);
    for (size_t i = 0; i < pop.size(); ++i) {
        if (is_dead(ep.model, pop[i].epi.comp)) continue;
        residents[pop[i].node].push_back(static_cast<int>(i));  // ascending by construction
    }
    for (int v = 0; v < n_nodes; ++v) {
        const auto& ids = residents[v];
        const int n_v = static_cast<int>(ids.size());
        if (n_v < 2) continue;
        const double p_scale = 1.0 - std::exp(-dt / std::max(n_v - 1, 1));

        switch (ep.model) {
            case Model::sir: {
                int n_inf = 0;
                for (int id : ids) n_inf += pop[id].epi.comp == sir_comp::I;
                if (n_inf == 0) continue;
                const double survive = std::pow(1.0 - ep.sir.beta * p_scale, n_inf);
                for (int id : ids) {
                    if (pop[id].epi.comp != sir_comp::S) continue;
                    if (rng.bernoulli(1.0 - survive)) {
                        pop[id].epi.comp = sir_comp::I;
                        pop[id].epi.theta = 0;
                        transitioned[id] = 1;
                    }
                }
                break;
            }
            case Model::seird2: {
                // sources grouped by (symptom, age); beta[symptom][target][source]
                int cnt[2][2] = {{0, 0}, {0, 0}};
                bool any = false;
                for (int id : ids)
                    if (s2_infectious(pop[id].epi.comp)) {
                        ++cnt[s2_symptom(pop[id].epi.comp)][s2_age(pop[id].epi.comp)];
                        any = true;
                    }
                if (!any) continue;
                for (int id : ids) {
                    const uint8_t c = pop[id].epi.comp;
                    if (c != s2_comp::S_c && c != s2_comp::S_a) continue;
                    const int t_age = s2_age(c);
                    double survive = 1.0;
                    for (int sym = 0; sym < 2; ++sym)
                        for (int s_age = 0; s_age < 2; ++s_age)
                            if (cnt[sym][s_age] > 0)
                                survive *= std::pow(1.0 - ep.seird2.beta[sym][t_age][s_age] * p_scale,
                                                    cnt[sym][s_age]);
                    if (rng.bernoulli(1.0 - survive)) {
                        const bool asym = rng.bernoulli(ep.seird2.psi[t_age]);
                        pop[id].epi.comp = s2_infected_comp(t_age, asym);
                        pop[id].epi.theta = 0;
                        transitioned[id] = 1;
                    }
                }
                break;
            }
            case Model::two_strain: {
                int n_strain[2] = {0, 0};
                for (int id : ids)
                    if (ts_infected(pop[id].epi.comp)) ++n_strain[ts_strain(pop[id].epi.comp) - 1];
                if (n_strain[0] + n_strain[1] == 0) continue;
                for (int id : ids) {
                    const uint8_t c = pop[id].epi.comp;
                    if (ts_infected(c) || c == ts_comp::D) continue;
                    const int mask = ts_recovered_mask(c);
                    if (mask == 3) continue;
                    // strain trials in ascending strain order within the step
                    for (int strain = 1; strain <= 2; ++strain) {
                        if (mask & (1 << (strain - 1))) continue;
                        if (n_strain[strain - 1] == 0) continue;
                        const double survive = std::pow(
                            1.0 - ep.two_strain.beta[mask][strain - 1] * p_scale,
                            n_strain[strain - 1]);
                        if (rng.bernoulli(1.0 - survive)) {
                            pop[id].epi.comp = ts_infected_comp(mask, strain);
                            pop[id].epi.theta = 0;
                            transitioned[id] = 1;
                            break;
                        }
                    }
                }
                break;
            }
        }
    }
}

}  // namespace normgraph

#pragma once

#include <stdexcept>
#include <vector>

#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/continuous.hpp"
#include "normgraph/space/graph.hpp"

namespace normgraph {

struct SimConfig {
    Model model = Model::sir;
    int T = 200;          // total steps
    double dt = 1.0;      // step duration in hours
    bool stop_on_extinction = false;  // optional stop condition: no infectious agents left
    bool record_positions = true;

    void validate() const {
        if (T < 0) throw std::invalid_argument("SimConfig: T must be >= 0");
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
    }
};

struct SimResult {
    Trajectory traj;
    PositionLog log;
    EpiLog epi;
    WalkDiagnostics walk_diag;
};

namespace detail {

inline std::vector<int64_t> count_compartments(Model model, const std::vector<uint8_t>& comps) {
    std::vector<int64_t> row(n_compartments(model), 0);
    for (uint8_t c : comps) ++row[c];
    return row;
}

template <class Pop, class GetEpi>
bool any_infectious(Model m, const Pop& pop, GetEpi get) {
    for (const auto& a : pop)
        if (is_infectious(m, get(a).comp)) return true;
    return false;
}

}  // namespace detail

// Operator order per step: spontaneous transitions, per-agent walk, pairwise
// interaction, record, tick the clocks of agents that did not transition.
inline SimResult run_norm_sim(std::vector<SpatialAgent> pop, const ContinuousEnv& env,
                              const EpiParams& params, const WalkParams& wp, const SimConfig& cfg,
                              uint64_t seed) {
    cfg.validate();
    if (pop.empty()) throw std::invalid_argument("run_norm_sim: empty population");
    if (params.model != cfg.model)
        throw std::invalid_argument("run_norm_sim: params/config model mismatch");
    Rng rng(derive_seed(seed, 0x5e1f));

    SimResult out;
    out.traj.model = cfg.model;
    out.traj.N = static_cast<int64_t>(pop.size());

    std::vector<uint8_t> comps(pop.size());
    auto record = [&] {
        for (size_t i = 0; i < pop.size(); ++i) comps[i] = pop[i].epi.comp;
        out.traj.counts.push_back(detail::count_compartments(cfg.model, comps));
        if (cfg.record_positions) {
            std::vector<Vec2> row(pop.size());
            for (size_t i = 0; i < pop.size(); ++i) row[i] = pop[i].pos;
            out.log.positions.push_back(std::move(row));
            std::vector<EpiObs> erow(pop.size());
            for (size_t i = 0; i < pop.size(); ++i)
                erow[i] = {macro_class(cfg.model, pop[i].epi.comp),
                           static_cast<float>(theta_frac(params, pop[i].epi)),
                           pop[i].epi.comp};
            out.epi.obs.push_back(std::move(erow));
        }
    };
    record();

    std::vector<uint8_t> transitioned(pop.size());
    for (int t = 1; t <= cfg.T; ++t) {
        std::fill(transitioned.begin(), transitioned.end(), 0);
        for (size_t i = 0; i < pop.size(); ++i) {
            auto res = spontaneous_step(params, pop[i].epi, rng);
            pop[i].epi = res.agent;
            if (res.transitioned) transitioned[i] = 1;
        }
        for (auto& a : pop) a = pull_random_walk_step(a, env, cfg.model, wp, rng);
        norm_interaction_step(pop, params, wp, rng, transitioned);
        record();
        for (size_t i = 0; i < pop.size(); ++i)
            if (!transitioned[i]) pop[i].epi = tick_clock(pop[i].epi);
        if (cfg.stop_on_extinction &&
            !detail::any_infectious(cfg.model, pop, [](const SpatialAgent& a) { return a.epi; }))
            break;
    }
    return out;
}

// Macro-class occupancy fractions per node (dead residents included in the
// removed class); empty nodes carry all-zero fractions.
inline std::vector<std::array<double, 3>> node_occupancy(Model model,
                                                         const std::vector<GraphAgent>& pop,
                                                         int n_nodes) {
    std::vector<std::array<double, 3>> occ(n_nodes, {0.0, 0.0, 0.0});
    std::vector<int> totals(n_nodes, 0);
    for (const auto& a : pop) {
        ++occ[a.node][static_cast<int>(macro_class(model, a.epi.comp))];
        ++totals[a.node];
    }
    for (int v = 0; v < n_nodes; ++v)
        if (totals[v] > 0)
            for (auto& f : occ[v]) f /= totals[v];
    return occ;
}

template <class WalkModelT>
SimResult run_graph_sim(std::vector<GraphAgent> pop, const SpatialGraph& graph,
                        const WalkModelT& walk_model, const EpiParams& params,
                        const SimConfig& cfg, uint64_t seed) {
    cfg.validate();
    if (pop.empty()) throw std::invalid_argument("run_graph_sim: empty population");
    if (params.model != cfg.model)
        throw std::invalid_argument("run_graph_sim: params/config model mismatch");
    for (const auto& a : pop)
        if (a.node < 0 || a.node >= graph.size())
            throw std::invalid_argument("run_graph_sim: agent on unknown node");
    Rng rng(derive_seed(seed, 0x9a4f));

    SimResult out;
    out.traj.model = cfg.model;
    out.traj.N = static_cast<int64_t>(pop.size());

    std::vector<uint8_t> comps(pop.size());
    auto record = [&] {
        for (size_t i = 0; i < pop.size(); ++i) comps[i] = pop[i].epi.comp;
        out.traj.counts.push_back(detail::count_compartments(cfg.model, comps));
        if (cfg.record_positions) {
            std::vector<int> row(pop.size());
            for (size_t i = 0; i < pop.size(); ++i) row[i] = pop[i].node;
            out.log.node_ids.push_back(std::move(row));
            std::vector<EpiObs> erow(pop.size());
            for (size_t i = 0; i < pop.size(); ++i)
                erow[i] = {macro_class(cfg.model, pop[i].epi.comp),
                           static_cast<float>(theta_frac(params, pop[i].epi)),
                           pop[i].epi.comp};
            out.epi.obs.push_back(std::move(erow));
        }
    };
    record();

    std::vector<uint8_t> transitioned(pop.size());
    WalkContext ctx;
    for (int t = 1; t <= cfg.T; ++t) {
        std::fill(transitioned.begin(), transitioned.end(), 0);
        for (size_t i = 0; i < pop.size(); ++i) {
            auto res = spontaneous_step(params, pop[i].epi, rng);
            pop[i].epi = res.agent;
            if (res.transitioned) transitioned[i] = 1;
        }
        // all agents decide on the same step-start occupancy snapshot
        const auto occ = node_occupancy(cfg.model, pop, graph.size());
        ctx.t_frac = cfg.T > 0 ? static_cast<double>(t) / cfg.T : 0.0;
        for (auto& a : pop) {
            ctx.macro = macro_class(cfg.model, a.epi.comp);
            ctx.theta_frac = theta_frac(params, a.epi);
            ctx.node = a.node;
            const auto& nb = graph.adj[a.node];
            ctx.neighbor_occupancy.assign(nb.size(), {0.0, 0.0, 0.0});
            for (size_t k = 0; k < nb.size(); ++k) ctx.neighbor_occupancy[k] = occ[nb[k]];
            a = graph_walk_step(a, graph, walk_model, cfg.model, ctx, rng, &out.walk_diag);
        }
        node_interaction_step(pop, graph, params, cfg.dt, rng, transitioned);
        record();
        for (size_t i = 0; i < pop.size(); ++i)
            if (!transitioned[i]) pop[i].epi = tick_clock(pop[i].epi);
        if (cfg.stop_on_extinction &&
            !detail::any_infectious(cfg.model, pop, [](const GraphAgent& a) { return a.epi; }))
            break;
    }
    return out;
}

}  // namespace normgraph

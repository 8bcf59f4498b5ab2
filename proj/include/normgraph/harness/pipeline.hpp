#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "normgraph/io/config.hpp"
#include "normgraph/io/csv.hpp"
#include "normgraph/search/tsxm.hpp"
#include "normgraph/sim/engine.hpp"
#include "normgraph/walk/model.hpp"

namespace normgraph {

struct Case {
    EpiParams params;
    ContinuousEnv env;
    std::vector<SpatialAgent> pop;
};

enum class SimMode { norm, graph };

struct NormSpace {
    ContinuousEnv env;
    WalkParams wp;
};
struct GraphSpace {
    SpatialGraph graph;
    WalkModel walk;
};
using SimSpace = std::variant<NormSpace, GraphSpace>;

// Mode-checked facade over the two engines. Initial agents are spatial; in
// graph mode they are placed on their nearest node.
inline SimResult run_sim(SimMode mode, const std::vector<SpatialAgent>& pop, const SimSpace& space,
                         const EpiParams& params, const SimConfig& cfg, uint64_t seed) {
    if (mode == SimMode::norm) {
        if (!std::holds_alternative<NormSpace>(space))
            throw std::invalid_argument("run_sim: norm mode needs a continuous environment");
        const auto& ns = std::get<NormSpace>(space);
        return run_norm_sim(pop, ns.env, params, ns.wp, cfg, seed);
    }
    if (!std::holds_alternative<GraphSpace>(space))
        throw std::invalid_argument("run_sim: graph mode needs a graph and walk model");
    const auto& gs = std::get<GraphSpace>(space);
    std::vector<GraphAgent> gpop;
    gpop.reserve(pop.size());
    for (const auto& a : pop) gpop.push_back({a.epi, nearest_node(gs.graph, a.pos)});
    return run_graph_sim(gpop, gs.graph, WalkModelRef{&gs.walk}, params, cfg, seed);
}

namespace detail {

inline double secs_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline EpiParams sample_params(const ExperimentSpec& s, Rng& rng) {
    EpiParams p;
    p.model = s.model;
    switch (s.model) {
        case Model::sir:
            p.sir.beta = rng.uniform(s.beta.lo, s.beta.hi);
            p.sir.gamma = static_cast<int>(std::lround(rng.uniform(s.gamma.lo, s.gamma.hi)));
            break;
        case Model::seird2:
            for (auto& sym : p.seird2.beta)
                for (auto& tgt : sym)
                    for (auto& b : tgt) b = rng.uniform(s.beta.lo, s.beta.hi);
            for (auto& g : p.seird2.gamma)
                g = static_cast<int>(std::lround(rng.uniform(s.gamma.lo, s.gamma.hi)));
            for (auto& r : p.seird2.rho) r = rng.uniform(s.rho.lo, s.rho.hi);
            for (auto& ps : p.seird2.psi) ps = rng.uniform(s.psi.lo, s.psi.hi);
            break;
        case Model::two_strain:
            for (int mask = 0; mask < 4; ++mask)
                for (int st = 0; st < 2; ++st) {
                    p.two_strain.beta[mask][st] = rng.uniform(s.beta.lo, s.beta.hi);
                    p.two_strain.gamma[mask][st] =
                        static_cast<int>(std::lround(rng.uniform(s.gamma.lo, s.gamma.hi)));
                    p.two_strain.rho[mask][st] = rng.uniform(s.rho.lo, s.rho.hi);
                }
            break;
    }
    validate(p);
    return p;
}

}  // namespace detail

// Draws parameters, a synthetic (or fixed) environment and an initial
// population: uniform positions inside the circle union, the lowest-id agents
// seeded infected (default 1%, at least one).
inline Case sample_case(const ExperimentSpec& s, Rng& rng) {
    Case c;
    c.params = detail::sample_params(s, rng);
    if (!s.circles.empty()) {
        c.env = ContinuousEnv::from_circles(s.circles);
    } else {
        const double extent_cap =
            s.density_target > 0.0 ? std::sqrt(static_cast<double>(s.N) / s.density_target) : 0.0;
        c.env = generate_synthetic_env(rng, s.n_circles, s.radius, s.placement_extent, 1000,
                                       extent_cap);
    }
    const int n_seed = std::max(1, static_cast<int>(std::lround(s.initial_infected * s.N)));
    c.pop.reserve(s.N);
    for (int i = 0; i < s.N; ++i) {
        SpatialAgent a;
        a.pos = sample_point_in_env(c.env, rng);
        a.spawn = a.pos;
        int age = 0;
        if (s.model == Model::seird2) age = static_cast<int>(rng.uniform_int(0, 1));
        if (i < n_seed) {
            switch (s.model) {
                case Model::sir: a.epi.comp = sir_comp::I; break;
                case Model::seird2:
                    a.epi.comp = s2_infected_comp(age, rng.bernoulli(c.params.seird2.psi[age]));
                    break;
                case Model::two_strain:
                    a.epi.comp = ts_infected_comp(0, i % 2 == 0 ? 1 : 2);
                    break;
            }
        } else {
            switch (s.model) {
                case Model::sir: a.epi.comp = sir_comp::S; break;
                case Model::seird2: a.epi.comp = s2_susceptible_comp(age); break;
                case Model::two_strain: a.epi.comp = ts_comp::R_none; break;
            }
        }
        c.pop.push_back(a);
    }
    return c;
}

// Keeps every stride_t-th frame and at most max_series agent columns
// (uniformly strided over ids). Frame 0 is always retained.
inline PositionLog thin_log(const PositionLog& log, const FitThinning& th) {
    if (log.graph_mode()) throw std::invalid_argument("thin_log: norm-mode log expected");
    PositionLog out;
    const size_t n = log.n_agents();
    const size_t keep = th.max_series > 0 ? std::min<size_t>(th.max_series, n) : n;
    std::vector<size_t> ids(keep);
    for (size_t k = 0; k < keep; ++k) ids[k] = k * n / keep;
    const size_t stride = std::max(1, th.stride_t);
    for (size_t t = 0; t < log.positions.size(); t += stride) {
        std::vector<Vec2> row(keep);
        for (size_t k = 0; k < keep; ++k) row[k] = log.positions[t][ids[k]];
        out.positions.push_back(std::move(row));
    }
    return out;
}

struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string st, const std::string& what)
        : std::runtime_error("stage '" + st + "': " + what), stage(std::move(st)) {}
};

inline SpatialGraph fit_graph(GraphSearchId gs, const PositionLog& log, const ContinuousEnv& env,
                              const ExperimentSpec& spec, Rng& rng) {
    const PositionLog thin = thin_log(log, spec.thinning);
    try {
        switch (gs) {
            case GraphSearchId::quadtree:
                return quadtree_search(thin, spec.wp.r_int, spec.quadtree);
            case GraphSearchId::ga: return ga_search(thin, env, spec.ga, rng).graph;
            case GraphSearchId::tsxm: return tsxm_search(thin, env, spec.tsxm, rng).graph;
        }
    } catch (const std::exception& e) {
        throw StageError("fit-graph(" + graph_search_name(gs) + ")", e.what());
    }
    throw StageError("fit-graph", "unknown graph search id");
}

inline WalkModel fit_walk(WalkId wa, const PositionLog& log, const EpiLog& epi,
                          const SpatialGraph& graph, const ExperimentSpec& spec, Rng& rng) {
    try {
        const auto sequences = project_log_to_graph(log, graph);
        if (wa == WalkId::mc) return fit_mc(sequences, epi, graph, spec.mc);
        return fit_mac(sequences, epi, graph, spec.mac, rng);
    } catch (const std::exception& e) {
        throw StageError("fit-walk(" + walk_name(wa) + ")", e.what());
    }
}

struct PipelineResult {
    double agreement_mean = 0.0;
    double agreement_std = 0.0;
    double mean_nodes = 0.0;
    double mean_edges = 0.0;
    int replicates = 0;
    // wall-clock per stage (seconds, summed over replicates); diagnostics only,
    // never part of deterministic outputs
    double secs_norm_sim = 0.0;
    double secs_fit_graph = 0.0;
    double secs_fit_walk = 0.0;
    double secs_graph_sim = 0.0;
};

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

// Full transformation pipeline on one case: norm simulation with logging,
// graph fit, walk fit on the same log, graph simulation from the projected
// initial population, agreement; repeated over paired replicate seeds.
inline PipelineResult run_pipeline(const Case& c, GraphSearchId gs, WalkId wa,
                                   const ExperimentSpec& spec, int replicates, uint64_t seed) {
    if (replicates < 1) throw std::invalid_argument("run_pipeline: replicates must be >= 1");
    PipelineResult out;
    std::vector<double> scores;
    SimConfig cfg;
    cfg.model = spec.model;
    cfg.T = spec.T;
    cfg.dt = spec.dt;
    for (int r = 0; r < replicates; ++r) {
        const uint64_t rep_seed = derive_seed(seed, 0xca5e, static_cast<uint64_t>(r));
        auto t0 = std::chrono::steady_clock::now();
        const SimResult norm = run_norm_sim(c.pop, c.env, c.params, spec.wp, cfg,
                                            derive_seed(rep_seed, 1));
        out.secs_norm_sim += detail::secs_since(t0);

        t0 = std::chrono::steady_clock::now();
        Rng g_rng(derive_seed(rep_seed, 2));
        const SpatialGraph graph = fit_graph(gs, norm.log, c.env, spec, g_rng);
        out.secs_fit_graph += detail::secs_since(t0);

        t0 = std::chrono::steady_clock::now();
        Rng w_rng(derive_seed(rep_seed, 3));
        const WalkModel walk = fit_walk(wa, norm.log, norm.epi, graph, spec, w_rng);
        out.secs_fit_walk += detail::secs_since(t0);

        t0 = std::chrono::steady_clock::now();
        std::vector<GraphAgent> gpop;
        gpop.reserve(c.pop.size());
        for (const auto& a : c.pop)
            gpop.push_back({a.epi, nearest_node(graph, a.pos)});
        SimConfig gcfg = cfg;
        gcfg.record_positions = false;
        const SimResult gsim =
            run_graph_sim(gpop, graph, WalkModelRef{&walk}, c.params, gcfg,
                          derive_seed(rep_seed, 4));
        out.secs_graph_sim += detail::secs_since(t0);

        scores.push_back(agreement(norm.traj, gsim.traj));
        out.mean_nodes += graph.size();
        out.mean_edges += static_cast<double>(graph.edges.size());
    }
    const auto [m, s] = mean_std(scores);
    out.agreement_mean = m;
    out.agreement_std = s;
    out.mean_nodes /= replicates;
    out.mean_edges /= replicates;
    out.replicates = replicates;
    return out;
}

struct BenchmarkRow {
    GraphSearchId gs;
    WalkId wa;
    double agreement_mean = 0.0;
    double agreement_std = 0.0;
    double mean_nodes = 0.0;
    double mean_edges = 0.0;
    int n_cases = 0;
};

namespace detail {

// Mean agreement of (gs, wa) with the given spec over cases drawn from the
// train partition.
inline double mean_agreement_over_cases(const ExperimentSpec& spec, GraphSearchId gs, WalkId wa,
                                        int n_cases, uint64_t partition_tag) {
    double total = 0.0;
    for (int i = 0; i < n_cases; ++i) {
        const uint64_t cseed = derive_seed(spec.master_seed, partition_tag, i);
        Rng case_rng(cseed);
        const Case c = sample_case(spec, case_rng);
        total += run_pipeline(c, gs, wa, spec, spec.replicates, derive_seed(cseed, 0xeb))
                     .agreement_mean;
    }
    return total / n_cases;
}

}  // namespace detail

inline constexpr uint64_t kTrainPartition = 0x7a11;
inline constexpr uint64_t kTestPartition = 0x7b22;

// Hyperparameter training: when a method declares a grid with more than one
// candidate, each candidate is scored by mean agreement over the n_train cases
// and the best is frozen into the returned spec. With singleton (or absent)
// grids the defaults are used as-is. Train and test cases come from disjoint
// seed partitions.
inline ExperimentSpec tune_spec(const ExperimentSpec& spec, GraphSearchId gs, WalkId wa) {
    ExperimentSpec tuned = spec;
    auto pick = [&](auto setter, const auto& grid) {
        if (grid.empty()) return;
        if (grid.size() == 1) {
            setter(tuned, grid[0]);
            return;
        }
        double best_score = -1.0;
        auto best_value = grid[0];
        for (const auto& cand : grid) {
            ExperimentSpec trial = tuned;
            setter(trial, cand);
            const double score =
                detail::mean_agreement_over_cases(trial, gs, wa, spec.n_train, kTrainPartition);
            if (score > best_score) {
                best_score = score;
                best_value = cand;
            }
        }
        setter(tuned, best_value);
    };
    switch (gs) {
        case GraphSearchId::quadtree:
            pick([](ExperimentSpec& s, double v) { s.quadtree.theta_split = v; },
                 spec.grid_quadtree_theta_split);
            break;
        case GraphSearchId::ga:
            pick([](ExperimentSpec& s, double v) { s.ga.sigma = v; }, spec.grid_ga_sigma);
            break;
        case GraphSearchId::tsxm:
            pick([](ExperimentSpec& s, int v) { s.tsxm.epsilon = v; }, spec.grid_tsxm_epsilon);
            break;
    }
    return tuned;
}

// Table-2-shaped benchmark: every (graph search, walk) combination is tuned on
// the train partition and evaluated on n_test fresh cases.
inline std::vector<BenchmarkRow> run_benchmark(const ExperimentSpec& spec) {
    std::vector<BenchmarkRow> rows;
    for (GraphSearchId gs : spec.graph_searches) {
        for (WalkId wa : spec.walks) {
            const ExperimentSpec tuned = tune_spec(spec, gs, wa);
            BenchmarkRow row;
            row.gs = gs;
            row.wa = wa;
            std::vector<double> scores;
            for (int i = 0; i < spec.n_test; ++i) {
                const uint64_t cseed = derive_seed(spec.master_seed, kTestPartition, i);
                Rng case_rng(cseed);
                const Case c = sample_case(tuned, case_rng);
                const PipelineResult pr =
                    run_pipeline(c, gs, wa, tuned, tuned.replicates, derive_seed(cseed, 0xeb));
                scores.push_back(pr.agreement_mean);
                row.mean_nodes += pr.mean_nodes;
                row.mean_edges += pr.mean_edges;
            }
            const auto [m, s] = mean_std(scores);
            row.agreement_mean = m;
            row.agreement_std = s;
            row.mean_nodes /= spec.n_test;
            row.mean_edges /= spec.n_test;
            row.n_cases = spec.n_test;
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::vector<ResultRow> benchmark_result_rows(const std::vector<BenchmarkRow>& rows) {
    std::vector<ResultRow> out;
    for (const auto& r : rows) {
        const std::string method = graph_search_name(r.gs) + "+" + walk_name(r.wa);
        out.push_back({method, "agreement", r.agreement_mean, r.agreement_std, r.n_cases});
        out.push_back({method, "n_nodes", r.mean_nodes, 0.0, r.n_cases});
        out.push_back({method, "n_edges", r.mean_edges, 0.0, r.n_cases});
    }
    return out;
}

enum class SweepId { population, circles, beta, gamma };

inline std::string sweep_name(SweepId s) {
    switch (s) {
        case SweepId::population: return "population";
        case SweepId::circles: return "circles";
        case SweepId::beta: return "beta";
        case SweepId::gamma: return "gamma";
    }
    throw std::invalid_argument("unknown sweep id");
}
inline SweepId parse_sweep(const std::string& s) {
    if (s == "population") return SweepId::population;
    if (s == "circles") return SweepId::circles;
    if (s == "beta") return SweepId::beta;
    if (s == "gamma") return SweepId::gamma;
    throw std::invalid_argument("unknown sweep id: " + s);
}

struct SweepResult {
    SweepId sweep;
    double range_lo = 0.0, range_hi = 0.0;
    double agreement_mean = 0.0;
    double agreement_std = 0.0;
    std::vector<double> per_case;
};

// Sensitivity sweep: n cases with the swept parameter uniform in [lo, hi]
// (everything else at base), run through the designated pipeline (default
// tsxm+mac). The population sweep fixes the environment to a single circle of
// radius 50 m; the circle-count sweep pins the radius at 2 m.
inline SweepResult run_sensitivity(const ExperimentSpec& base, SweepId sweep, double lo, double hi,
                                   int n_cases, GraphSearchId gs = GraphSearchId::tsxm,
                                   WalkId wa = WalkId::mac) {
    if (n_cases < 1) throw std::invalid_argument("run_sensitivity: need at least one case");
    SweepResult res;
    res.sweep = sweep;
    res.range_lo = lo;
    res.range_hi = hi;
    for (int i = 0; i < n_cases; ++i) {
        const uint64_t cseed = derive_seed(base.master_seed, 0x5eef, i,
                                           static_cast<uint64_t>(sweep));
        Rng case_rng(cseed);
        ExperimentSpec s = base;
        switch (sweep) {
            case SweepId::population:
                s.N = static_cast<int>(std::lround(case_rng.uniform(lo, hi)));
                s.circles = {Circle{{50.0, 50.0}, 50.0}};
                break;
            case SweepId::circles: {
                const int nc = static_cast<int>(std::lround(case_rng.uniform(lo, hi)));
                s.n_circles = {nc, nc};
                s.radius = {2.0, 2.0};
                break;
            }
            case SweepId::beta: {
                const double b = case_rng.uniform(lo, hi);
                s.beta = {b, b};
                break;
            }
            case SweepId::gamma: {
                const double g = case_rng.uniform(lo, hi);
                s.gamma = {g, g};
                break;
            }
        }
        const Case c = sample_case(s, case_rng);
        res.per_case.push_back(
            run_pipeline(c, gs, wa, s, s.replicates, derive_seed(cseed, 0xeb)).agreement_mean);
    }
    const auto [m, sd] = mean_std(res.per_case);
    res.agreement_mean = m;
    res.agreement_std = sd;
    return res;
}

}  // namespace normgraph

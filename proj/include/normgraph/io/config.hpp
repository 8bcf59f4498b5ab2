#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "normgraph/epi/params.hpp"
#include "normgraph/search/dtw.hpp"
#include "normgraph/search/ga.hpp"
#include "normgraph/search/quadtree.hpp"
#include "normgraph/sim/engine.hpp"
#include "normgraph/walk/mac.hpp"
#include "normgraph/walk/mc.hpp"

namespace normgraph {

enum class GraphSearchId { quadtree, ga, tsxm };
enum class WalkId { mc, mac };

inline std::string graph_search_name(GraphSearchId g) {
    switch (g) {
        case GraphSearchId::quadtree: return "quadtree";
        case GraphSearchId::ga: return "ga";
        case GraphSearchId::tsxm: return "tsxm";
    }
    throw std::invalid_argument("unknown graph search id");
}
inline GraphSearchId parse_graph_search(const std::string& s) {
    if (s == "quadtree") return GraphSearchId::quadtree;
    if (s == "ga") return GraphSearchId::ga;
    if (s == "tsxm") return GraphSearchId::tsxm;
    throw std::invalid_argument("unknown graph search id: " + s);
}
inline std::string walk_name(WalkId w) { return w == WalkId::mc ? "mc" : "mac"; }
inline WalkId parse_walk(const std::string& s) {
    if (s == "mc") return WalkId::mc;
    if (s == "mac") return WalkId::mac;
    throw std::invalid_argument("unknown walk id: " + s);
}

// Before graph search, logs are thinned: at most max_series agent series, one
// frame every stride_t steps (frame 0 always kept).
struct FitThinning {
    int max_series = 112;
    int stride_t = 5;
};

struct ExperimentSpec {
    Model model = Model::sir;
    // parameter ranges; degenerate ranges pin a value
    RealRange beta{0.037, 0.1};
    RealRange gamma{120.0, 240.0};
    RealRange rho{0.9, 0.99};
    RealRange psi{0.05, 0.20};

    // environment: explicit circles, or synthetic generation ranges
    std::vector<Circle> circles;  // non-empty = fixed environment
    IntRange n_circles{1, 40};
    RealRange radius{2.0, 25.0};
    double placement_extent = 0.0;  // <= 0: automatic
    // caps the automatic extent at sqrt(N / density_target) so the population
    // density stays in a comparable band across sampled cases; 0 disables
    double density_target = 0.16;

    int N = 200;
    int T = 200;
    double dt = 1.0;
    double initial_infected = 0.01;  // fraction; lowest-id agents are seeded
    WalkParams wp;

    std::vector<GraphSearchId> graph_searches{GraphSearchId::quadtree, GraphSearchId::ga,
                                              GraphSearchId::tsxm};
    std::vector<WalkId> walks{WalkId::mc, WalkId::mac};
    QuadtreeSearchParams quadtree;
    GAParams ga;
    TSxMParams tsxm;
    MCOptions mc;
    MacTrainParams mac;
    FitThinning thinning;
    // hyperparameter grids explored by the benchmark training phase
    std::vector<double> grid_quadtree_theta_split;
    std::vector<double> grid_ga_sigma;
    std::vector<int> grid_tsxm_epsilon;

    uint64_t master_seed = 1;
    int n_train = 30;
    int n_test = 10;
    int replicates = 1;
};

namespace detail {

inline void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
}

inline RealRange parse_range(const nlohmann::json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), j.get<double>()};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument("config: " + where + " must be a number or [lo, hi]");
}

inline IntRange parse_int_range(const nlohmann::json& j, const std::string& where) {
    if (j.is_number_integer()) return {j.get<int>(), j.get<int>()};
    if (j.is_array() && j.size() == 2) return {j[0].get<int>(), j[1].get<int>()};
    throw std::invalid_argument("config: " + where + " must be an integer or [lo, hi]");
}

template <class T>
void maybe(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    using detail::check_keys;
    using detail::maybe;
    ExperimentSpec spec;
    check_keys(j, {"model", "params", "env", "sim", "methods", "seeds"}, "top level");

    if (j.contains("model")) spec.model = parse_model(j.at("model").get<std::string>());

    if (j.contains("params")) {
        const auto& p = j.at("params");
        check_keys(p, {"beta", "gamma", "rho", "psi"}, "params");
        if (p.contains("beta")) spec.beta = detail::parse_range(p.at("beta"), "params.beta");
        if (p.contains("gamma")) spec.gamma = detail::parse_range(p.at("gamma"), "params.gamma");
        if (p.contains("rho")) spec.rho = detail::parse_range(p.at("rho"), "params.rho");
        if (p.contains("psi")) spec.psi = detail::parse_range(p.at("psi"), "params.psi");
    }

    if (j.contains("env")) {
        const auto& e = j.at("env");
        check_keys(e, {"circles", "n_circles", "radius", "placement_extent", "density_target"},
                   "env");
        if (e.contains("circles")) {
            for (const auto& c : e.at("circles")) {
                if (!c.is_array() || c.size() != 3)
                    throw std::invalid_argument("config: env.circles entries must be [cx, cy, r]");
                spec.circles.push_back(
                    {{c[0].get<double>(), c[1].get<double>()}, c[2].get<double>()});
            }
        }
        if (e.contains("n_circles"))
            spec.n_circles = detail::parse_int_range(e.at("n_circles"), "env.n_circles");
        if (e.contains("radius")) {
            const RealRange r = detail::parse_range(e.at("radius"), "env.radius");
            spec.radius = r;
        }
        maybe(e, "placement_extent", spec.placement_extent);
        maybe(e, "density_target", spec.density_target);
    }

    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        check_keys(s,
                   {"N", "T", "dt", "initial_infected", "speed", "delta", "kappa", "d_min",
                    "r_int"},
                   "sim");
        maybe(s, "N", spec.N);
        maybe(s, "T", spec.T);
        maybe(s, "dt", spec.dt);
        maybe(s, "initial_infected", spec.initial_infected);
        maybe(s, "speed", spec.wp.speed);
        maybe(s, "delta", spec.wp.delta);
        maybe(s, "kappa", spec.wp.kappa);
        maybe(s, "d_min", spec.wp.d_min);
        maybe(s, "r_int", spec.wp.r_int);
    }

    if (j.contains("methods")) {
        const auto& m = j.at("methods");
        check_keys(m, {"graph_search", "walk", "quadtree", "ga", "tsxm", "mc", "mac", "thinning"},
                   "methods");
        if (m.contains("graph_search")) {
            spec.graph_searches.clear();
            for (const auto& g : m.at("graph_search"))
                spec.graph_searches.push_back(parse_graph_search(g.get<std::string>()));
        }
        if (m.contains("walk")) {
            spec.walks.clear();
            for (const auto& w : m.at("walk")) spec.walks.push_back(parse_walk(w.get<std::string>()));
        }
        if (m.contains("quadtree")) {
            const auto& q = m.at("quadtree");
            check_keys(q, {"theta_split", "max_depth", "adjacency_augment", "stride_t", "grid_theta_split"},
                       "methods.quadtree");
            maybe(q, "theta_split", spec.quadtree.theta_split);
            maybe(q, "max_depth", spec.quadtree.max_depth);
            maybe(q, "adjacency_augment", spec.quadtree.adjacency_augment);
            maybe(q, "stride_t", spec.quadtree.stride_t);
            maybe(q, "grid_theta_split", spec.grid_quadtree_theta_split);
        }
        if (m.contains("ga")) {
            const auto& g = m.at("ga");
            check_keys(g,
                       {"pop_size", "generations", "alpha", "sigma", "x0", "r_cover", "lambda_v",
                        "p_crossover", "p_mutation", "min_transition_count", "grid_sigma"},
                       "methods.ga");
            maybe(g, "pop_size", spec.ga.pop_size);
            maybe(g, "generations", spec.ga.generations);
            maybe(g, "alpha", spec.ga.alpha);
            maybe(g, "sigma", spec.ga.sigma);
            maybe(g, "x0", spec.ga.x0);
            maybe(g, "r_cover", spec.ga.r_cover);
            maybe(g, "lambda_v", spec.ga.lambda_v);
            maybe(g, "p_crossover", spec.ga.p_crossover);
            maybe(g, "p_mutation", spec.ga.p_mutation);
            maybe(g, "min_transition_count", spec.ga.min_transition_count);
            maybe(g, "grid_sigma", spec.grid_ga_sigma);
        }
        if (m.contains("tsxm")) {
            const auto& t = m.at("tsxm");
            check_keys(t,
                       {"epsilon", "restarts", "dba_iters", "tol", "kmeans_iters",
                        "min_transition_count", "grid_epsilon"},
                       "methods.tsxm");
            maybe(t, "epsilon", spec.tsxm.epsilon);
            maybe(t, "restarts", spec.tsxm.restarts);
            maybe(t, "dba_iters", spec.tsxm.dba_iters);
            maybe(t, "tol", spec.tsxm.tol);
            maybe(t, "kmeans_iters", spec.tsxm.kmeans_iters);
            maybe(t, "min_transition_count", spec.tsxm.min_transition_count);
            maybe(t, "grid_epsilon", spec.grid_tsxm_epsilon);
        }
        if (m.contains("mc")) {
            const auto& c = m.at("mc");
            check_keys(c, {"bin_bounds", "alpha_s"}, "methods.mc");
            maybe(c, "bin_bounds", spec.mc.bin_bounds);
            maybe(c, "alpha_s", spec.mc.alpha_s);
        }
        if (m.contains("mac")) {
            const auto& c = m.at("mac");
            check_keys(c, {"learning_rate", "epochs", "l2", "batch_size", "max_samples_per_node"},
                       "methods.mac");
            maybe(c, "learning_rate", spec.mac.learning_rate);
            maybe(c, "epochs", spec.mac.epochs);
            maybe(c, "l2", spec.mac.l2);
            maybe(c, "batch_size", spec.mac.batch_size);
            maybe(c, "max_samples_per_node", spec.mac.max_samples_per_node);
        }
        if (m.contains("thinning")) {
            const auto& t = m.at("thinning");
            check_keys(t, {"max_series", "stride_t"}, "methods.thinning");
            maybe(t, "max_series", spec.thinning.max_series);
            maybe(t, "stride_t", spec.thinning.stride_t);
        }
    }

    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        check_keys(s, {"master", "n_train", "n_test", "replicates"}, "seeds");
        maybe(s, "master", spec.master_seed);
        maybe(s, "n_train", spec.n_train);
        maybe(s, "n_test", spec.n_test);
        maybe(s, "replicates", spec.replicates);
    }

    if (spec.n_train < 1 || spec.n_test < 1)
        throw std::invalid_argument("config: n_train and n_test must be >= 1");
    if (spec.T < 1 || spec.N < 1) throw std::invalid_argument("config: N and T must be >= 1");
    return spec;
}

// Fully resolved round-trippable form, also used as the run manifest.
inline nlohmann::json spec_to_json(const ExperimentSpec& s) {
    nlohmann::json j;
    j["model"] = model_name(s.model);
    j["params"] = {{"beta", {s.beta.lo, s.beta.hi}},
                   {"gamma", {s.gamma.lo, s.gamma.hi}},
                   {"rho", {s.rho.lo, s.rho.hi}},
                   {"psi", {s.psi.lo, s.psi.hi}}};
    nlohmann::json env;
    if (!s.circles.empty()) {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : s.circles) cs.push_back({c.center.x, c.center.y, c.radius});
        env["circles"] = std::move(cs);
    }
    env["n_circles"] = {s.n_circles.lo, s.n_circles.hi};
    env["radius"] = {s.radius.lo, s.radius.hi};
    env["placement_extent"] = s.placement_extent;
    env["density_target"] = s.density_target;
    j["env"] = std::move(env);
    j["sim"] = {{"N", s.N},
                {"T", s.T},
                {"dt", s.dt},
                {"initial_infected", s.initial_infected},
                {"speed", s.wp.speed},
                {"delta", s.wp.delta},
                {"kappa", s.wp.kappa},
                {"d_min", s.wp.d_min},
                {"r_int", s.wp.r_int}};
    nlohmann::json gs = nlohmann::json::array(), ws = nlohmann::json::array();
    for (auto g : s.graph_searches) gs.push_back(graph_search_name(g));
    for (auto w : s.walks) ws.push_back(walk_name(w));
    nlohmann::json methods;
    methods["graph_search"] = std::move(gs);
    methods["walk"] = std::move(ws);
    methods["quadtree"] = {{"theta_split", s.quadtree.theta_split},
                           {"max_depth", s.quadtree.max_depth},
                           {"adjacency_augment", s.quadtree.adjacency_augment},
                           {"stride_t", s.quadtree.stride_t}};
    if (!s.grid_quadtree_theta_split.empty())
        methods["quadtree"]["grid_theta_split"] = s.grid_quadtree_theta_split;
    methods["ga"] = {{"pop_size", s.ga.pop_size},
                     {"generations", s.ga.generations},
                     {"alpha", s.ga.alpha},
                     {"sigma", s.ga.sigma},
                     {"x0", s.ga.x0},
                     {"r_cover", s.ga.r_cover},
                     {"lambda_v", s.ga.lambda_v},
                     {"p_crossover", s.ga.p_crossover},
                     {"p_mutation", s.ga.p_mutation},
                     {"min_transition_count", s.ga.min_transition_count}};
    if (!s.grid_ga_sigma.empty()) methods["ga"]["grid_sigma"] = s.grid_ga_sigma;
    methods["tsxm"] = {{"epsilon", s.tsxm.epsilon},
                       {"restarts", s.tsxm.restarts},
                       {"dba_iters", s.tsxm.dba_iters},
                       {"tol", s.tsxm.tol},
                       {"kmeans_iters", s.tsxm.kmeans_iters},
                       {"min_transition_count", s.tsxm.min_transition_count}};
    if (!s.grid_tsxm_epsilon.empty()) methods["tsxm"]["grid_epsilon"] = s.grid_tsxm_epsilon;
    methods["mc"] = {{"bin_bounds", s.mc.bin_bounds}, {"alpha_s", s.mc.alpha_s}};
    methods["mac"] = {{"learning_rate", s.mac.learning_rate},
                      {"epochs", s.mac.epochs},
                      {"l2", s.mac.l2},
                      {"batch_size", s.mac.batch_size},
                      {"max_samples_per_node", s.mac.max_samples_per_node}};
    methods["thinning"] = {{"max_series", s.thinning.max_series},
                           {"stride_t", s.thinning.stride_t}};
    j["methods"] = std::move(methods);
    j["seeds"] = {{"master", s.master_seed},
                  {"n_train", s.n_train},
                  {"n_test", s.n_test},
                  {"replicates", s.replicates}};
    return j;
}

inline ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    nlohmann::json j;
    in >> j;
    return spec_from_json(j);
}

inline void save_spec(const std::string& path, const ExperimentSpec& spec) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << spec_to_json(spec).dump(1) << "\n";
}

}  // namespace normgraph

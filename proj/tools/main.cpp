// Command-line front end: single norm/graph simulations, graph and walk-model
// fitting from logs, end-to-end pipeline evaluation, Table-2-style benchmarks
// and sensitivity sweeps. All outputs are CSV/JSON files under --out.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "normgraph/normgraph.hpp"

namespace fs = std::filesystem;
using namespace normgraph;

namespace {

ExperimentSpec load_or_default(const std::string& config_path) {
    if (config_path.empty()) return ExperimentSpec{};
    return load_spec(config_path);
}

void write_manifest(const fs::path& out_dir, const ExperimentSpec& spec, uint64_t seed,
                    const std::string& command) {
    nlohmann::json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = spec_to_json(spec);
    std::ofstream out(out_dir / "manifest.json");
    out << j.dump(1) << "\n";
}

int cmd_simulate(const std::string& config, uint64_t seed, const fs::path& out_dir,
                 const std::string& mode, const std::string& graph_nodes,
                 const std::string& graph_edges, const std::string& model_file) {
    ExperimentSpec spec = load_or_default(config);
    spec.master_seed = seed;
    fs::create_directories(out_dir);
    Rng rng(derive_seed(seed, 0xca5e, 0));
    Case c = sample_case(spec, rng);
    SimConfig cfg;
    cfg.model = spec.model;
    cfg.T = spec.T;
    cfg.dt = spec.dt;

    SimResult result;
    if (mode == "norm") {
        result = run_norm_sim(c.pop, c.env, c.params, spec.wp, cfg, derive_seed(seed, 1));
    } else {
        if (graph_nodes.empty() || graph_edges.empty() || model_file.empty()) {
            std::cerr << "graph mode needs --graph-nodes, --graph-edges and --model-file\n";
            return 2;
        }
        const SpatialGraph graph = read_graph_csv(graph_nodes, graph_edges);
        const WalkModel walk = load_walk_model(model_file);
        std::vector<GraphAgent> gpop;
        for (const auto& a : c.pop) gpop.push_back({a.epi, nearest_node(graph, a.pos)});
        result = run_graph_sim(gpop, graph, WalkModelRef{&walk}, c.params, cfg,
                               derive_seed(seed, 1));
    }
    write_trajectory_csv((out_dir / "trajectory.csv").string(), result.traj);
    write_position_log_csv((out_dir / "positions.csv").string(), result.log);
    write_epi_log_csv((out_dir / "epi.csv").string(), result.epi);
    write_manifest(out_dir, spec, seed, "simulate");
    std::cout << "wrote " << (out_dir / "trajectory.csv") << "\n";
    return 0;
}

int cmd_fit_graph(const std::string& config, uint64_t seed, const fs::path& out_dir,
                  const std::string& gs_name, const std::string& positions) {
    ExperimentSpec spec = load_or_default(config);
    fs::create_directories(out_dir);
    const GraphSearchId gs = parse_graph_search(gs_name);
    const PositionLog log = read_position_log_csv(positions);
    ContinuousEnv env;
    if (!spec.circles.empty()) {
        env = ContinuousEnv::from_circles(spec.circles);
    } else {
        // environment implied by the log's spatial extent
        BBox bb{log.positions[0][0], log.positions[0][0]};
        for (const auto& row : log.positions)
            for (const auto& p : row) bb.expand(p);
        const Vec2 c{(bb.lo.x + bb.hi.x) / 2, (bb.lo.y + bb.hi.y) / 2};
        const double r = std::max({bb.width(), bb.height(), 1.0});
        env = ContinuousEnv::from_circles({Circle{c, r}});
    }
    Rng rng(derive_seed(seed, 2));
    SpatialGraph graph;
    if (gs == GraphSearchId::tsxm) {
        const TsxmResult res = tsxm_search(thin_log(log, spec.thinning), env, spec.tsxm, rng);
        graph = res.graph;
        std::ofstream inertia(out_dir / "inertia.csv");
        inertia << "k,inertia\n";
        for (size_t k = 0; k < res.inertia_per_k.size(); ++k)
            inertia << (k + 1) << "," << fmt_double(res.inertia_per_k[k]) << "\n";
    } else {
        graph = fit_graph(gs, log, env, spec, rng);
    }
    write_graph_csv((out_dir / "nodes.csv").string(), (out_dir / "edges.csv").string(), graph);
    std::cout << "graph: " << graph.size() << " nodes, " << graph.edges.size() << " edges\n";
    return 0;
}

int cmd_fit_walk(const std::string& config, uint64_t seed, const fs::path& out_dir,
                 const std::string& wa_name, const std::string& positions, const std::string& epi,
                 const std::string& graph_nodes, const std::string& graph_edges) {
    ExperimentSpec spec = load_or_default(config);
    fs::create_directories(out_dir);
    const WalkId wa = parse_walk(wa_name);
    const PositionLog log = read_position_log_csv(positions);
    const EpiLog epi_log = read_epi_log_csv(epi);
    const SpatialGraph graph = read_graph_csv(graph_nodes, graph_edges);
    Rng rng(derive_seed(seed, 3));
    const WalkModel model = fit_walk(wa, log, epi_log, graph, spec, rng);
    save_walk_model((out_dir / "walk_model.json").string(), model);
    std::cout << "wrote " << (out_dir / "walk_model.json") << "\n";
    return 0;
}

int cmd_evaluate(const std::string& config, uint64_t seed, const fs::path& out_dir,
                 const std::string& gs_name, const std::string& wa_name, int replicates) {
    ExperimentSpec spec = load_or_default(config);
    spec.master_seed = seed;
    if (replicates > 0) spec.replicates = replicates;
    fs::create_directories(out_dir);
    Rng rng(derive_seed(seed, 0xca5e, 0));
    const Case c = sample_case(spec, rng);
    const GraphSearchId gs = parse_graph_search(gs_name);
    const WalkId wa = parse_walk(wa_name);
    const PipelineResult pr =
        run_pipeline(c, gs, wa, spec, spec.replicates, derive_seed(seed, 0xeb));
    const std::string method = gs_name + "+" + wa_name;
    write_results_csv((out_dir / "results.csv").string(),
                      {{method, "agreement", pr.agreement_mean, pr.agreement_std, pr.replicates},
                       {method, "n_nodes", pr.mean_nodes, 0.0, pr.replicates},
                       {method, "n_edges", pr.mean_edges, 0.0, pr.replicates}});
    write_manifest(out_dir, spec, seed, "evaluate");
    std::cout << method << " agreement " << pr.agreement_mean << " +- " << pr.agreement_std
              << " (|V| " << pr.mean_nodes << ", |E| " << pr.mean_edges << ")\n";
    return 0;
}

int cmd_benchmark(const std::string& config, uint64_t seed, const fs::path& out_dir,
                  int replicates) {
    ExperimentSpec spec = load_or_default(config);
    spec.master_seed = seed;
    if (replicates > 0) spec.replicates = replicates;
    fs::create_directories(out_dir);
    const auto rows = run_benchmark(spec);
    write_results_csv((out_dir / "results.csv").string(), benchmark_result_rows(rows));
    write_manifest(out_dir, spec, seed, "benchmark");
    for (const auto& r : rows)
        std::cout << graph_search_name(r.gs) << "+" << walk_name(r.wa) << "  "
                  << r.agreement_mean << " +- " << r.agreement_std << "  |V| " << r.mean_nodes
                  << "  |E| " << r.mean_edges << "\n";
    return 0;
}

int cmd_sensitivity(const std::string& config, uint64_t seed, const fs::path& out_dir,
                    const std::string& sweep_id, std::vector<double> range, int cases,
                    const std::string& gs_name, const std::string& wa_name, int replicates) {
    ExperimentSpec spec = load_or_default(config);
    spec.master_seed = seed;
    if (replicates > 0) spec.replicates = replicates;
    fs::create_directories(out_dir);
    const SweepId sweep = parse_sweep(sweep_id);
    if (range.empty()) {
        switch (sweep) {
            case SweepId::population: range = {100.0, 3000.0}; break;
            case SweepId::circles: range = {10.0, 100.0}; break;
            case SweepId::beta: range = {0.037, 0.37}; break;
            case SweepId::gamma: range = {60.0, 380.0}; break;
        }
    }
    if (range.size() != 2) {
        std::cerr << "--range needs exactly two values\n";
        return 2;
    }
    const SweepResult res =
        run_sensitivity(spec, sweep, range[0], range[1], cases, parse_graph_search(gs_name),
                        parse_walk(wa_name));
    write_results_csv((out_dir / "results.csv").string(),
                      {{sweep_id, "agreement", res.agreement_mean, res.agreement_std,
                        static_cast<int>(res.per_case.size())}});
    std::ofstream per_case(out_dir / "per_case.csv");
    per_case << "case,agreement\n";
    for (size_t i = 0; i < res.per_case.size(); ++i)
        per_case << i << "," << fmt_double(res.per_case[i]) << "\n";
    write_manifest(out_dir, spec, seed, "sensitivity " + sweep_id);
    std::cout << sweep_id << " agreement " << res.agreement_mean << " +- " << res.agreement_std
              << " over " << res.per_case.size() << " cases\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"norm-based to graph-based epidemic simulation transformation"};
    app.require_subcommand(1);

    std::string config, mode = "norm", gs = "tsxm", wa = "mac";
    std::string positions, epi, graph_nodes, graph_edges, model_file, sweep, out = "out";
    std::vector<double> range;
    uint64_t seed = 1;
    int replicates = 0, cases = 20;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON config file");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "run one simulation and export its logs");
    add_common(sim);
    sim->add_option("--mode", mode, "norm or graph")->check(CLI::IsMember({"norm", "graph"}));
    sim->add_option("--graph-nodes", graph_nodes, "node CSV (graph mode)");
    sim->add_option("--graph-edges", graph_edges, "edge CSV (graph mode)");
    sim->add_option("--model-file", model_file, "walk model JSON (graph mode)");

    auto* fg = app.add_subcommand("fit-graph", "fit a spatial graph from a position log");
    add_common(fg);
    fg->add_option("--graph-search", gs, "quadtree|ga|tsxm")
        ->check(CLI::IsMember({"quadtree", "ga", "tsxm"}));
    fg->add_option("--positions", positions, "position log CSV")->required();

    auto* fw = app.add_subcommand("fit-walk", "fit a walk model from a log and graph");
    add_common(fw);
    fw->add_option("--walk", wa, "mc|mac")->check(CLI::IsMember({"mc", "mac"}));
    fw->add_option("--positions", positions, "position log CSV")->required();
    fw->add_option("--epi", epi, "epi log CSV")->required();
    fw->add_option("--graph-nodes", graph_nodes, "node CSV")->required();
    fw->add_option("--graph-edges", graph_edges, "edge CSV")->required();

    auto* ev = app.add_subcommand("evaluate", "run one full pipeline on a sampled case");
    add_common(ev);
    ev->add_option("--graph-search", gs, "quadtree|ga|tsxm")
        ->check(CLI::IsMember({"quadtree", "ga", "tsxm"}));
    ev->add_option("--walk", wa, "mc|mac")->check(CLI::IsMember({"mc", "mac"}));
    ev->add_option("--replicates", replicates, "replicates per case");

    auto* bm = app.add_subcommand("benchmark", "evaluate every method combination");
    add_common(bm);
    bm->add_option("--replicates", replicates, "replicates per case");

    auto* sv = app.add_subcommand("sensitivity", "parameter sweep with the designated pipeline");
    add_common(sv);
    sv->add_option("--sweep", sweep, "population|circles|beta|gamma")->required();
    sv->add_option("--range", range, "sweep interval lo hi")->expected(2);
    sv->add_option("--cases", cases, "number of swept cases");
    sv->add_option("--graph-search", gs, "quadtree|ga|tsxm")
        ->check(CLI::IsMember({"quadtree", "ga", "tsxm"}));
    sv->add_option("--walk", wa, "mc|mac")->check(CLI::IsMember({"mc", "mac"}));
    sv->add_option("--replicates", replicates, "replicates per case");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config, seed, out, mode, graph_nodes, graph_edges, model_file);
        if (fg->parsed()) return cmd_fit_graph(config, seed, out, gs, positions);
        if (fw->parsed())
            return cmd_fit_walk(config, seed, out, wa, positions, epi, graph_nodes, graph_edges);
        if (ev->parsed()) return cmd_evaluate(config, seed, out, gs, wa, replicates);
        if (bm->parsed()) return cmd_benchmark(config, seed, out, replicates);
        if (sv->parsed())
            return cmd_sensitivity(config, seed, out, sweep, range, cases, gs, wa, replicates);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

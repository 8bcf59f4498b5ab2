#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "normgraph/walk/mac.hpp"
#include "normgraph/walk/mc.hpp"
#include "normgraph/walk/model.hpp"

using namespace normgraph;

namespace {

EpiLog uniform_epi(size_t T1, size_t n, MacroClass mc = MacroClass::susceptible) {
    EpiLog epi;
    epi.obs.assign(T1, std::vector<EpiObs>(n, EpiObs{mc, 0.0f}));
    return epi;
}

WalkContext context_at(const SpatialGraph& g, int node, MacroClass mc = MacroClass::susceptible) {
    WalkContext ctx;
    ctx.node = node;
    ctx.macro = mc;
    ctx.neighbor_occupancy.assign(g.adj[node].size(), {1.0, 0.0, 0.0});
    return ctx;
}

}  // namespace

TEST_CASE("project_log_to_graph") {
    const auto g = SpatialGraph::make({{0, 0}, {10, 0}}, {{0, 1}});
    SECTION("single-node graph maps everything to node zero") {
        const auto single = SpatialGraph::make({{3, 3}}, {});
        PositionLog log;
        log.positions = {{{0, 0}, {50, 50}}, {{1, 1}, {2, 2}}};
        const auto seq = project_log_to_graph(log, single);
        for (const auto& s : seq)
            for (int v : s) CHECK(v == 0);
    }
    SECTION("positions on node locations map exactly; ties to the lowest id") {
        PositionLog log;
        log.positions = {{{0, 0}, {10, 0}, {5, 0}}};
        const auto seq = project_log_to_graph(log, g);
        CHECK(seq[0][0] == 0);
        CHECK(seq[1][0] == 1);
        CHECK(seq[2][0] == 0);  // equidistant
    }
}

TEST_CASE("fit_mc smoothing arithmetic") {
    // one agent staying for 10 transitions at node 0 with one neighbour
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}}, {{0, 1}});
    std::vector<std::vector<int>> seq{std::vector<int>(11, 0)};
    const auto model = fit_mc(seq, uniform_epi(11, 1), g);
    const auto it = model.by_node.find("0");
    REQUIRE(it != model.by_node.end());
    CHECK_THAT(it->second[0], Catch::Matchers::WithinAbs(11.0 / 12.0, 1e-12));
    CHECK_THAT(it->second[1], Catch::Matchers::WithinAbs(1.0 / 12.0, 1e-12));
}

TEST_CASE("fit_mc with alpha_s -> 0 recovers empirical frequencies") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}, {0, 5}}, {{0, 1}, {0, 2}});
    // agent path visiting node 0 nine times: 3 stays, 3 moves to 1, 3 moves to 2
    std::vector<int> path;
    for (int rep = 0; rep < 3; ++rep) {
        path.insert(path.end(), {0, 0});       // stay at 0
        path.insert(path.end(), {0, 1, 0, 2}); // move to 1, back (to 0 is a move from 1), move to 2
        path.push_back(0);
    }
    std::vector<std::vector<int>> seq{path};
    MCOptions opts;
    opts.alpha_s = 1e-12;
    const auto model = fit_mc(seq, uniform_epi(path.size(), 1), g, opts);
    const auto& dist = model.by_node.at("0");
    // transitions out of node 0: count directly from the path
    int stay = 0, to1 = 0, to2 = 0, total = 0;
    for (size_t t = 0; t + 1 < path.size(); ++t)
        if (path[t] == 0) {
            ++total;
            stay += path[t + 1] == 0;
            to1 += path[t + 1] == 1;
            to2 += path[t + 1] == 2;
        }
    CHECK_THAT(dist[0], Catch::Matchers::WithinAbs(double(stay) / total, 1e-9));
    CHECK_THAT(dist[1], Catch::Matchers::WithinAbs(double(to1) / total, 1e-9));
    CHECK_THAT(dist[2], Catch::Matchers::WithinAbs(double(to2) / total, 1e-9));
}

TEST_CASE("mc backoff order and uniform fallback") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}}, {{0, 1}});
    std::vector<std::vector<int>> seq{std::vector<int>(6, 0)};
    // trained with susceptible observations only
    auto model = fit_mc(seq, uniform_epi(6, 1), g);
    Rng rng(1);
    SECTION("unseen full key falls back to a trained coarser key") {
        // same node, same class, different signature: the (node, class) backoff
        WalkContext ctx = context_at(g, 0, MacroClass::susceptible);
        ctx.neighbor_occupancy = {{0.0, 1.0, 0.0}};  // all infectious: unseen signature
        int stays = 0;
        for (int i = 0; i < 200; ++i) stays += model.sample_next(ctx, rng) == kStay;
        CHECK(stays > 150);  // smoothed stay probability is 6/7
    }
    SECTION("unseen class falls back to the node marginal") {
        WalkContext ctx = context_at(g, 0, MacroClass::infectious);
        int stays = 0;
        for (int i = 0; i < 200; ++i) stays += model.sample_next(ctx, rng) == kStay;
        CHECK(stays > 150);
    }
    SECTION("completely untrained node samples uniformly over legal moves") {
        WalkContext ctx = context_at(g, 1);
        int stays = 0;
        for (int i = 0; i < 400; ++i) stays += model.sample_next(ctx, rng) == kStay;
        CHECK(stays > 140);
        CHECK(stays < 260);
    }
}

TEST_CASE("mc on isolated node always stays") {
    const auto g = SpatialGraph::make({{0, 0}}, {});
    std::vector<std::vector<int>> seq{std::vector<int>(4, 0)};
    const auto model = fit_mc(seq, uniform_epi(4, 1), g);
    Rng rng(2);
    CHECK(model.sample_next(context_at(g, 0), rng) == kStay);
    CHECK(model.by_node.at("0")[0] == 1.0);
}

TEST_CASE("mc sampling is deterministic per seed") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}, {0, 5}}, {{0, 1}, {0, 2}});
    std::vector<std::vector<int>> seq{{0, 1, 0, 2, 0, 0, 1, 0}};
    const auto model = fit_mc(seq, uniform_epi(8, 1), g);
    const auto ctx = context_at(g, 0);
    Rng r1(9), r2(9);
    for (int i = 0; i < 50; ++i) CHECK(model.sample_next(ctx, r1) == model.sample_next(ctx, r2));
}

TEST_CASE("mc distributions sum to one and support legal moves only") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}, {0, 5}, {5, 5}},
                                      {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    Rng rng(3);
    std::vector<std::vector<int>> seq;
    for (int a = 0; a < 6; ++a) {
        std::vector<int> path{static_cast<int>(rng.uniform_int(0, 3))};
        for (int t = 0; t < 30; ++t) {
            const int u = path.back();
            const auto& nb = g.adj[u];
            const int pick = static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(nb.size())));
            path.push_back(pick == 0 ? u : nb[pick - 1]);
        }
        seq.push_back(std::move(path));
    }
    const auto model = fit_mc(seq, uniform_epi(31, 6), g);
    for (const auto* table : {&model.full, &model.by_class, &model.by_node})
        for (const auto& [key, dist] : *table) {
            double sum = 0.0;
            for (double p : dist) sum += p;
            REQUIRE(std::abs(sum - 1.0) <= 1e-9);
            const int node = std::stoi(key.substr(0, key.find('|')));
            REQUIRE(dist.size() == g.adj[node].size() + 1);
        }
}

TEST_CASE("mac gradient matches central finite differences") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int K = static_cast<int>(rng.uniform_int(2, 4));
        const int d = static_cast<int>(rng.uniform_int(1, 6));
        const int n = static_cast<int>(rng.uniform_int(2, 12));
        std::vector<std::vector<double>> X(n, std::vector<double>(d));
        std::vector<int> Y(n);
        for (auto& row : X)
            for (auto& v : row) v = rng.uniform(-2, 2);
        for (auto& y : Y) y = static_cast<int>(rng.uniform_int(0, K - 1));
        std::vector<double> W(K * (d + 1));
        for (auto& w : W) w = rng.uniform(-1, 1);
        const double l2 = 1e-4;

        std::vector<double> grad;
        mac_loss_grad(W, K, d, X, Y, l2, &grad);
        const double h = 1e-6;
        for (size_t i = 0; i < W.size(); ++i) {
            auto Wp = W, Wm = W;
            Wp[i] += h;
            Wm[i] -= h;
            const double fd = (mac_loss_grad(Wp, K, d, X, Y, l2, nullptr) -
                               mac_loss_grad(Wm, K, d, X, Y, l2, nullptr)) /
                              (2 * h);
            const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
            REQUIRE(std::abs(fd - grad[i]) / denom <= 1e-5);
        }
    }
}

TEST_CASE("mac zero-epoch model is uniform") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}}, {{0, 1}});
    std::vector<std::vector<int>> seq{{0, 1, 0, 1, 0}};
    MacTrainParams tp;
    tp.epochs = 0;
    Rng rng(5);
    const auto model = fit_mac(seq, uniform_epi(5, 1), g, tp, rng);
    const auto probs = model.per_node[0].probabilities(context_at(g, 0));
    REQUIRE(probs.size() == 2);
    CHECK_THAT(probs[0], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(probs[1], Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("mac learns a stay-only dataset") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}}, {{0, 1}});
    std::vector<std::vector<int>> seq(4, std::vector<int>(40, 0));  // everyone always stays
    MacTrainParams tp;
    Rng rng(6);
    MacFitReport report;
    const auto model = fit_mac(seq, uniform_epi(40, 4), g, tp, rng, &report);
    const auto probs = model.per_node[0].probabilities(context_at(g, 0));
    CHECK(probs[0] >= 0.9);
    CHECK(report.final_loss <= report.initial_loss);
}

TEST_CASE("mac training loss decreases on a mixed dataset") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}, {0, 5}}, {{0, 1}, {0, 2}});
    Rng gen(7);
    std::vector<std::vector<int>> seq;
    for (int a = 0; a < 8; ++a) {
        std::vector<int> path{0};
        for (int t = 0; t < 30; ++t) {
            const int u = path.back();
            if (u == 0)
                path.push_back(gen.bernoulli(0.7) ? 1 : 2);
            else
                path.push_back(0);
        }
        seq.push_back(std::move(path));
    }
    MacTrainParams tp;
    tp.epochs = 50;
    Rng rng(8);
    MacFitReport report;
    fit_mac(seq, uniform_epi(31, 8), g, tp, rng, &report);
    CHECK(report.final_loss < report.initial_loss);
}

TEST_CASE("mac isolated node has a single certain class") {
    const auto g = SpatialGraph::make({{0, 0}}, {});
    std::vector<std::vector<int>> seq{{0, 0, 0}};
    MacTrainParams tp;
    Rng rng(9);
    const auto model = fit_mac(seq, uniform_epi(3, 1), g, tp, rng);
    Rng srng(10);
    CHECK(model.sample_next(context_at(g, 0), srng) == kStay);
    CHECK(model.per_node[0].probabilities(context_at(g, 0))[0] == 1.0);
}

TEST_CASE("mac prediction softmax saturation and determinism") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}}, {{0, 1}});
    MACWalkModel model;
    model.per_node.resize(2);
    model.per_node[0].neighbors = {1};
    const int d = mac_feature_dim(1);
    model.per_node[0].W.assign(2 * (d + 1), 0.0);
    SECTION("one saturated logit wins almost surely") {
        model.per_node[0].W[1 * (d + 1) + d] = 1e6;  // bias of the move option
        Rng rng(11);
        for (int i = 0; i < 100; ++i) CHECK(model.sample_next(context_at(g, 0), rng) == 1);
    }
    SECTION("equal logits are uniform") {
        Rng rng(12);
        int stays = 0;
        for (int i = 0; i < 1000; ++i) stays += model.sample_next(context_at(g, 0), rng) == kStay;
        CHECK(stays > 420);
        CHECK(stays < 580);
    }
    SECTION("same seed gives the same draw") {
        Rng r1(13), r2(13);
        for (int i = 0; i < 20; ++i)
            CHECK(model.sample_next(context_at(g, 0), r1) ==
                  model.sample_next(context_at(g, 0), r2));
    }
}

TEST_CASE("walk model serialization round-trips bit-exactly") {
    const auto g = SpatialGraph::make({{0, 0}, {5, 0}, {0, 5}}, {{0, 1}, {0, 2}});
    Rng gen(14);
    std::vector<std::vector<int>> seq;
    for (int a = 0; a < 5; ++a) {
        std::vector<int> path{0};
        for (int t = 0; t < 20; ++t) {
            const int u = path.back();
            const auto& nb = g.adj[u];
            const int pick = static_cast<int>(gen.uniform_int(0, static_cast<int64_t>(nb.size())));
            path.push_back(pick == 0 ? u : nb[pick - 1]);
        }
        seq.push_back(std::move(path));
    }
    EpiLog epi = uniform_epi(21, 5);
    const auto tmp = std::filesystem::temp_directory_path();

    SECTION("mc") {
        const WalkModel model = fit_mc(seq, epi, g);
        const auto path = (tmp / "mc_model.json").string();
        save_walk_model(path, model);
        const WalkModel loaded = load_walk_model(path);
        CHECK(std::get<MCWalkModel>(loaded) == std::get<MCWalkModel>(model));
        std::remove(path.c_str());
    }
    SECTION("mac") {
        MacTrainParams tp;
        tp.epochs = 20;
        Rng rng(15);
        const WalkModel model = fit_mac(seq, epi, g, tp, rng);
        const auto path = (tmp / "mac_model.json").string();
        save_walk_model(path, model);
        const WalkModel loaded = load_walk_model(path);
        CHECK(std::get<MACWalkModel>(loaded) == std::get<MACWalkModel>(model));
        std::remove(path.c_str());
    }
}

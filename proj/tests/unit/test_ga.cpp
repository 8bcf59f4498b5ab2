#include <catch2/catch_amalgamated.hpp>

#include "normgraph/search/ga.hpp"

using namespace normgraph;

namespace {

PositionLog stationary_log(const std::vector<Vec2>& points, int steps) {
    PositionLog log;
    for (int t = 0; t < steps; ++t) log.positions.push_back(points);
    return log;
}

}  // namespace

TEST_CASE("fitness examples") {
    SECTION("a node at the lone stationary agent scores zero") {
        const auto log = stationary_log({{3.0, 4.0}}, 5);
        CHECK(fitness({{{3.0, 4.0}}}, log) == 0.0);
    }
    SECTION("node at origin, agent fixed at (3,4) scores 5 for any T") {
        for (int steps : {1, 2, 10}) {
            const auto log = stationary_log({{3.0, 4.0}}, steps);
            CHECK_THAT(fitness({{{0.0, 0.0}}}, log), Catch::Matchers::WithinAbs(5.0, 1e-12));
        }
    }
    SECTION("time average over distances 1 then 3 is 2") {
        PositionLog log;
        log.positions.push_back({Vec2{1.0, 0.0}});
        log.positions.push_back({Vec2{3.0, 0.0}});
        CHECK_THAT(fitness({{{0.0, 0.0}}}, log), Catch::Matchers::WithinAbs(2.0, 1e-12));
    }
    SECTION("lambda_v adds the node-count penalty") {
        const auto log = stationary_log({{0.0, 0.0}}, 3);
        CHECK_THAT(fitness({{{0.0, 0.0}, {9.0, 9.0}}}, log, 0.5),
                   Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    SECTION("empty member is rejected") {
        const auto log = stationary_log({{0.0, 0.0}}, 2);
        CHECK_THROWS_AS(fitness({{}}, log), std::invalid_argument);
    }
}

TEST_CASE("fitness is translation-equivariant at lambda = 0") {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        PositionLog log;
        for (int t = 0; t < 4; ++t) {
            std::vector<Vec2> row;
            for (int i = 0; i < 6; ++i) row.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
            log.positions.push_back(std::move(row));
        }
        GAMember m;
        for (int i = 0; i < 3; ++i) m.nodes.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
        const Vec2 shift{rng.uniform(-50, 50), rng.uniform(-50, 50)};
        PositionLog shifted = log;
        for (auto& row : shifted.positions)
            for (auto& p : row) p += shift;
        GAMember sm = m;
        for (auto& nd : sm.nodes) nd += shift;
        CHECK_THAT(fitness(m, log), Catch::Matchers::WithinAbs(fitness(sm, shifted), 1e-9));
    }
}

TEST_CASE("greedy_set_cover_init") {
    SECTION("one agent yields one node at its position") {
        const auto m = greedy_set_cover_init({{2.0, 3.0}}, 1.0);
        REQUIRE(m.nodes.size() == 1);
        CHECK(m.nodes[0] == Vec2{2.0, 3.0});
    }
    SECTION("agents all within r_cover of one agent collapse to one node") {
        const auto m = greedy_set_cover_init({{0, 0}, {0.5, 0}, {0, 0.5}, {-0.4, 0.1}}, 1.0);
        CHECK(m.nodes.size() == 1);
    }
    SECTION("two far clusters need two nodes") {
        const auto m =
            greedy_set_cover_init({{0, 0}, {0.2, 0}, {100, 100}, {100.3, 100}}, 1.0);
        CHECK(m.nodes.size() == 2);
    }
    SECTION("every input is covered within r_cover") {
        Rng rng(21);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<Vec2> pts;
            for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform(0, 60), rng.uniform(0, 60)});
            const double r = 5.0;
            const auto m = greedy_set_cover_init(pts, r);
            for (const auto& p : pts) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& nd : m.nodes) best = std::min(best, dist(p, nd));
                REQUIRE(best <= r);
            }
        }
    }
    SECTION("empty input is rejected") {
        CHECK_THROWS_AS(greedy_set_cover_init({}, 1.0), std::invalid_argument);
    }
}

TEST_CASE("mutate") {
    Rng rng(31);
    SECTION("sigma = 0 leaves the member unchanged") {
        GAMember m{{{1, 1}, {2, 2}}};
        const auto out = mutate(m, 0.0, rng);
        CHECK(out.nodes == m.nodes);
    }
    SECTION("single node is always the mutated one") {
        GAMember m{{{1, 1}}};
        const auto out = mutate(m, 2.0, rng);
        CHECK(out.nodes.size() == 1);
        CHECK(out.nodes[0] != Vec2{1.0, 1.0});
    }
    SECTION("exactly one node moves") {
        GAMember m{{{0, 0}, {5, 5}, {9, 9}}};
        const auto out = mutate(m, 1.0, rng);
        int moved = 0;
        for (size_t i = 0; i < m.nodes.size(); ++i) moved += !(out.nodes[i] == m.nodes[i]);
        CHECK(moved == 1);
    }
    SECTION("same seed gives the same mutation") {
        Rng r1(5), r2(5);
        GAMember m{{{0, 0}, {5, 5}}};
        CHECK(mutate(m, 1.5, r1).nodes == mutate(m, 1.5, r2).nodes);
    }
}

TEST_CASE("crossover") {
    Rng rng(41);
    const GAMember m1{{{1, 0}, {2, 0}, {3, 0}}};
    const GAMember m2{{{4, 0}, {5, 0}, {6, 0}}};
    SECTION("j=1 swaps everything after the first node") {
        // force j=1 by scanning seeds
        for (uint64_t seed = 0; seed < 100; ++seed) {
            Rng r(seed);
            Rng probe(seed);
            if (probe.uniform_int(1, 3) != 1) continue;
            const auto [c1, c2] = crossover(m1, m2, r);
            CHECK(c1.nodes == std::vector<Vec2>{{1, 0}, {5, 0}, {6, 0}});
            CHECK(c2.nodes == std::vector<Vec2>{{4, 0}, {2, 0}, {3, 0}});
            return;
        }
        FAIL("no seed produced j=1");
    }
    SECTION("j=len returns the parents") {
        for (uint64_t seed = 0; seed < 100; ++seed) {
            Rng r(seed);
            Rng probe(seed);
            if (probe.uniform_int(1, 3) != 3) continue;
            const auto [c1, c2] = crossover(m1, m2, r);
            CHECK(c1.nodes == m1.nodes);
            CHECK(c2.nodes == m2.nodes);
            return;
        }
        FAIL("no seed produced j=len");
    }
    SECTION("singleton members always return the parents") {
        const auto [c1, c2] = crossover({{{1, 1}}}, {{{2, 2}}}, rng);
        CHECK(c1.nodes == std::vector<Vec2>{{1, 1}});
        CHECK(c2.nodes == std::vector<Vec2>{{2, 2}});
    }
    SECTION("unequal lengths are rejected") {
        CHECK_THROWS_AS(crossover({{{1, 1}}}, {{{2, 2}, {3, 3}}}, rng), std::invalid_argument);
    }
}

TEST_CASE("royalty_tournament_select") {
    Rng rng(51);
    std::vector<GAMember> pop;
    for (int i = 0; i < 10; ++i) pop.push_back({{{static_cast<double>(i), 0.0}}});
    SECTION("alpha = 1 returns the loss-sorted input") {
        std::vector<double> losses{9, 3, 7, 1, 5, 0, 8, 2, 6, 4};
        const auto out = royalty_tournament_select(pop, losses, 1.0, rng);
        REQUIRE(out.size() == pop.size());
        CHECK(out[0].nodes[0].x == 5.0);  // loss 0
        CHECK(out[1].nodes[0].x == 3.0);  // loss 1
        CHECK(out[9].nodes[0].x == 0.0);  // loss 9
    }
    SECTION("alpha = 0.1 keeps one elite and samples nine") {
        std::vector<double> losses{9, 3, 7, 1, 5, 0, 8, 2, 6, 4};
        const auto out = royalty_tournament_select(pop, losses, 0.1, rng);
        REQUIRE(out.size() == 10);
        CHECK(out[0].nodes[0].x == 5.0);
    }
    SECTION("equal losses sample approximately uniformly") {
        std::vector<double> losses(10, 2.0);
        std::vector<int> hits(10, 0);
        for (int rep = 0; rep < 400; ++rep) {
            const auto out = royalty_tournament_select(pop, losses, 0.1, rng);
            for (size_t i = 1; i < out.size(); ++i)
                ++hits[static_cast<int>(out[i].nodes[0].x)];
        }
        for (int h : hits) CHECK(h > 150);  // 3600 samples over 10 buckets
    }
}

TEST_CASE("ga_search") {
    const auto env = ContinuousEnv::from_circles({Circle{{0, 0}, 20.0}});
    GAParams gp;
    gp.pop_size = 10;
    gp.generations = 15;
    gp.r_cover = 2.0;

    SECTION("stationary point population is solved by the set-cover member") {
        const auto log = [&] {
            PositionLog l;
            for (int t = 0; t < 4; ++t)
                l.positions.push_back(std::vector<Vec2>(5, Vec2{1.0, 2.0}));
            return l;
        }();
        Rng rng(61);
        const auto res = ga_search(log, env, gp, rng);
        CHECK(res.best_loss == 0.0);
        REQUIRE(res.graph.size() == 1);
        CHECK(res.graph.nodes[0] == Vec2{1.0, 2.0});
    }
    SECTION("best-of-generation loss never increases") {
        Rng prng(62);
        PositionLog log;
        for (int t = 0; t < 6; ++t) {
            std::vector<Vec2> row;
            for (int i = 0; i < 15; ++i)
                row.push_back({prng.uniform(-15, 15), prng.uniform(-15, 15)});
            log.positions.push_back(std::move(row));
        }
        Rng rng(63);
        const auto res = ga_search(log, env, gp, rng);
        REQUIRE(res.best_loss_per_gen.size() == static_cast<size_t>(gp.generations));
        for (size_t g = 1; g < res.best_loss_per_gen.size(); ++g)
            CHECK(res.best_loss_per_gen[g] <= res.best_loss_per_gen[g - 1]);
    }
    SECTION("same seed reproduces the graph") {
        Rng prng(64);
        PositionLog log;
        for (int t = 0; t < 5; ++t) {
            std::vector<Vec2> row;
            for (int i = 0; i < 10; ++i)
                row.push_back({prng.uniform(-15, 15), prng.uniform(-15, 15)});
            log.positions.push_back(std::move(row));
        }
        Rng r1(65), r2(65);
        const auto a = ga_search(log, env, gp, r1);
        const auto b = ga_search(log, env, gp, r2);
        CHECK(a.graph.nodes == b.graph.nodes);
        CHECK(a.graph.edges == b.graph.edges);
    }
}

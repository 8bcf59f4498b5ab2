#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "normgraph/core/rng.hpp"
#include "normgraph/search/edges.hpp"
#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/continuous.hpp"

namespace normgraph {

// A member is a candidate node-location vector.
struct GAMember {
    std::vector<Vec2> nodes;
};

struct GAParams {
    int pop_size = 40;
    int generations = 100;
    double alpha = 0.1;       // elite fraction, clamped to at least one member
    double sigma = 1.0;       // mutation scale per coordinate (meters)
    int x0 = 0;               // initial node count; 0 means "use the set-cover size"
    double r_cover = 5.0;     // greedy set-cover radius for initialization
    double lambda_v = 0.0;    // node-count penalty weight
    double p_crossover = 0.7;
    double p_mutation = 0.3;
    int min_transition_count = 1;
};

// Loss: time-averaged mean distance from each agent to its nearest member
// node, plus an optional node-count penalty.
inline double fitness(const GAMember& member, const PositionLog& log, double lambda_v = 0.0) {
    if (member.nodes.empty()) throw std::invalid_argument("fitness: empty member");
    if (log.graph_mode() || log.positions.empty())
        throw std::invalid_argument("fitness: needs a non-empty norm-mode log");
    double total = 0.0;
    for (const auto& row : log.positions) {
        double step_sum = 0.0;
        for (const auto& p : row) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& nd : member.nodes) best = std::min(best, dist2(p, nd));
            step_sum += std::sqrt(best);
        }
        total += step_sum / static_cast<double>(row.size());
    }
    return total / static_cast<double>(log.positions.size()) +
           lambda_v * static_cast<double>(member.nodes.size());
}

// Greedy set cover over the t=0 agent positions: candidate centers are the
// positions themselves; each pick covers the most still-uncovered agents
// within r_cover (ties to the lowest agent index).
inline GAMember greedy_set_cover_init(const std::vector<Vec2>& positions_t0, double r_cover) {
    if (positions_t0.empty()) throw std::invalid_argument("greedy_set_cover_init: no positions");
    const double r2 = r_cover * r_cover;
    const size_t n = positions_t0.size();
    std::vector<uint8_t> covered(n, 0);
    size_t n_covered = 0;
    GAMember member;
    while (n_covered < n) {
        size_t best = 0;
        int best_gain = -1;
        for (size_t c = 0; c < n; ++c) {
            int gain = 0;
            for (size_t i = 0; i < n; ++i)
                if (!covered[i] && dist2(positions_t0[c], positions_t0[i]) <= r2) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        for (size_t i = 0; i < n; ++i)
            if (!covered[i] && dist2(positions_t0[best], positions_t0[i]) <= r2) {
                covered[i] = 1;
                ++n_covered;
            }
        member.nodes.push_back(positions_t0[best]);
    }
    return member;
}

// Perturbs exactly one uniformly chosen node by a 2-D normal(0, sigma^2 I) draw.
inline GAMember mutate(GAMember member, double sigma, Rng& rng) {
    const size_t idx =
        static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(member.nodes.size()) - 1));
    member.nodes[idx].x += rng.normal(0.0, sigma);
    member.nodes[idx].y += rng.normal(0.0, sigma);
    return member;
}

// One-point crossover at j in [1, |m1|]: children keep the first j nodes and
// swap the suffixes.
inline std::pair<GAMember, GAMember> crossover(const GAMember& m1, const GAMember& m2, Rng& rng) {
    if (m1.nodes.size() != m2.nodes.size())
        throw std::invalid_argument("crossover: members must have identical size");
    const size_t len = m1.nodes.size();
    const size_t j = static_cast<size_t>(rng.uniform_int(1, static_cast<int64_t>(len)));
    GAMember c1 = m1, c2 = m2;
    for (size_t i = j; i < len; ++i) std::swap(c1.nodes[i], c2.nodes[i]);
    return {std::move(c1), std::move(c2)};
}

namespace detail {

// Selection on indices; elites (ascending loss, stable by index) fill the
// first ceil(alpha * P) slots, the rest are sampled with replacement with
// inverse-loss weights.
inline std::vector<int> royalty_select_indices(const std::vector<double>& losses, double alpha,
                                               Rng& rng) {
    const int n = static_cast<int>(losses.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return losses[a] < losses[b]; });
    const int n_elite = std::min(n, static_cast<int>(std::ceil(alpha * n)));
    std::vector<int> out(order.begin(), order.begin() + n_elite);

    std::vector<double> w(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = 1.0 / (losses[i] + 1e-9);
        total += w[i];
    }
    for (int s = n_elite; s < n; ++s) {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            acc += w[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        out.push_back(pick);
    }
    return out;
}

}  // namespace detail

inline std::vector<GAMember> royalty_tournament_select(const std::vector<GAMember>& pop,
                                                       const std::vector<double>& losses,
                                                       double alpha, Rng& rng) {
    if (pop.size() != losses.size() || pop.size() < 2)
        throw std::invalid_argument("royalty_tournament_select: need |pop| == |losses| >= 2");
    std::vector<GAMember> out;
    out.reserve(pop.size());
    for (int idx : detail::royalty_select_indices(losses, alpha, rng)) out.push_back(pop[idx]);
    return out;
}

struct GAResult {
    SpatialGraph graph;
    GAMember best;
    double best_loss = 0.0;
    std::vector<double> best_loss_per_gen;  // best-so-far after each generation
};

// Evolves node-location vectors against the position log. The elite block is
// exempt from variation, so the best-so-far loss never increases.
inline GAResult ga_search(const PositionLog& log, const ContinuousEnv& env, const GAParams& gp,
                          Rng& rng) {
    if (log.graph_mode() || log.positions.empty())
        throw std::invalid_argument("ga_search: needs a non-empty norm-mode log");
    if (gp.pop_size < 2 || gp.generations < 1)
        throw std::invalid_argument("ga_search: pop_size >= 2 and generations >= 1 required");

    const double alpha = std::max(gp.alpha, 1.0 / gp.pop_size);
    std::vector<GAMember> pop;
    pop.reserve(gp.pop_size);
    pop.push_back(greedy_set_cover_init(log.positions[0], gp.r_cover));
    const int x0 = gp.x0 > 0 ? gp.x0 : static_cast<int>(pop[0].nodes.size());
    for (int i = 1; i < gp.pop_size; ++i) {
        GAMember m;
        const int count = static_cast<int>(rng.uniform_int(1, std::max(1, 2 * x0)));
        m.nodes.reserve(count);
        for (int j = 0; j < count; ++j)
            m.nodes.push_back({rng.uniform(env.bbox.lo.x, env.bbox.hi.x),
                               rng.uniform(env.bbox.lo.y, env.bbox.hi.y)});
        pop.push_back(std::move(m));
    }

    std::vector<double> losses(gp.pop_size);
    for (int i = 0; i < gp.pop_size; ++i) losses[i] = fitness(pop[i], log, gp.lambda_v);

    GAResult res;
    auto track_best = [&] {
        for (int i = 0; i < gp.pop_size; ++i)
            if (res.best.nodes.empty() || losses[i] < res.best_loss) {
                res.best_loss = losses[i];
                res.best = pop[i];
            }
    };
    track_best();

    const int n_elite = std::min(gp.pop_size, static_cast<int>(std::ceil(alpha * gp.pop_size)));
    for (int gen = 0; gen < gp.generations; ++gen) {
        const auto selected = detail::royalty_select_indices(losses, alpha, rng);
        std::vector<GAMember> next;
        std::vector<double> next_losses;
        next.reserve(gp.pop_size);
        next_losses.reserve(gp.pop_size);
        for (int idx : selected) {
            next.push_back(pop[idx]);
            next_losses.push_back(losses[idx]);
        }
        std::vector<uint8_t> dirty(gp.pop_size, 0);
        for (int i = n_elite; i + 1 < gp.pop_size; i += 2) {
            if (next[i].nodes.size() == next[i + 1].nodes.size() && rng.bernoulli(gp.p_crossover)) {
                auto [c1, c2] = crossover(next[i], next[i + 1], rng);
                next[i] = std::move(c1);
                next[i + 1] = std::move(c2);
                dirty[i] = dirty[i + 1] = 1;
            }
        }
        for (int i = n_elite; i < gp.pop_size; ++i) {
            if (rng.bernoulli(gp.p_mutation)) {
                next[i] = mutate(std::move(next[i]), gp.sigma, rng);
                dirty[i] = 1;
            }
        }
        for (int i = 0; i < gp.pop_size; ++i)
            if (dirty[i]) next_losses[i] = fitness(next[i], log, gp.lambda_v);
        pop = std::move(next);
        losses = std::move(next_losses);
        track_best();
        res.best_loss_per_gen.push_back(res.best_loss);
    }

    res.graph = SpatialGraph::make(res.best.nodes,
                                   infer_edges(res.best.nodes, log, gp.min_transition_count));
    return res;
}

}  // namespace normgraph

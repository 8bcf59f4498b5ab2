#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "normgraph/core/rng.hpp"
#include "normgraph/core/vec2.hpp"
#include "normgraph/epi/agent.hpp"

namespace normgraph {

struct Circle {
    Vec2 center;
    double radius = 1.0;

    bool operator==(const Circle&) const = default;
};

struct ContinuousEnv {
    std::vector<Circle> circles;
    BBox bbox;

    static ContinuousEnv from_circles(std::vector<Circle> circles) {
        if (circles.empty()) throw std::invalid_argument("environment needs at least one circle");
        for (const auto& c : circles)
            if (!(c.radius > 0.0)) throw std::invalid_argument("circle radius must be > 0");
        for (size_t i = 0; i < circles.size(); ++i)
            for (size_t j = i + 1; j < circles.size(); ++j)
                if (circles[i] == circles[j])
                    throw std::invalid_argument("environment circles must be distinct");
        ContinuousEnv env;
        env.bbox.lo = {circles[0].center.x - circles[0].radius,
                       circles[0].center.y - circles[0].radius};
        env.bbox.hi = {circles[0].center.x + circles[0].radius,
                       circles[0].center.y + circles[0].radius};
        for (const auto& c : circles) {
            env.bbox.expand({c.center.x - c.radius, c.center.y - c.radius});
            env.bbox.expand({c.center.x + c.radius, c.center.y + c.radius});
        }
        env.circles = std::move(circles);
        return env;
    }
};

// Closed-disk membership in the circle union.
inline bool contains(const ContinuousEnv& env, const Vec2& p) {
    for (const auto& c : env.circles)
        if (dist2(p, c.center) <= c.radius * c.radius) return true;
    return false;
}

// Tangent or overlapping circles are considered connected (a path exists
// through the touching point of the closed disks).
inline bool circles_connected(const std::vector<Circle>& cs) {
    const size_t n = cs.size();
    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), size_t{0});
    auto find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const double rr = cs[i].radius + cs[j].radius;
            if (dist2(cs[i].center, cs[j].center) <= rr * rr) parent[find(i)] = find(j);
        }
    const size_t root = find(0);
    for (size_t i = 1; i < n; ++i)
        if (find(i) != root) return false;
    return true;
}

struct IntRange {
    int lo = 1;
    int hi = 1;
};
struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Samples a union-of-circles environment. Counts, radii and centers are drawn
// uniformly; exact duplicate circles are redrawn; disconnected layouts are
// resampled up to a retry cap so walks cannot strand agents.
// placement_extent <= 0 selects an automatic extent scaled to the sampled
// circle areas, which keeps the union dense enough to connect for any count;
// max_auto_extent additionally bounds the automatic extent (harnesses use it
// to keep the population density in a comparable band across cases).
inline ContinuousEnv generate_synthetic_env(Rng& rng, IntRange n_circles, RealRange radius,
                                            double placement_extent = 0.0, int max_retries = 1000,
                                            double max_auto_extent = 0.0) {
    if (n_circles.lo < 1 || n_circles.hi < n_circles.lo)
        throw std::invalid_argument("bad circle-count range");
    if (!(radius.lo > 0.0) || radius.hi < radius.lo)
        throw std::invalid_argument("bad radius range");

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        const int n = static_cast<int>(rng.uniform_int(n_circles.lo, n_circles.hi));
        std::vector<double> radii(n);
        double sum_r2 = 0.0, max_r = 0.0;
        for (auto& r : radii) {
            r = rng.uniform(radius.lo, radius.hi);
            sum_r2 += r * r;
            max_r = std::max(max_r, r);
        }
        double extent = placement_extent > 0.0
                            ? placement_extent
                            : std::max(2.0 * max_r, 1.25 * std::sqrt(sum_r2));
        if (placement_extent <= 0.0 && max_auto_extent > 0.0)
            extent = std::min(extent, max_auto_extent);
        std::vector<Circle> circles;
        circles.reserve(n);
        for (int i = 0; i < n; ++i) {
            Circle c{{rng.uniform(0.0, extent), rng.uniform(0.0, extent)}, radii[i]};
            bool dup = true;
            while (dup) {
                dup = false;
                for (const auto& other : circles)
                    if (other == c) {
                        c.center = {rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
                        dup = true;
                        break;
                    }
            }
            circles.push_back(c);
        }
        if (circles_connected(circles)) return ContinuousEnv::from_circles(std::move(circles));
    }
    throw std::runtime_error(
        "generate_synthetic_env: retry cap exceeded without a connected layout; widen the ranges "
        "or shrink placement_extent");
}

// Uniform point inside the circle union (rejection sampling over the bbox).
inline Vec2 sample_point_in_env(const ContinuousEnv& env, Rng& rng, int max_tries = 200000) {
    for (int i = 0; i < max_tries; ++i) {
        Vec2 p{rng.uniform(env.bbox.lo.x, env.bbox.hi.x),
               rng.uniform(env.bbox.lo.y, env.bbox.hi.y)};
        if (contains(env, p)) return p;
    }
    throw std::runtime_error("sample_point_in_env: rejection sampling failed");
}

struct SpatialAgent {
    AgentEpi epi;
    Vec2 pos;
    Vec2 spawn;
};

struct WalkParams {
    double speed = 1.0;   // meters per step
    double delta = 10.0;  // pull cutoff distance
    double kappa = 1.0;   // pull coefficient (m^2/step)
    double d_min = 0.1;   // singularity guard
    double r_int = 2.0;   // interaction radius
};

// One step of the pull-random-walk: a unit random direction scaled by speed
// plus a spawn-directed pull of magnitude kappa/max(d, d_min), active only for
// 0 < d <= delta. Proposals leaving the environment are rejected (agent stays).
inline SpatialAgent pull_random_walk_step(const SpatialAgent& agent, const ContinuousEnv& env,
                                          Model model, const WalkParams& wp, Rng& rng) {
    if (is_dead(model, agent.epi.comp)) return agent;
    const double angle = rng.uniform(0.0, 6.283185307179586);
    Vec2 proposal = agent.pos + Vec2{std::cos(angle), std::sin(angle)} * wp.speed;
    const Vec2 to_spawn = agent.spawn - agent.pos;
    const double d = norm(to_spawn);
    if (d > 0.0 && d <= wp.delta) {
        const double magnitude = wp.kappa / std::max(d, wp.d_min);
        proposal += to_spawn * (magnitude / d);
    }
    SpatialAgent out = agent;
    if (contains(env, proposal)) out.pos = proposal;
    return out;
}

namespace detail {
struct GridKey {
    int64_t x, y;
    bool operator==(const GridKey&) const = default;
};
struct GridKeyHash {
    size_t operator()(const GridKey& k) const {
        return static_cast<size_t>(mix64(static_cast<uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL ^
                                         static_cast<uint64_t>(k.y)));
    }
};
}  // namespace detail

// Distance-based interaction: every unordered pair within r_int undergoes
// contact_infect with p_scale = 1, evaluated in ascending (i, j) order with
// live state, so a susceptible facing several infectious neighbours gets
// independent trials within the step. Sets transitioned flags for new
// infections. Dead agents neither move nor take part.
inline void norm_interaction_step(std::vector<SpatialAgent>& pop, const EpiParams& ep,
                                  const WalkParams& wp, Rng& rng,
                                  std::vector<uint8_t>& transitioned) {
    const double r2 = wp.r_int * wp.r_int;
    std::unordered_map<detail::GridKey, std::vector<int>, detail::GridKeyHash> grid;
    grid.reserve(pop.size() * 2);
    const double cell = wp.r_int > 0.0 ? wp.r_int : 1.0;
    auto key_of = [&](const Vec2& p) {
        return detail::GridKey{static_cast<int64_t>(std::floor(p.x / cell)),
                               static_cast<int64_t>(std::floor(p.y / cell))};
    };
    for (size_t i = 0; i < pop.size(); ++i) {
        if (is_dead(ep.model, pop[i].epi.comp)) continue;
        grid[key_of(pop[i].pos)].push_back(static_cast<int>(i));
    }
    std::vector<int> partners;
    for (size_t i = 0; i < pop.size(); ++i) {
        if (is_dead(ep.model, pop[i].epi.comp)) continue;
        const auto k = key_of(pop[i].pos);
        partners.clear();
        for (int64_t dx = -1; dx <= 1; ++dx)
            for (int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({k.x + dx, k.y + dy});
                if (it == grid.end()) continue;
                for (int j : it->second)
                    if (j > static_cast<int>(i) && dist2(pop[i].pos, pop[j].pos) <= r2)
                        partners.push_back(j);
            }
        std::sort(partners.begin(), partners.end());
        for (int j : partners) {
            auto res = contact_infect(ep, pop[i].epi, pop[j].epi, 1.0, rng);
            pop[i].epi = res.a;
            pop[j].epi = res.b;
            if (res.a_infected) transitioned[i] = 1;
            if (res.b_infected) transitioned[j] = 1;
        }
    }
}

}  // namespace normgraph

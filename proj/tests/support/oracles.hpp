#pragma once

// Independent test oracles: brute-force counterparts of the library's
// algorithms, written directly from the definitions so they share no code
// with the implementations they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "normgraph/core/vec2.hpp"
#include "normgraph/search/quadtree.hpp"

namespace oracles {

// DTW by exhaustive enumeration of all monotone warping paths from (0,0) to
// (n-1, m-1) with steps (+1,0), (0,+1), (+1,+1).
template <class T, class Ground>
double dtw_bruteforce(const std::vector<T>& a, const std::vector<T>& b, Ground ground) {
    const size_t n = a.size(), m = b.size();
    double best = std::numeric_limits<double>::infinity();
    struct Frame {
        size_t i, j;
        double cost;
    };
    std::vector<Frame> stack{{0, 0, ground(a[0], b[0])}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.i == n - 1 && f.j == m - 1) {
            best = std::min(best, f.cost);
            continue;
        }
        if (f.i + 1 < n) stack.push_back({f.i + 1, f.j, f.cost + ground(a[f.i + 1], b[f.j])});
        if (f.j + 1 < m) stack.push_back({f.i, f.j + 1, f.cost + ground(a[f.i], b[f.j + 1])});
        if (f.i + 1 < n && f.j + 1 < m)
            stack.push_back({f.i + 1, f.j + 1, f.cost + ground(a[f.i + 1], b[f.j + 1])});
    }
    return best;
}

inline double dtw_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
    return dtw_bruteforce(a, b, [](double x, double y) { return std::abs(x - y); });
}

// Leaf membership re-derived from cell coordinates alone: half-open cells,
// closed at the root's east/north boundary.
inline bool point_in_leaf(const normgraph::Cell& leaf, const normgraph::Cell& root,
                          const normgraph::Vec2& p) {
    const double rx1 = root.x0 + root.side, ry1 = root.y0 + root.side;
    const double lx1 = leaf.x0 + leaf.side, ly1 = leaf.y0 + leaf.side;
    const bool x_ok = p.x >= leaf.x0 && (p.x < lx1 || (lx1 == rx1 && p.x <= rx1));
    const bool y_ok = p.y >= leaf.y0 && (p.y < ly1 || (ly1 == ry1 && p.y <= ry1));
    return x_ok && y_ok;
}

struct QuadtreeCheck {
    bool tiling_ok = true;         // every probe point lies in exactly one leaf
    bool stop_conditions_ok = true;
    int violations = 0;
};

// Independent verification of a built quadtree against the stated stop rules:
// (a) empty leaf, (b) singleton whose nearest other agent is farther than
// r_int, (c) >= 2 agents all pairwise within r_int, or the max_depth guard.
inline QuadtreeCheck verify_quadtree(const normgraph::QuadtreeNode& tree,
                                     const std::vector<normgraph::Vec2>& positions, double r_int,
                                     int max_depth, const std::vector<normgraph::Vec2>& probes) {
    using normgraph::QuadtreeNode;
    std::vector<const QuadtreeNode*> leaves;
    normgraph::collect_leaves(tree, leaves);

    QuadtreeCheck out;
    for (const auto& p : probes) {
        int hits = 0;
        for (const auto* l : leaves) hits += point_in_leaf(l->cell, tree.cell, p);
        if (hits != 1) {
            out.tiling_ok = false;
            ++out.violations;
        }
    }

    const double r2 = r_int * r_int;
    for (const auto* l : leaves) {
        // recompute membership from scratch
        std::vector<int> members;
        for (size_t i = 0; i < positions.size(); ++i)
            if (point_in_leaf(l->cell, tree.cell, positions[i])) members.push_back((int)i);
        bool ok = false;
        if (members.empty()) {
            ok = true;
        } else if (members.size() == 1) {
            double nearest = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < positions.size(); ++j)
                if ((int)j != members[0])
                    nearest = std::min(nearest, normgraph::dist2(positions[members[0]], positions[j]));
            ok = nearest > r2;
        } else {
            ok = true;
            for (size_t i = 0; i < members.size() && ok; ++i)
                for (size_t j = i + 1; j < members.size() && ok; ++j)
                    if (normgraph::dist2(positions[members[i]], positions[members[j]]) > r2)
                        ok = false;
        }
        if (!ok && l->depth >= max_depth) ok = true;  // hard safeguard is a legal stop
        if (!ok) {
            out.stop_conditions_ok = false;
            ++out.violations;
        }
    }
    return out;
}

// Majority recount for the average quadtree: walks every quadrant path of the
// output and recounts internal votes across the input trees.
inline bool recount_average(const normgraph::QuadtreeNode& avg,
                            const std::vector<normgraph::QuadtreeNode>& trees, double theta_split) {
    struct Walker {
        double theta;
        size_t n_total;
        bool ok = true;
        void go(const normgraph::QuadtreeNode& out,
                std::vector<const normgraph::QuadtreeNode*> present) {
            int votes = 0;
            for (const auto* t : present) votes += !t->is_leaf();
            const bool should_split =
                votes > 0 && static_cast<double>(votes) + 1e-12 >= theta * (double)n_total;
            if (should_split != !out.is_leaf()) {
                ok = false;
                return;
            }
            if (out.is_leaf()) return;
            for (int k = 0; k < 4 && ok; ++k) {
                std::vector<const normgraph::QuadtreeNode*> next;
                for (const auto* t : present)
                    if (!t->is_leaf()) next.push_back(&t->children[k]);
                go(out.children[k], next);
            }
        }
    };
    Walker w{theta_split, trees.size()};
    std::vector<const normgraph::QuadtreeNode*> present;
    for (const auto& t : trees) present.push_back(&t);
    w.go(avg, present);
    return w.ok;
}

}  // namespace oracles

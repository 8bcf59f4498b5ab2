#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "normgraph/core/vec2.hpp"
#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/graph.hpp"

namespace normgraph {

struct Cell {
    double x0 = 0.0, y0 = 0.0, side = 1.0;

    Vec2 center() const { return {x0 + side / 2.0, y0 + side / 2.0}; }
    bool operator==(const Cell&) const = default;
};

// Children are empty or exactly four, in NW, NE, SW, SE order; they tile the
// parent cell exactly.
struct QuadtreeNode {
    Cell cell;
    int depth = 0;
    std::vector<int> agent_ids;        // agents whose position falls in this cell
    std::vector<QuadtreeNode> children;

    bool is_leaf() const { return children.empty(); }
};

namespace detail {

inline std::array<Cell, 4> child_cells(const Cell& c) {
    const double h = c.side / 2.0;
    return {Cell{c.x0, c.y0 + h, h},      // NW
            Cell{c.x0 + h, c.y0 + h, h},  // NE
            Cell{c.x0, c.y0, h},          // SW
            Cell{c.x0 + h, c.y0, h}};     // SE
}

inline int child_index(const Cell& c, const Vec2& p) {
    const double xm = c.x0 + c.side / 2.0, ym = c.y0 + c.side / 2.0;
    const bool east = p.x >= xm, north = p.y >= ym;
    if (north) return east ? 1 : 0;
    return east ? 3 : 2;
}

inline bool all_pairwise_within(const std::vector<Vec2>& pos, const std::vector<int>& ids,
                                double r_int) {
    const double r2 = r_int * r_int;
    for (size_t i = 0; i < ids.size(); ++i)
        for (size_t j = i + 1; j < ids.size(); ++j)
            if (dist2(pos[ids[i]], pos[ids[j]]) > r2) return false;
    return true;
}

// For a singleton cell: distance to the nearest agent outside the cell (which
// is every other agent).
inline double nearest_other_dist2(const std::vector<Vec2>& pos, int id) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < pos.size(); ++j)
        if (static_cast<int>(j) != id) best = std::min(best, dist2(pos[id], pos[j]));
    return best;
}

inline void build_rec(QuadtreeNode& node, const std::vector<Vec2>& pos, double r_int,
                      int max_depth) {
    const size_t n = node.agent_ids.size();
    if (n == 0) return;
    if (n == 1) {
        // stop only when the lone agent cannot interact with anyone outside
        if (nearest_other_dist2(pos, node.agent_ids[0]) > r_int * r_int) return;
    } else if (all_pairwise_within(pos, node.agent_ids, r_int)) {
        return;
    }
    if (node.depth >= max_depth) return;

    const auto cells = child_cells(node.cell);
    node.children.resize(4);
    for (int k = 0; k < 4; ++k) {
        node.children[k].cell = cells[k];
        node.children[k].depth = node.depth + 1;
    }
    for (int id : node.agent_ids)
        node.children[child_index(node.cell, pos[id])].agent_ids.push_back(id);
    for (auto& ch : node.children) build_rec(ch, pos, r_int, max_depth);
}

}  // namespace detail

// Subdivides the root cell until each leaf is empty, holds a single agent
// whose nearest agent anywhere else is farther than r_int, or holds agents
// that are all pairwise within r_int; max_depth is a hard safeguard.
inline QuadtreeNode build_quadtree(const std::vector<Vec2>& positions, double r_int, int max_depth,
                                   const Cell& root_cell) {
    for (const auto& p : positions)
        if (p.x < root_cell.x0 || p.x > root_cell.x0 + root_cell.side || p.y < root_cell.y0 ||
            p.y > root_cell.y0 + root_cell.side)
            throw std::invalid_argument("build_quadtree: position outside the root cell");
    QuadtreeNode root;
    root.cell = root_cell;
    root.agent_ids.resize(positions.size());
    for (size_t i = 0; i < positions.size(); ++i) root.agent_ids[i] = static_cast<int>(i);
    detail::build_rec(root, positions, r_int, max_depth);
    return root;
}

// Root cell = squared bounding box of the positions, centered, padded so that
// rounding can never push an extreme point outside the cell.
inline Cell bounding_cell(const std::vector<Vec2>& positions) {
    if (positions.empty()) return {0.0, 0.0, 1.0};
    BBox bb{positions[0], positions[0]};
    for (const auto& p : positions) bb.expand(p);
    const double cx = (bb.lo.x + bb.hi.x) / 2.0, cy = (bb.lo.y + bb.hi.y) / 2.0;
    double side = std::max(bb.width(), bb.height());
    side += 2e-9 * std::max({std::abs(cx), std::abs(cy), side, 1.0});
    return {cx - side / 2.0, cy - side / 2.0, side};
}

inline QuadtreeNode build_quadtree(const std::vector<Vec2>& positions, double r_int,
                                   int max_depth = 12) {
    return build_quadtree(positions, r_int, max_depth, bounding_cell(positions));
}

// Majority-vote structural average: a quadrant path is internal in the output
// iff it is internal in at least theta_split of the input trees. All trees
// must share the root cell.
inline QuadtreeNode average_quadtrees(const std::vector<QuadtreeNode>& trees,
                                      double theta_split = 0.5) {
    if (trees.empty()) throw std::invalid_argument("average_quadtrees: no trees");
    for (const auto& t : trees)
        if (!(t.cell == trees[0].cell))
            throw std::invalid_argument("average_quadtrees: trees must share the root cell");
    const double n_total = static_cast<double>(trees.size());

    struct Rec {
        static void go(QuadtreeNode& out, const std::vector<const QuadtreeNode*>& present,
                       double theta_split, double n_total) {
            int votes = 0;
            for (const auto* t : present) votes += !t->is_leaf();
            if (votes == 0 || static_cast<double>(votes) + 1e-12 < theta_split * n_total) return;
            const auto cells = detail::child_cells(out.cell);
            out.children.resize(4);
            for (int k = 0; k < 4; ++k) {
                out.children[k].cell = cells[k];
                out.children[k].depth = out.depth + 1;
                std::vector<const QuadtreeNode*> child_present;
                for (const auto* t : present)
                    if (!t->is_leaf()) child_present.push_back(&t->children[k]);
                go(out.children[k], child_present, theta_split, n_total);
            }
        }
    };

    QuadtreeNode out;
    out.cell = trees[0].cell;
    std::vector<const QuadtreeNode*> present;
    present.reserve(trees.size());
    for (const auto& t : trees) present.push_back(&t);
    Rec::go(out, present, theta_split, n_total);
    return out;
}

inline void collect_leaves(const QuadtreeNode& node, std::vector<const QuadtreeNode*>& out) {
    if (node.is_leaf()) {
        out.push_back(&node);
        return;
    }
    for (const auto& ch : node.children) collect_leaves(ch, out);
}

// Leaves become nodes at their cell centers. Leaf siblings (common direct
// parent) form a clique; with adjacency_augment, geometrically side-adjacent
// leaf cells are connected as well, since the sibling rule alone can leave the
// graph disconnected.
inline SpatialGraph quadtree_to_graph(const QuadtreeNode& tree, bool adjacency_augment = true) {
    std::vector<const QuadtreeNode*> leaves;
    collect_leaves(tree, leaves);
    std::map<const QuadtreeNode*, int> leaf_id;
    std::vector<Vec2> nodes;
    nodes.reserve(leaves.size());
    for (const auto* l : leaves) {
        leaf_id[l] = static_cast<int>(nodes.size());
        nodes.push_back(l->cell.center());
    }

    std::set<std::pair<int, int>> edges;
    auto add_edge = [&](int u, int v) {
        if (u == v) return;
        if (u > v) std::swap(u, v);
        edges.insert({u, v});
    };

    struct Walk {
        static void go(const QuadtreeNode& node, const std::map<const QuadtreeNode*, int>& ids,
                       const std::function<void(int, int)>& add) {
            if (node.is_leaf()) return;
            std::vector<int> leaf_children;
            for (const auto& ch : node.children) {
                if (ch.is_leaf())
                    leaf_children.push_back(ids.at(&ch));
                else
                    go(ch, ids, add);
            }
            for (size_t i = 0; i < leaf_children.size(); ++i)
                for (size_t j = i + 1; j < leaf_children.size(); ++j)
                    add(leaf_children[i], leaf_children[j]);
        }
    };
    std::function<void(int, int)> add_fn = add_edge;
    Walk::go(tree, leaf_id, add_fn);

    if (adjacency_augment) {
        const double eps = tree.cell.side * 1e-12;
        auto overlap = [&](double a0, double a1, double b0, double b1) {
            return std::min(a1, b1) - std::max(a0, b0) > eps;
        };
        for (size_t i = 0; i < leaves.size(); ++i)
            for (size_t j = i + 1; j < leaves.size(); ++j) {
                const Cell& a = leaves[i]->cell;
                const Cell& b = leaves[j]->cell;
                const bool v_touch = std::abs(a.x0 + a.side - b.x0) <= eps ||
                                     std::abs(b.x0 + b.side - a.x0) <= eps;
                const bool h_touch = std::abs(a.y0 + a.side - b.y0) <= eps ||
                                     std::abs(b.y0 + b.side - a.y0) <= eps;
                if ((v_touch && overlap(a.y0, a.y0 + a.side, b.y0, b.y0 + b.side)) ||
                    (h_touch && overlap(a.x0, a.x0 + a.side, b.x0, b.x0 + b.side)))
                    add_edge(static_cast<int>(i), static_cast<int>(j));
            }
    }

    return SpatialGraph::make(std::move(nodes),
                              std::vector<std::pair<int, int>>(edges.begin(), edges.end()));
}

struct QuadtreeSearchParams {
    double theta_split = 0.5;
    int max_depth = 12;
    bool adjacency_augment = true;
    int stride_t = 5;  // per-timestep trees are built every stride_t steps
};

// Average-quadtree graph search: one tree per sampled timestep over a shared
// root cell, majority-averaged, then converted to a graph.
inline SpatialGraph quadtree_search(const PositionLog& log, double r_int,
                                    const QuadtreeSearchParams& qp = {}) {
    if (log.graph_mode() || log.positions.empty())
        throw std::invalid_argument("quadtree_search: needs a non-empty norm-mode log");
    std::vector<Vec2> all;
    for (const auto& row : log.positions) all.insert(all.end(), row.begin(), row.end());
    const Cell root = bounding_cell(all);

    std::vector<QuadtreeNode> trees;
    const int stride = std::max(1, qp.stride_t);
    for (size_t t = 0; t < log.positions.size(); t += stride)
        trees.push_back(build_quadtree(log.positions[t], r_int, qp.max_depth, root));
    const QuadtreeNode avg = average_quadtrees(trees, qp.theta_split);
    return quadtree_to_graph(avg, qp.adjacency_augment);
}

}  // namespace normgraph

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "normgraph/core/vec2.hpp"
#include "normgraph/epi/model.hpp"

namespace normgraph {

// Per-step compartment counts; rows always sum to N (death is a compartment,
// agents are never removed).
struct Trajectory {
    Model model = Model::sir;
    int64_t N = 0;
    std::vector<std::vector<int64_t>> counts;  // (T+1) x n_compartments

    int steps() const { return static_cast<int>(counts.size()) - 1; }
};

// Position history of a run: continuous positions (norm mode) or node ids
// (graph mode); exactly one of the two containers is populated.
struct PositionLog {
    std::vector<std::vector<Vec2>> positions;  // [t][agent]
    std::vector<std::vector<int>> node_ids;    // [t][agent]

    bool graph_mode() const { return positions.empty() && !node_ids.empty(); }
    size_t rows() const { return graph_mode() ? node_ids.size() : positions.size(); }
    size_t n_agents() const {
        if (graph_mode()) return node_ids.empty() ? 0 : node_ids[0].size();
        return positions.empty() ? 0 : positions[0].size();
    }
};

// Per-agent epidemiological observation at each recorded step; the inputs the
// walk fitters need alongside the position log. comp carries the raw
// compartment for audits; the fitters only read macro and theta_frac.
struct EpiObs {
    MacroClass macro = MacroClass::susceptible;
    float theta_frac = 0.0f;
    uint8_t comp = 0;
};

struct EpiLog {
    std::vector<std::vector<EpiObs>> obs;  // [t][agent]
};

// Time-averaged total-variation overlap of compartment histograms in [0,1];
// 1 iff the counts match at every step.
inline double agreement(const Trajectory& a, const Trajectory& b) {
    if (a.model != b.model || a.N != b.N || a.counts.size() != b.counts.size())
        throw std::invalid_argument("agreement: trajectory shape mismatch");
    if (a.counts.empty()) throw std::invalid_argument("agreement: empty trajectory");
    double total = 0.0;
    for (size_t t = 0; t < a.counts.size(); ++t) {
        if (a.counts[t].size() != b.counts[t].size())
            throw std::invalid_argument("agreement: compartment count mismatch");
        int64_t l1 = 0;
        for (size_t c = 0; c < a.counts[t].size(); ++c)
            l1 += std::llabs(a.counts[t][c] - b.counts[t][c]);
        total += 1.0 - static_cast<double>(l1) / (2.0 * static_cast<double>(a.N));
    }
    return total / static_cast<double>(a.counts.size());
}

}  // namespace normgraph

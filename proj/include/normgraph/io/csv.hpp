#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "normgraph/sim/trajectory.hpp"
#include "normgraph/space/continuous.hpp"
#include "normgraph/space/graph.hpp"

namespace normgraph {

// Shortest representation that parses back to the identical double.
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("bad numeric field: '" + s + "'");
    }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                                      bool skip_header = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

// --- trajectory: header (t, compartment names) -------------------------------

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t";
    for (const auto& name : compartment_names(traj.model)) out << "," << name;
    out << "\n";
    for (size_t t = 0; t < traj.counts.size(); ++t) {
        out << t;
        for (int64_t c : traj.counts[t]) out << "," << c;
        out << "\n";
    }
}

inline Trajectory read_trajectory_csv(const std::string& path, Model model) {
    Trajectory traj;
    traj.model = model;
    for (const auto& row : read_csv(path)) {
        if (static_cast<int>(row.size()) != 1 + n_compartments(model))
            throw std::runtime_error("trajectory CSV column mismatch in " + path);
        std::vector<int64_t> counts;
        for (size_t i = 1; i < row.size(); ++i) counts.push_back(std::stoll(row[i]));
        traj.counts.push_back(std::move(counts));
    }
    if (traj.counts.empty()) throw std::runtime_error("empty trajectory CSV " + path);
    traj.N = 0;
    for (int64_t c : traj.counts[0]) traj.N += c;
    return traj;
}

// --- position log: (t, agent_id, x, y) or (t, agent_id, node) ----------------

inline void write_position_log_csv(const std::string& path, const PositionLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (log.graph_mode()) {
        out << "t,agent_id,node\n";
        for (size_t t = 0; t < log.node_ids.size(); ++t)
            for (size_t i = 0; i < log.node_ids[t].size(); ++i)
                out << t << "," << i << "," << log.node_ids[t][i] << "\n";
    } else {
        out << "t,agent_id,x,y\n";
        for (size_t t = 0; t < log.positions.size(); ++t)
            for (size_t i = 0; i < log.positions[t].size(); ++i)
                out << t << "," << i << "," << fmt_double(log.positions[t][i].x) << ","
                    << fmt_double(log.positions[t][i].y) << "\n";
    }
}

inline PositionLog read_position_log_csv(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.empty()) throw std::runtime_error("empty position log " + path);
    const bool graph_mode = rows[0].size() == 3;
    PositionLog log;
    for (const auto& row : rows) {
        if (row.size() != (graph_mode ? 3u : 4u))
            throw std::runtime_error("position CSV column mismatch in " + path);
        const size_t t = std::stoul(row[0]);
        const size_t id = std::stoul(row[1]);
        if (graph_mode) {
            if (log.node_ids.size() <= t) log.node_ids.resize(t + 1);
            if (log.node_ids[t].size() <= id) log.node_ids[t].resize(id + 1, 0);
            log.node_ids[t][id] = std::stoi(row[2]);
        } else {
            if (log.positions.size() <= t) log.positions.resize(t + 1);
            if (log.positions[t].size() <= id) log.positions[t].resize(id + 1);
            log.positions[t][id] = {parse_double(row[2]), parse_double(row[3])};
        }
    }
    return log;
}

// --- per-agent epidemiological observations ----------------------------------

inline void write_epi_log_csv(const std::string& path, const EpiLog& epi) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,agent_id,macro,theta_frac\n";
    for (size_t t = 0; t < epi.obs.size(); ++t)
        for (size_t i = 0; i < epi.obs[t].size(); ++i)
            out << t << "," << i << "," << static_cast<int>(epi.obs[t][i].macro) << ","
                << fmt_double(epi.obs[t][i].theta_frac) << "\n";
}

inline EpiLog read_epi_log_csv(const std::string& path) {
    EpiLog epi;
    for (const auto& row : read_csv(path)) {
        if (row.size() != 4) throw std::runtime_error("epi CSV column mismatch in " + path);
        const size_t t = std::stoul(row[0]);
        const size_t id = std::stoul(row[1]);
        if (epi.obs.size() <= t) epi.obs.resize(t + 1);
        if (epi.obs[t].size() <= id) epi.obs[t].resize(id + 1);
        epi.obs[t][id] = {static_cast<MacroClass>(std::stoi(row[2])),
                          static_cast<float>(parse_double(row[3]))};
    }
    return epi;
}

// --- graph: nodes (id, x, y); edges (src, dst) with src < dst -----------------

inline void write_graph_csv(const std::string& nodes_path, const std::string& edges_path,
                            const SpatialGraph& g) {
    std::ofstream nodes(nodes_path);
    if (!nodes) throw std::runtime_error("cannot write " + nodes_path);
    nodes << "id,x,y\n";
    for (int i = 0; i < g.size(); ++i)
        nodes << i << "," << fmt_double(g.nodes[i].x) << "," << fmt_double(g.nodes[i].y) << "\n";
    std::ofstream edges(edges_path);
    if (!edges) throw std::runtime_error("cannot write " + edges_path);
    edges << "src,dst\n";
    for (const auto& [u, v] : g.edges) edges << u << "," << v << "\n";
}

inline SpatialGraph read_graph_csv(const std::string& nodes_path, const std::string& edges_path) {
    std::vector<Vec2> nodes;
    for (const auto& row : read_csv(nodes_path)) {
        if (row.size() != 3) throw std::runtime_error("node CSV column mismatch in " + nodes_path);
        const size_t id = std::stoul(row[0]);
        if (nodes.size() <= id) nodes.resize(id + 1);
        nodes[id] = {parse_double(row[1]), parse_double(row[2])};
    }
    std::vector<std::pair<int, int>> edges;
    for (const auto& row : read_csv(edges_path)) {
        if (row.size() != 2) throw std::runtime_error("edge CSV column mismatch in " + edges_path);
        edges.emplace_back(std::stoi(row[0]), std::stoi(row[1]));
    }
    return SpatialGraph::make(std::move(nodes), std::move(edges));
}

// --- results: (method, metric, mean, std, n) ----------------------------------

struct ResultRow {
    std::string method;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    int n = 0;
};

inline void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,metric,mean,std,n\n";
    for (const auto& r : rows)
        out << r.method << "," << r.metric << "," << fmt_double(r.mean) << ","
            << fmt_double(r.stddev) << "," << r.n << "\n";
}

inline std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::vector<ResultRow> rows;
    for (const auto& row : read_csv(path)) {
        if (row.size() != 5) throw std::runtime_error("results CSV column mismatch in " + path);
        rows.push_back(
            {row[0], row[1], parse_double(row[2]), parse_double(row[3]), std::stoi(row[4])});
    }
    return rows;
}

}  // namespace normgraph

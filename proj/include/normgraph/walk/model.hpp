#pragma once

#include <fstream>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "normgraph/walk/mac.hpp"
#include "normgraph/walk/mc.hpp"

namespace normgraph {

using WalkModel = std::variant<MCWalkModel, MACWalkModel>;

inline int walk_model_sample(const WalkModel& model, const WalkContext& ctx, Rng& rng) {
    return std::visit([&](const auto& m) { return m.sample_next(ctx, rng); }, model);
}

// Adapter with the sample_next interface the engine templates expect.
struct WalkModelRef {
    const WalkModel* model;
    int sample_next(const WalkContext& ctx, Rng& rng) const {
        return walk_model_sample(*model, ctx, rng);
    }
};

inline nlohmann::json walk_model_to_json(const WalkModel& model) {
    nlohmann::json j;
    if (std::holds_alternative<MCWalkModel>(model)) {
        const auto& m = std::get<MCWalkModel>(model);
        j["type"] = "mc";
        j["neighbors"] = m.neighbors;
        j["bin_bounds"] = m.bin_bounds;
        j["alpha_s"] = m.alpha_s;
        j["full"] = m.full;
        j["by_class"] = m.by_class;
        j["by_node"] = m.by_node;
    } else {
        const auto& m = std::get<MACWalkModel>(model);
        j["type"] = "mac";
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& nm : m.per_node)
            nodes.push_back({{"neighbors", nm.neighbors}, {"weights", nm.W}});
        j["nodes"] = std::move(nodes);
    }
    return j;
}

inline WalkModel walk_model_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "mc") {
        MCWalkModel m;
        m.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
        m.bin_bounds = j.at("bin_bounds").get<std::vector<double>>();
        m.alpha_s = j.at("alpha_s").get<double>();
        m.full = j.at("full").get<std::map<std::string, std::vector<double>>>();
        m.by_class = j.at("by_class").get<std::map<std::string, std::vector<double>>>();
        m.by_node = j.at("by_node").get<std::map<std::string, std::vector<double>>>();
        return m;
    }
    if (type == "mac") {
        MACWalkModel m;
        for (const auto& jn : j.at("nodes")) {
            MacNodeModel nm;
            nm.neighbors = jn.at("neighbors").get<std::vector<int>>();
            nm.W = jn.at("weights").get<std::vector<double>>();
            m.per_node.push_back(std::move(nm));
        }
        return m;
    }
    throw std::invalid_argument("walk_model_from_json: unknown type " + type);
}

inline void save_walk_model(const std::string& path, const WalkModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << walk_model_to_json(model).dump(1) << "\n";
}

inline WalkModel load_walk_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return walk_model_from_json(j);
}

}  // namespace normgraph

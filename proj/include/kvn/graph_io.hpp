#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kvn/errors.hpp"
#include "kvn/graph.hpp"

namespace kvn {

/// Accepted schema:
///   { "vertices": ["a", "b"], "edges": [ {"tail": "a", "head": "b", "weight": 1.0} ] }
/// "weight" is optional (default 1.0); unknown keys are rejected so that typos
/// cannot silently change a computation.
inline WeightedOrientedGraph parse_graph_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("graph document must be a JSON object");
    for (const auto& item : j.items()) {
        if (item.key() != "vertices" && item.key() != "edges")
            throw ParseError("unknown key in graph document: " + item.key());
    }
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw ParseError("graph document needs a \"vertices\" array");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw ParseError("graph document needs an \"edges\" array");

    std::vector<std::string> names;
    std::map<std::string, std::size_t> index;
    for (const auto& v : j["vertices"]) {
        if (!v.is_string()) throw ParseError("vertex names must be strings");
        const std::string name = v.get<std::string>();
        if (index.count(name)) throw ValidationError("duplicate vertex name: " + name);
        index[name] = names.size();
        names.push_back(name);
    }

    std::vector<Edge> edges;
    for (const auto& e : j["edges"]) {
        if (!e.is_object()) throw ParseError("each edge must be a JSON object");
        for (const auto& item : e.items()) {
            if (item.key() != "tail" && item.key() != "head" && item.key() != "weight")
                throw ParseError("unknown key in edge object: " + item.key());
        }
        if (!e.contains("tail") || !e["tail"].is_string() || !e.contains("head") ||
            !e["head"].is_string())
            throw ParseError("edge needs string \"tail\" and \"head\"");
        const std::string tail = e["tail"].get<std::string>();
        const std::string head = e["head"].get<std::string>();
        if (!index.count(tail)) throw ValidationError("edge references unknown vertex: " + tail);
        if (!index.count(head)) throw ValidationError("edge references unknown vertex: " + head);
        double w = 1.0;
        if (e.contains("weight")) {
            if (!e["weight"].is_number()) throw ParseError("edge weight must be a number");
            w = e["weight"].get<double>();
        }
        edges.push_back({index[tail], index[head], w});
    }
    return WeightedOrientedGraph(std::move(names), std::move(edges));
}

inline WeightedOrientedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return parse_graph_json(j);
}

}  // namespace kvn

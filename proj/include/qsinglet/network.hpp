#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsinglet/errors.hpp"
#include "qsinglet/rng.hpp"

namespace qsinglet {

struct Edge {
    int i = 0;  // 1-based vertices, i < j after normalization
    int j = 0;
    double coupling = 0.0;  // J_ij > 0 (antiferromagnetic)
};

// A network of qudits: vertices carry d-level systems, edges carry exchange
// couplings. Construction helpers normalize edges to i < j and sorted order.
struct QuditNetwork {
    int num_vertices = 0;
    std::vector<Edge> edges;

    double coupling_sum() const {
        double sum = 0.0;
        for (const Edge& e : edges) sum += e.coupling;
        return sum;
    }
};

inline void normalize_edges(QuditNetwork& net) {
    for (Edge& e : net.edges) {
        if (e.i < 1 || e.i > net.num_vertices || e.j < 1 || e.j > net.num_vertices)
            throw ValidationError("edge vertex out of range");
        if (e.i == e.j) throw ValidationError("self-loop edge not allowed");
        if (e.coupling <= 0.0) throw ValidationError("antiferromagnetic required: coupling must be > 0");
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t k = 1; k < net.edges.size(); ++k)
        if (net.edges[k].i == net.edges[k - 1].i && net.edges[k].j == net.edges[k - 1].j)
            throw ValidationError("duplicate edge (" + std::to_string(net.edges[k].i) + "," +
                                  std::to_string(net.edges[k].j) + ")");
}

// File schema: {"num_qudits": N, "edges": [[i, j, J], ...]}, 1-based vertices.
inline QuditNetwork parse_network(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("network JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("num_qudits") || !doc.contains("edges"))
        throw ValidationError("network JSON must contain num_qudits and edges");
    for (const auto& item : doc.items())
        if (item.key() != "num_qudits" && item.key() != "edges")
            throw ValidationError("unknown network key: " + item.key());
    QuditNetwork net;
    if (!doc["num_qudits"].is_number_integer() || doc["num_qudits"].get<int>() < 1)
        throw ValidationError("num_qudits must be a positive integer");
    net.num_vertices = doc["num_qudits"].get<int>();
    if (!doc["edges"].is_array()) throw ValidationError("edges must be an array");
    for (const auto& item : doc["edges"]) {
        if (!item.is_array() || item.size() != 3)
            throw ValidationError("each edge must be [i, j, J]");
        Edge e;
        e.i = item[0].get<int>();
        e.j = item[1].get<int>();
        e.coupling = item[2].get<double>();
        net.edges.push_back(e);
    }
    normalize_edges(net);
    return net;
}

inline std::string serialize_network(const QuditNetwork& net) {
    nlohmann::json doc;
    doc["num_qudits"] = net.num_vertices;
    doc["edges"] = nlohmann::json::array();
    for (const Edge& e : net.edges) doc["edges"].push_back({e.i, e.j, e.coupling});
    return doc.dump();
}

inline bool is_connected(const QuditNetwork& net) {
    if (net.num_vertices <= 1) return true;
    std::vector<std::vector<int>> adjacency(net.num_vertices + 1);
    for (const Edge& e : net.edges) {
        adjacency[e.i].push_back(e.j);
        adjacency[e.j].push_back(e.i);
    }
    std::vector<bool> seen(net.num_vertices + 1, false);
    std::queue<int> frontier;
    frontier.push(1);
    seen[1] = true;
    int reached = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : adjacency[v])
            if (!seen[w]) {
                seen[w] = true;
                ++reached;
                frontier.push(w);
            }
    }
    return reached == net.num_vertices;
}

enum class Topology { chain, ring, star, complete, random_connected };

inline Topology topology_from_name(const std::string& name) {
    if (name == "chain") return Topology::chain;
    if (name == "ring") return Topology::ring;
    if (name == "star") return Topology::star;
    if (name == "complete") return Topology::complete;
    if (name == "random_connected" || name == "random") return Topology::random_connected;
    throw ValidationError("unknown topology: " + name);
}

inline std::string topology_name(Topology kind) {
    switch (kind) {
        case Topology::chain: return "chain";
        case Topology::ring: return "ring";
        case Topology::star: return "star";
        case Topology::complete: return "complete";
        case Topology::random_connected: return "random_connected";
    }
    return "?";
}

// Standard topologies with a uniform coupling. `random_connected` draws a
// uniform labeled spanning tree (random Pruefer sequence) and then adds each
// remaining pair with probability 1/2, so connectivity never needs rejection.
inline QuditNetwork make_topology(Topology kind, int num_vertices, double coupling,
                                  std::uint64_t seed = 0) {
    const int min_vertices = (kind == Topology::ring) ? 3 : 2;
    if (num_vertices < min_vertices)
        throw DomainError("topology " + topology_name(kind) + " requires at least " +
                          std::to_string(min_vertices) + " vertices");
    if (coupling <= 0.0) throw DomainError("coupling must be positive");
    QuditNetwork net;
    net.num_vertices = num_vertices;
    auto add = [&](int i, int j) { net.edges.push_back({i, j, coupling}); };
    switch (kind) {
        case Topology::chain:
            for (int v = 1; v < num_vertices; ++v) add(v, v + 1);
            break;
        case Topology::ring:
            for (int v = 1; v < num_vertices; ++v) add(v, v + 1);
            add(1, num_vertices);
            break;
        case Topology::star:
            for (int v = 2; v <= num_vertices; ++v) add(1, v);
            break;
        case Topology::complete:
            for (int i = 1; i < num_vertices; ++i)
                for (int j = i + 1; j <= num_vertices; ++j) add(i, j);
            break;
        case Topology::random_connected: {
            Rng rng(seed);
            std::vector<bool> in_tree(static_cast<std::size_t>(num_vertices) *
                                          (num_vertices + 1) / 2, false);
            auto pair_slot = [&](int i, int j) {
                if (i > j) std::swap(i, j);
                return static_cast<std::size_t>(i - 1) * num_vertices -
                       static_cast<std::size_t>(i - 1) * i / 2 + (j - i - 1);
            };
            if (num_vertices == 2) {
                add(1, 2);
                in_tree[pair_slot(1, 2)] = true;
            } else {
                std::vector<int> pruefer(num_vertices - 2);
                for (int& p : pruefer) p = 1 + static_cast<int>(rng.below(num_vertices));
                std::vector<int> degree(num_vertices + 1, 1);
                for (int p : pruefer) ++degree[p];
                std::vector<bool> used(num_vertices + 1, false);
                for (int p : pruefer) {
                    int leaf = 0;
                    for (int v = 1; v <= num_vertices; ++v)
                        if (degree[v] == 1 && !used[v]) {
                            leaf = v;
                            break;
                        }
                    used[leaf] = true;
                    --degree[leaf];
                    --degree[p];
                    add(std::min(leaf, p), std::max(leaf, p));
                    in_tree[pair_slot(leaf, p)] = true;
                }
                int first = 0, second = 0;
                for (int v = 1; v <= num_vertices; ++v)
                    if (degree[v] == 1 && !used[v]) (first == 0 ? first : second) = v;
                add(first, second);
                in_tree[pair_slot(first, second)] = true;
            }
            for (int i = 1; i < num_vertices; ++i)
                for (int j = i + 1; j <= num_vertices; ++j)
                    if (!in_tree[pair_slot(i, j)] && rng.uniform() < 0.5) add(i, j);
            break;
        }
    }
    normalize_edges(net);
    return net;
}

// Replace every coupling with an independent draw from (low, high].
inline void assign_random_couplings(QuditNetwork& net, Rng& rng, double low = 0.0,
                                    double high = 2.0) {
    for (Edge& e : net.edges) e.coupling = high - rng.uniform() * (high - low);
}

}  // namespace qsinglet

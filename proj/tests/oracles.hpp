#pragma once

// Independent reference computations for the test suites. Nothing here may
// call into the code under test beyond its plain data types.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "remix/model.hpp"

namespace remix::oracle {

inline constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max() / 4;

/// All-pairs shortest path costs over links that are up.
inline std::map<std::string, std::map<std::string, std::uint64_t>> floyd_warshall(const Topology& topo) {
    std::vector<std::string> names;
    for (const auto& n : topo.nodes()) {
        names.push_back(n.name);
    }
    const auto n = names.size();
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
        idx[names[i]] = i;
    }
    std::vector<std::vector<std::uint64_t>> d(n, std::vector<std::uint64_t>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
    }
    for (const auto& l : topo.links()) {
        if (l.state != LinkState::up) {
            continue;
        }
        auto a = idx.at(l.endpoint_a);
        auto b = idx.at(l.endpoint_b);
        d[a][b] = std::min<std::uint64_t>(d[a][b], l.cost);
        d[b][a] = std::min<std::uint64_t>(d[b][a], l.cost);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (d[i][k] + d[k][j] < d[i][j]) {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    std::map<std::string, std::map<std::string, std::uint64_t>> out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (d[i][j] < kInf) {
                out[names[i]][names[j]] = d[i][j];
            }
        }
    }
    return out;
}

/// Component label per node by repeated edge relaxation (no union-find
/// shortcuts): each node ends up labelled with the smallest name it reaches.
inline std::map<std::string, std::string> component_labels(const Topology& topo) {
    std::map<std::string, std::string> label;
    for (const auto& n : topo.nodes()) {
        label[n.name] = n.name;
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& l : topo.links()) {
            if (l.state != LinkState::up) {
                continue;
            }
            auto& a = label[l.endpoint_a];
            auto& b = label[l.endpoint_b];
            if (a != b) {
                const auto m = std::min(a, b);
                a = m;
                b = m;
                changed = true;
            }
        }
    }
    return label;
}

inline bool same_component(const std::map<std::string, std::string>& labels, const std::string& a,
                           const std::string& b) {
    return labels.at(a) == labels.at(b);
}

/// Unordered pairs by double loop.
inline std::size_t enumerate_pairs(std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i < j) {
                ++count;
            }
        }
    }
    return count;
}

/// Unordered node pairs that share a component.
inline std::set<std::pair<std::string, std::string>> intra_component_pairs(const Topology& topo) {
    auto labels = component_labels(topo);
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [a, la] : labels) {
        for (const auto& [b, lb] : labels) {
            if (a < b && la == lb) {
                pairs.emplace(a, b);
            }
        }
    }
    return pairs;
}

/// iBGP sessions needed: each client-reflector pair plus each reflector pair.
inline std::size_t enumerate_ibgp_sessions(std::size_t nodes, std::size_t reflectors) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = i + 1; j < nodes; ++j) {
            const bool ri = i < reflectors;
            const bool rj = j < reflectors;
            if (ri || rj) {
                ++count;
            }
        }
    }
    return count;
}

/// Connected random topology: a random spanning tree plus extra edges.
/// Node names n00..; the first `reflectors` nodes (by name) are reflectors.
inline Topology random_topology(std::mt19937& rng, std::size_t nodes, std::size_t extra_edges,
                                std::uint32_t max_cost = 20, std::size_t reflectors = 1) {
    Topology topo;
    auto name = [](std::size_t i) {
        std::string s = "n";
        if (i < 10) {
            s += '0';
        }
        return s + std::to_string(i);
    };
    for (std::size_t i = 0; i < nodes; ++i) {
        topo.add_node(PeNode{name(i), Ipv4Addr(0xac100001u + static_cast<std::uint32_t>(i)), i < reflectors, false});
    }
    std::uniform_int_distribution<std::uint32_t> cost(1, max_cost);
    for (std::size_t i = 1; i < nodes; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        topo.add_link(Link{name(pick(rng)), name(i), cost(rng), kMinFabricMtu, LinkKind::radio, LinkState::up});
    }
    if (nodes >= 2) {
        std::uniform_int_distribution<std::size_t> any(0, nodes - 1);
        for (std::size_t e = 0; e < extra_edges; ++e) {
            auto a = any(rng);
            auto b = any(rng);
            if (a != b) {
                topo.add_link(Link{name(a), name(b), cost(rng), kMinFabricMtu, LinkKind::radio, LinkState::up});
            }
        }
    }
    return topo;
}

}  // namespace remix::oracle

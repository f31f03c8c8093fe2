#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "remix/model.hpp"

namespace remix {

/// One step out of a node: the neighbour reached and the link taken.
struct Hop {
    std::string node;
    LinkId link = 0;

    friend bool operator==(const Hop&, const Hop&) = default;
};

/// Shortest-path tree rooted at `source` over links that are up.
///
/// `next_hop[v]` is the first hop out of the source on the chosen path to v,
/// `parent[v]` the last one into v. Equal-cost paths are resolved in favour
/// of the lexicographically smaller first-hop neighbour, then the lower
/// parent name, then the lower LinkId. Unreachable nodes are absent.
struct SpfTree {
    std::string source;
    std::map<std::string, std::uint64_t> dist;
    std::map<std::string, Hop> next_hop;
    std::map<std::string, Hop> parent;

    bool reaches(const std::string& node) const { return dist.contains(node); }

    friend bool operator==(const SpfTree&, const SpfTree&) = default;
};

using SpfTrees = std::map<std::string, SpfTree>;

/// Throws Error(UNKNOWN_NODE) if `source` is not in the topology.
SpfTree compute_spf(const Topology& topo, const std::string& source);
SpfTrees compute_all_spf(const Topology& topo);

using Label = std::uint32_t;

inline constexpr Label kImplicitNull = 3;
inline constexpr Label kFirstUnreservedLabel = 16;

/// LDP binding of one FEC (a destination PE loopback) at one node.
/// A local binding has no out_neighbor and advertises IMPLICIT-NULL, so the
/// penultimate hop pops.
struct LabelBinding {
    std::string at_node;
    std::string fec;  // destination PE name
    Ipv4Prefix fec_prefix;
    Label in_label = 0;
    Label out_label = 0;
    std::optional<Hop> out_neighbor;

    bool is_local() const { return !out_neighbor.has_value(); }

    friend bool operator==(const LabelBinding&, const LabelBinding&) = default;
};

class LabelTable {
public:
    void add(LabelBinding binding);
    const LabelBinding* find(const std::string& node, const std::string& fec) const;
    const std::vector<LabelBinding>& bindings() const { return bindings_; }

    /// First label not yet handed out at `node`; shared with VPLS label blocks.
    Label next_free(const std::string& node) const;
    void set_next_free(const std::string& node, Label label) { next_free_[node] = label; }

private:
    std::vector<LabelBinding> bindings_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
    std::map<std::string, Label> next_free_;
};

/// Hop-by-hop label distribution following each node's own SPF tree. Every
/// node numbers its non-local FECs from 16 upwards in FEC-name order.
LabelTable allocate_labels(const Topology& topo, const SpfTrees& trees);

struct LspHop {
    std::string node;
    Label out_label = 0;
    LinkId link = 0;

    friend bool operator==(const LspHop&, const LspHop&) = default;
};

struct LspPath {
    std::string src;
    std::string dst;
    std::vector<LspHop> hops;

    std::vector<LinkId> links() const;

    friend bool operator==(const LspPath&, const LspPath&) = default;
};

/// Label-switched path from src to dst, or nullopt (NO_PATH) when dst is not
/// reachable. Throws Error(UNKNOWN_NODE) for unknown endpoints and
/// std::invalid_argument when src == dst.
std::optional<LspPath> resolve_lsp(const LabelTable& bindings, const SpfTrees& trees,
                                   const std::string& src, const std::string& dst);

}  // namespace remix

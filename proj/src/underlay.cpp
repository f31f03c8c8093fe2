#include "remix/underlay.hpp"

#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "remix/error.hpp"

namespace remix {

namespace {

struct Candidate {
    std::uint64_t dist;
    std::string first_hop;
    std::string parent;
    LinkId link;

    auto key() const { return std::tie(dist, first_hop, parent, link); }
};

}  // namespace

SpfTree compute_spf(const Topology& topo, const std::string& source) {
    if (!topo.has_node(source)) {
        throw Error(ErrorCode::UNKNOWN_NODE, source);
    }

    SpfTree tree;
    tree.source = source;

    // Best candidate per node; a node is settled when popped with a matching
    // entry. Ties on dist are ordered by first hop, so the settled entry
    // carries the smallest first hop among all shortest paths.
    std::map<std::string, Candidate> best;
    using QueueEntry = std::tuple<std::uint64_t, std::string, std::string>;  // dist, first_hop, node
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    std::set<std::string> settled;

    tree.dist[source] = 0;
    queue.emplace(0, "", source);
    best[source] = Candidate{0, "", "", 0};

    while (!queue.empty()) {
        auto [dist, first_hop, node] = queue.top();
        queue.pop();
        if (settled.contains(node)) {
            continue;
        }
        const auto& cand = best.at(node);
        if (cand.dist != dist || cand.first_hop != first_hop) {
            continue;
        }
        settled.insert(node);
        tree.dist[node] = dist;
        if (node != source) {
            tree.next_hop[node] = Hop{cand.first_hop, 0};
            tree.parent[node] = Hop{cand.parent, cand.link};
        }

        for (LinkId id = 0; id < topo.links().size(); ++id) {
            const auto& link = topo.link(id);
            if (!link.is_up() || !link.touches(node) || link.endpoint_a == link.endpoint_b) {
                continue;
            }
            const auto& next = link.other(node);
            if (settled.contains(next)) {
                continue;
            }
            Candidate c{dist + link.cost, node == source ? next : first_hop, node, id};
            auto it = best.find(next);
            if (it == best.end() || c.key() < it->second.key()) {
                best[next] = c;
                queue.emplace(c.dist, c.first_hop, next);
            }
        }
    }

    // Recover the link leaving the source from the parent chain.
    for (auto& [node, hop] : tree.next_hop) {
        std::string cur = node;
        while (tree.parent.at(cur).node != source) {
            cur = tree.parent.at(cur).node;
        }
        hop = Hop{cur, tree.parent.at(cur).link};
    }
    return tree;
}

SpfTrees compute_all_spf(const Topology& topo) {
    SpfTrees trees;
    for (const auto& name : topo.node_names()) {
        trees.emplace(name, compute_spf(topo, name));
    }
    return trees;
}

void LabelTable::add(LabelBinding binding) {
    auto key = std::make_pair(binding.at_node, binding.fec);
    if (index_.contains(key)) {
        throw std::logic_error("duplicate label binding at " + binding.at_node + " for " + binding.fec);
    }
    index_.emplace(std::move(key), bindings_.size());
    bindings_.push_back(std::move(binding));
}

const LabelBinding* LabelTable::find(const std::string& node, const std::string& fec) const {
    auto it = index_.find({node, fec});
    return it == index_.end() ? nullptr : &bindings_[it->second];
}

Label LabelTable::next_free(const std::string& node) const {
    auto it = next_free_.find(node);
    return it == next_free_.end() ? kFirstUnreservedLabel : it->second;
}

LabelTable allocate_labels(const Topology& topo, const SpfTrees& trees) {
    LabelTable table;
    // Pass 1: in-labels. Local FECs advertise IMPLICIT-NULL.
    std::map<std::pair<std::string, std::string>, Label> in_labels;
    for (const auto& [node, tree] : trees) {
        Label next = kFirstUnreservedLabel;
        for (const auto& [fec, dist] : tree.dist) {
            in_labels[{node, fec}] = fec == node ? kImplicitNull : next++;
        }
        table.set_next_free(node, next);
    }
    // Pass 2: out-labels are the downstream neighbour's in-label.
    for (const auto& [node, tree] : trees) {
        for (const auto& [fec, dist] : tree.dist) {
            const auto* dest = topo.find_node(fec);
            LabelBinding b;
            b.at_node = node;
            b.fec = fec;
            b.fec_prefix = Ipv4Prefix(dest ? dest->loopback : Ipv4Addr{}, 32);
            b.in_label = in_labels.at({node, fec});
            if (fec == node) {
                b.out_label = kImplicitNull;
            } else {
                const auto& hop = tree.next_hop.at(fec);
                b.out_label = in_labels.at({hop.node, fec});
                b.out_neighbor = hop;
            }
            table.add(std::move(b));
        }
    }
    return table;
}

std::vector<LinkId> LspPath::links() const {
    std::vector<LinkId> out;
    out.reserve(hops.size());
    for (const auto& h : hops) {
        out.push_back(h.link);
    }
    return out;
}

std::optional<LspPath> resolve_lsp(const LabelTable& bindings, const SpfTrees& trees,
                                   const std::string& src, const std::string& dst) {
    if (!trees.contains(src)) {
        throw Error(ErrorCode::UNKNOWN_NODE, src);
    }
    if (!trees.contains(dst)) {
        throw Error(ErrorCode::UNKNOWN_NODE, dst);
    }
    if (src == dst) {
        throw std::invalid_argument("resolve_lsp: src == dst");
    }

    LspPath path{src, dst, {}};
    std::string node = src;
    // Shortest paths visit each node at most once.
    for (std::size_t steps = 0; steps <= trees.size(); ++steps) {
        if (node == dst) {
            return path;
        }
        const auto* b = bindings.find(node, dst);
        if (b == nullptr || b->is_local()) {
            return std::nullopt;
        }
        path.hops.push_back({node, b->out_label, b->out_neighbor->link});
        node = b->out_neighbor->node;
    }
    return std::nullopt;
}

}  // namespace remix

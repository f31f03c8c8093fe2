#include "remix/vpls_signal.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "remix/error.hpp"

namespace remix {

std::vector<IbgpSession> build_session_graph(const Topology& topo) {
    std::vector<std::string> reflectors;
    std::vector<std::string> clients;
    for (const auto& name : topo.node_names()) {
        (topo.find_node(name)->is_route_reflector ? reflectors : clients).push_back(name);
    }
    if (reflectors.empty()) {
        if (clients.size() >= 2) {
            throw Error(ErrorCode::NO_REFLECTOR, std::to_string(clients.size()) + " nodes, no reflector");
        }
        return {};
    }

    std::vector<IbgpSession> sessions;
    for (std::size_t i = 0; i < reflectors.size(); ++i) {
        for (std::size_t j = i + 1; j < reflectors.size(); ++j) {
            sessions.push_back({reflectors[i], reflectors[j], IbgpKind::rr_to_rr});
        }
        for (const auto& c : clients) {
            sessions.push_back({reflectors[i], c, IbgpKind::rr_client});
        }
    }
    std::sort(sessions.begin(), sessions.end());
    return sessions;
}

std::vector<VplsAdvert> originate_adverts(std::span<const std::string> pes, const LabelTable& labels) {
    std::vector<std::string> sorted(pes.begin(), pes.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    const auto block_size = static_cast<std::uint32_t>(sorted.size());
    std::vector<VplsAdvert> adverts;
    adverts.reserve(sorted.size());
    std::uint32_t ve_id = 1;
    for (const auto& pe : sorted) {
        adverts.push_back({pe, ve_id++, labels.next_free(pe), 1, block_size});
    }
    return adverts;
}

std::vector<VplsAdvert> originate_adverts(std::span<const std::string> pes) {
    return originate_adverts(pes, LabelTable{});
}

ReceivedAdverts propagate(std::span<const VplsAdvert> adverts, std::span<const IbgpSession> sessions) {
    enum class Role { client, non_client };
    // Peer role as seen from each node.
    std::map<std::string, std::vector<std::pair<std::string, Role>>> peers;
    std::set<std::string> reflectors;
    for (const auto& s : sessions) {
        reflectors.insert(s.a);
        if (s.kind == IbgpKind::rr_to_rr) {
            reflectors.insert(s.b);
            peers[s.a].emplace_back(s.b, Role::non_client);
            peers[s.b].emplace_back(s.a, Role::non_client);
        } else {
            peers[s.a].emplace_back(s.b, Role::client);
            peers[s.b].emplace_back(s.a, Role::non_client);
        }
    }

    std::map<std::string, const VplsAdvert*> by_origin;
    for (const auto& a : adverts) {
        by_origin.emplace(a.origin_pe, &a);
    }

    struct Update {
        std::string from;  // empty for locally originated
        std::string to;
        std::string origin;
    };
    std::map<std::string, std::set<std::string>> known;  // node -> origins
    std::deque<Update> pending;

    auto send_all = [&](const std::string& node, const std::string& origin, const std::string& skip,
                        bool clients_only) {
        auto it = peers.find(node);
        if (it == peers.end()) {
            return;
        }
        for (const auto& [peer, role] : it->second) {
            if (peer != skip && (!clients_only || role == Role::client)) {
                pending.push_back({node, peer, origin});
            }
        }
    };

    for (const auto& a : adverts) {
        known[a.origin_pe].insert(a.origin_pe);
        send_all(a.origin_pe, a.origin_pe, "", false);
    }

    while (!pending.empty()) {
        auto u = std::move(pending.front());
        pending.pop_front();
        if (!known[u.to].insert(u.origin).second) {
            continue;
        }
        if (!reflectors.contains(u.to)) {
            continue;
        }
        // Reflection: client routes go to everyone, non-client routes only to clients.
        bool from_client = false;
        for (const auto& [peer, role] : peers[u.to]) {
            if (peer == u.from) {
                from_client = role == Role::client;
            }
        }
        send_all(u.to, u.origin, u.from, !from_client);
    }

    ReceivedAdverts received;
    for (const auto& a : adverts) {
        auto& list = received[a.origin_pe];
        for (const auto& origin : known[a.origin_pe]) {
            if (origin != a.origin_pe && by_origin.contains(origin)) {
                list.push_back(*by_origin.at(origin));
            }
        }
    }
    return received;
}

Label pseudowire_label(const VplsAdvert& receiver, std::uint32_t sender_ve_id) {
    return receiver.label_base + sender_ve_id - receiver.block_offset;
}

const Pseudowire* PseudowireMesh::find(const std::string& x, const std::string& y) const {
    const auto& lo = std::min(x, y);
    const auto& hi = std::max(x, y);
    auto it = std::lower_bound(pseudowires.begin(), pseudowires.end(), std::make_pair(lo, hi),
                               [](const Pseudowire& pw, const auto& key) {
                                   return std::tie(pw.pe_a, pw.pe_b) < std::tie(key.first, key.second);
                               });
    return it != pseudowires.end() && it->pe_a == lo && it->pe_b == hi ? &*it : nullptr;
}

namespace {

const VplsAdvert* advert_from(const ReceivedAdverts& received, const std::string& at, const std::string& origin) {
    auto it = received.find(at);
    if (it == received.end()) {
        return nullptr;
    }
    for (const auto& a : it->second) {
        if (a.origin_pe == origin) {
            return &a;
        }
    }
    return nullptr;
}

}  // namespace

PseudowireMesh derive_pseudowires(const ReceivedAdverts& received, const LabelTable& bindings,
                                  const SpfTrees& trees) {
    PseudowireMesh mesh;
    for (auto a = received.begin(); a != received.end(); ++a) {
        for (auto b = std::next(a); b != received.end(); ++b) {
            const auto* adv_b = advert_from(received, a->first, b->first);
            const auto* adv_a = advert_from(received, b->first, a->first);
            if (adv_a == nullptr || adv_b == nullptr) {
                continue;
            }
            std::optional<LspPath> ab;
            std::optional<LspPath> ba;
            if (trees.contains(a->first) && trees.contains(b->first)) {
                ab = resolve_lsp(bindings, trees, a->first, b->first);
                ba = resolve_lsp(bindings, trees, b->first, a->first);
            }
            if (!ab || !ba) {
                mesh.diagnostics.push_back({"MISSING_TRANSPORT", a->first, b->first});
                continue;
            }
            mesh.pseudowires.push_back(Pseudowire{
                a->first, b->first,
                pseudowire_label(*adv_b, adv_a->ve_id),
                pseudowire_label(*adv_a, adv_b->ve_id),
                std::move(*ab), std::move(*ba)});
        }
    }
    return mesh;
}

}  // namespace remix

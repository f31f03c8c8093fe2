#include "remix/exchange_l3.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace remix {

bool BgpRoute::has_loop() const {
    std::set<Asn> seen;
    for (auto asn : as_path) {
        if (!seen.insert(asn).second) {
            return true;
        }
    }
    return false;
}

bool BgpRoute::path_contains(Asn asn) const {
    return std::find(as_path.begin(), as_path.end(), asn) != as_path.end();
}

std::string_view to_string(SessionKind kind) {
    switch (kind) {
        case SessionKind::bilateral: return "bilateral";
        case SessionKind::route_server: return "rs";
        case SessionKind::transit: return "transit";
    }
    return "bilateral";
}

std::string_view to_string(TransitPolicy policy) {
    return policy == TransitPolicy::full_table ? "full" : "default";
}

bool RouteServer::has_client(Asn member) const {
    return std::any_of(client_sessions.begin(), client_sessions.end(),
                       [&](const PeeringSession& s) { return s.a == member; });
}

std::vector<RouteServer> make_route_servers(const Topology& topo, std::span<const PeeringSession> sessions) {
    std::vector<RouteServer> servers;
    Asn next = kFirstServiceAsn;
    for (const auto& name : topo.node_names()) {
        if (!topo.find_node(name)->hosts_route_server) {
            continue;
        }
        RouteServer rs{name, next++, {}};
        for (const auto& s : sessions) {
            if (s.kind == SessionKind::route_server && s.rs_node == name) {
                auto session = s;
                session.b = rs.service_asn;
                rs.client_sessions.push_back(session);
            }
        }
        servers.push_back(std::move(rs));
    }
    return servers;
}

RsResult rs_redistribute(const RouteServer& server, const BgpRoute& incoming, Asn from) {
    if (!server.has_client(from)) {
        throw std::invalid_argument("rs_redistribute: " + std::to_string(from) + " is not a client of " +
                                    server.host_pe);
    }
    RsResult result;
    std::set<Asn> recipients;
    for (const auto& s : server.client_sessions) {
        if (s.a != from) {
            recipients.insert(s.a);
        }
    }
    for (auto to : recipients) {
        if (incoming.path_contains(to)) {
            result.diagnostics.push_back("AS_LOOP " + incoming.prefix.str() + " to " + std::to_string(to));
            continue;
        }
        BgpRoute out = incoming;
        out.learned_from = "rs:" + server.host_pe;
        result.deliveries.push_back({to, std::move(out)});
    }
    return result;
}

const BgpRoute& best_path(std::span<const BgpRoute> candidates) {
    if (candidates.empty()) {
        throw std::invalid_argument("best_path: no candidates");
    }
    auto key = [](const BgpRoute& r) { return std::make_tuple(r.as_path.size(), r.next_hop, std::cref(r.learned_from)); };
    return *std::min_element(candidates.begin(), candidates.end(),
                             [&](const BgpRoute& x, const BgpRoute& y) { return key(x) < key(y); });
}

TransitResult transit_propagate(const MemberAs& transit, Ipv4Addr transit_ip,
                                std::span<const PeeringSession> sessions,
                                std::span<const Ipv4Prefix> external_prefixes,
                                std::span<const MemberAs> members) {
    TransitResult result;
    const std::string from = "transit:" + std::to_string(transit.asn);
    for (const auto& s : sessions) {
        if (s.kind != SessionKind::transit || s.b != transit.asn) {
            continue;
        }
        if (s.policy == TransitPolicy::default_only) {
            result.deliveries.push_back({s.a, BgpRoute{kDefaultRoute, {transit.asn}, transit_ip, from}});
        } else {
            for (const auto& p : external_prefixes) {
                if (p != kDefaultRoute) {
                    result.deliveries.push_back({s.a, BgpRoute{p, {transit.asn}, transit_ip, from}});
                }
            }
        }
        for (const auto& m : members) {
            if (m.asn == s.a) {
                for (const auto& p : m.announced_prefixes) {
                    result.upstream.push_back({p, {transit.asn, m.asn}});
                }
            }
        }
    }
    std::sort(result.upstream.begin(), result.upstream.end());
    result.upstream.erase(std::unique(result.upstream.begin(), result.upstream.end()), result.upstream.end());
    return result;
}

const BgpRoute* MemberRib::lookup(Ipv4Addr addr) const {
    const BgpRoute* best = nullptr;
    for (const auto& [prefix, route] : routes) {
        if (prefix.contains(addr) && (best == nullptr || prefix.length() > best->prefix.length())) {
            best = &route;
        }
    }
    return best;
}

const BgpRoute* MemberRib::covering(const Ipv4Prefix& target) const {
    const BgpRoute* best = nullptr;
    for (const auto& [prefix, route] : routes) {
        if (prefix.contains(target) && (best == nullptr || prefix.length() > best->prefix.length())) {
            best = &route;
        }
    }
    return best;
}

namespace {

const MemberPort* find_port(std::span<const MemberPort> ports, Asn member) {
    auto it = std::find_if(ports.begin(), ports.end(), [&](const MemberPort& p) { return p.member == member; });
    return it == ports.end() ? nullptr : &*it;
}

const MemberAs* find_member(std::span<const MemberAs> members, Asn asn) {
    auto it = std::find_if(members.begin(), members.end(), [&](const MemberAs& m) { return m.asn == asn; });
    return it == members.end() ? nullptr : &*it;
}

}  // namespace

bool session_established(const PeeringSession& session, const ExchangeView& view) {
    const auto* pa = find_port(view.ports, session.a);
    if (pa == nullptr || !pa->is_active()) {
        return false;
    }
    if (session.kind == SessionKind::route_server) {
        return view.same_component(pa->attach_pe, session.rs_node);
    }
    const auto* pb = find_port(view.ports, session.b);
    return pb != nullptr && pb->is_active() && view.same_component(pa->attach_pe, pb->attach_pe);
}

const MemberRib* RouteExchange::rib(Asn member) const {
    auto it = ribs_.find(member);
    return it == ribs_.end() ? nullptr : &it->second;
}

bool RouteExchange::step(const ExchangeView& view) {
    std::map<Asn, MemberRib> next;
    std::vector<RouteDelivery> delivered;
    std::vector<std::string> diagnostics;

    for (const auto& m : view.members) {
        auto& rib = next[m.asn];
        rib.member = m.asn;
        if (const auto* port = find_port(view.ports, m.asn)) {
            for (const auto& p : m.announced_prefixes) {
                rib.candidates[p].push_back(BgpRoute{p, {m.asn}, port->exchange_ip, "local"});
            }
        }
    }

    // Peers and route servers only ever see a member's own prefixes.
    auto exports = [&](Asn member) {
        std::vector<BgpRoute> out;
        if (auto it = ribs_.find(member); it != ribs_.end()) {
            for (const auto& [prefix, route] : it->second.routes) {
                if (route.learned_from == "local") {
                    out.push_back(route);
                }
            }
        }
        return out;
    };

    std::vector<PeeringSession> transit_sessions;
    for (const auto& s : view.sessions) {
        if (!session_established(s, view)) {
            continue;
        }
        if (s.kind == SessionKind::bilateral) {
            for (auto [from, to] : {std::pair{s.a, s.b}, std::pair{s.b, s.a}}) {
                for (auto route : exports(from)) {
                    route.learned_from = "bilateral:" + std::to_string(from);
                    delivered.push_back({to, std::move(route)});
                }
            }
        } else if (s.kind == SessionKind::transit) {
            transit_sessions.push_back(s);
        }
    }

    for (const auto& server : view.servers) {
        RouteServer live{server.host_pe, server.service_asn, {}};
        for (const auto& s : server.client_sessions) {
            if (session_established(s, view)) {
                live.client_sessions.push_back(s);
            }
        }
        for (const auto& s : live.client_sessions) {
            for (const auto& route : exports(s.a)) {
                auto r = rs_redistribute(live, route, s.a);
                delivered.insert(delivered.end(), r.deliveries.begin(), r.deliveries.end());
                diagnostics.insert(diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
            }
        }
    }

    std::vector<UpstreamAnnouncement> upstream;
    for (const auto& m : view.members) {
        const auto* port = find_port(view.ports, m.asn);
        if (!m.is_transit || port == nullptr) {
            continue;
        }
        auto t = transit_propagate(m, port->exchange_ip, transit_sessions, view.externals, view.members);
        delivered.insert(delivered.end(), t.deliveries.begin(), t.deliveries.end());
        upstream.insert(upstream.end(), t.upstream.begin(), t.upstream.end());
    }

    for (const auto& d : delivered) {
        auto it = next.find(d.to);
        // Standard eBGP loop check on receipt.
        if (it == next.end() || d.route.path_contains(d.to)) {
            continue;
        }
        it->second.candidates[d.route.prefix].push_back(d.route);
    }
    for (auto& [asn, rib] : next) {
        for (auto& [prefix, cands] : rib.candidates) {
            std::sort(cands.begin(), cands.end());
            rib.routes[prefix] = best_path(cands);
        }
    }

    std::sort(upstream.begin(), upstream.end());
    upstream.erase(std::unique(upstream.begin(), upstream.end()), upstream.end());
    upstream_ = std::move(upstream);
    diagnostics_ = std::move(diagnostics);
    route_log_.insert(route_log_.end(), delivered.begin(), delivered.end());

    if (next == ribs_) {
        return false;
    }
    ribs_ = std::move(next);
    return true;
}

std::string format_rib_dump(const std::map<Asn, MemberRib>& ribs) {
    std::vector<std::string> lines;
    for (const auto& [asn, rib] : ribs) {
        for (const auto& [prefix, r] : rib.routes) {
            std::ostringstream os;
            os << asn << '|' << prefix.str() << '|';
            for (std::size_t i = 0; i < r.as_path.size(); ++i) {
                os << (i ? " " : "") << r.as_path[i];
            }
            os << '|' << r.next_hop.str() << '|' << r.learned_from;
            lines.push_back(os.str());
        }
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::optional<MacAddr> arp_resolve(const MemberPort& requester, Ipv4Addr target_ip, Fabric& fabric, Round now) {
    if (!requester.is_active()) {
        return std::nullopt;
    }
    EthernetFrame request{requester.nominated_mac, MacAddr::broadcast(), EtherType::arp, 28, 0,
                          ArpPayload{ArpPayload::Op::request, requester.exchange_ip, requester.nominated_mac, target_ip}};
    auto asked = fabric.inject(requester.member, request, now);
    for (auto asn : asked.reached) {
        const auto* owner = fabric.port(asn);
        if (owner == nullptr || owner->exchange_ip != target_ip) {
            continue;
        }
        EthernetFrame reply{owner->nominated_mac, requester.nominated_mac, EtherType::arp, 28, 0,
                            ArpPayload{ArpPayload::Op::reply, owner->exchange_ip, owner->nominated_mac,
                                       requester.exchange_ip}};
        auto answered = fabric.inject(owner->member, reply, now);
        if (std::find(answered.reached.begin(), answered.reached.end(), requester.member) != answered.reached.end()) {
            return owner->nominated_mac;
        }
    }
    return std::nullopt;
}

bool data_path_ok(const MemberPort& src, Ipv4Addr next_hop, Fabric& fabric, Round now) {
    auto mac = arp_resolve(src, next_hop, fabric, now);
    if (!mac) {
        return false;
    }
    EthernetFrame frame{src.nominated_mac, *mac, EtherType::ipv4, 1500, 0, std::nullopt};
    auto sent = fabric.inject(src.member, frame, now);
    for (auto asn : sent.reached) {
        const auto* p = fabric.port(asn);
        if (p != nullptr && p->nominated_mac == *mac && p->exchange_ip == next_hop) {
            return true;
        }
    }
    return false;
}

bool ReachabilityMatrix::at(Asn member, const Ipv4Prefix& prefix) const {
    auto r = std::lower_bound(rows.begin(), rows.end(), member);
    auto c = std::find(columns.begin(), columns.end(), prefix);
    if (r == rows.end() || *r != member || c == columns.end()) {
        return false;
    }
    return cells[r - rows.begin()][c - columns.begin()];
}

std::size_t ReachabilityMatrix::true_count() const {
    std::size_t n = 0;
    for (const auto& row : cells) {
        n += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
    }
    return n;
}

namespace {

// Follows selected routes member by member until the packet lands at the
// prefix's owner, or at a transit member for an external destination. Each
// hop must pass the ARP plus unicast check on the fabric.
bool forwards_to(Asn src, const Ipv4Prefix& prefix, const std::map<Asn, MemberRib>& ribs,
                 std::span<const MemberAs> members, const std::set<Ipv4Prefix>& externals,
                 const std::set<Ipv4Prefix>& member_prefixes, Fabric& fabric, Round now) {
    std::set<Asn> visited;
    for (Asn at = src;;) {
        const auto* port = fabric.port(at);
        const auto* member = find_member(members, at);
        auto rib = ribs.find(at);
        if (port == nullptr || !port->is_active() || member == nullptr || !visited.insert(at).second) {
            return false;
        }
        if (member->is_transit && externals.contains(prefix) && !member_prefixes.contains(prefix)) {
            return true;
        }
        const auto* route = rib == ribs.end() ? nullptr : rib->second.covering(prefix);
        if (route == nullptr) {
            return false;
        }
        if (route->learned_from == "local") {
            return true;
        }
        if (!data_path_ok(*port, route->next_hop, fabric, now)) {
            return false;
        }
        const Asn* next = nullptr;
        for (const auto& [asn, r] : ribs) {
            const auto* p = fabric.port(asn);
            if (p != nullptr && p->exchange_ip == route->next_hop) {
                next = &asn;
            }
        }
        if (next == nullptr) {
            return false;
        }
        at = *next;
    }
}

}  // namespace

ReachabilityMatrix reachability_matrix(const std::map<Asn, MemberRib>& ribs, std::span<const MemberAs> members,
                                       std::span<const Ipv4Prefix> externals, const Fabric& fabric, Round now) {
    ReachabilityMatrix m;
    std::set<Ipv4Prefix> member_prefixes;
    for (const auto& mem : members) {
        m.rows.push_back(mem.asn);
        member_prefixes.insert(mem.announced_prefixes.begin(), mem.announced_prefixes.end());
    }
    std::sort(m.rows.begin(), m.rows.end());
    m.columns.assign(member_prefixes.begin(), member_prefixes.end());
    std::set<Ipv4Prefix> ext(externals.begin(), externals.end());
    for (const auto& p : ext) {
        if (!member_prefixes.contains(p)) {
            m.columns.push_back(p);
        }
    }

    for (auto asn : m.rows) {
        auto& row = m.cells.emplace_back(m.columns.size(), false);
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            Fabric scratch = fabric;
            scratch.set_tracing(false);
            row[c] = forwards_to(asn, m.columns[c], ribs, members, ext, member_prefixes, scratch, now);
        }
    }
    return m;
}

}  // namespace remix

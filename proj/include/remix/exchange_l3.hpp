#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remix/dataplane.hpp"
#include "remix/model.hpp"

namespace remix {

struct BgpRoute {
    Ipv4Prefix prefix;
    std::vector<Asn> as_path;  // origin last
    Ipv4Addr next_hop;
    std::string learned_from;  // "local", "bilateral:<asn>", "rs:<node>" or "transit:<asn>"

    bool has_loop() const;
    bool path_contains(Asn asn) const;

    friend auto operator<=>(const BgpRoute&, const BgpRoute&) = default;
};

enum class SessionKind { bilateral, route_server, transit };
enum class TransitPolicy { full_table, default_only };

std::string_view to_string(SessionKind kind);
std::string_view to_string(TransitPolicy policy);

/// A member-facing BGP session. For route-server sessions `b` is the
/// server's service ASN and `rs_node` its host PE; for transit sessions `a`
/// is the customer and `b` the transit member.
struct PeeringSession {
    Asn a = 0;
    Asn b = 0;
    SessionKind kind = SessionKind::bilateral;
    TransitPolicy policy = TransitPolicy::default_only;
    std::string rs_node;

    friend auto operator<=>(const PeeringSession&, const PeeringSession&) = default;
};

struct RouteServer {
    std::string host_pe;
    Asn service_asn = 0;
    std::vector<PeeringSession> client_sessions;

    bool has_client(Asn member) const;
};

/// Service ASNs come from the documentation range 64496-64511, handed out in
/// host-PE name order.
inline constexpr Asn kFirstServiceAsn = 64496;

/// One route server per node flagged `rs`, with every route-server session
/// naming that node as a client.
std::vector<RouteServer> make_route_servers(const Topology& topo, std::span<const PeeringSession> sessions);

struct RouteDelivery {
    Asn to = 0;
    BgpRoute route;

    friend auto operator<=>(const RouteDelivery&, const RouteDelivery&) = default;
};

struct RsResult {
    std::vector<RouteDelivery> deliveries;
    std::vector<std::string> diagnostics;  // AS_LOOP entries
};

/// Transparent redistribution: the route goes to every other client with
/// as_path and next_hop untouched. Recipients already on the path are
/// skipped with an AS_LOOP diagnostic. Throws std::invalid_argument if
/// `from` is not a client.
RsResult rs_redistribute(const RouteServer& server, const BgpRoute& incoming, Asn from);

/// Shortest AS path, then lowest next hop, then lowest learned_from.
/// Throws std::invalid_argument on an empty candidate list.
const BgpRoute& best_path(std::span<const BgpRoute> candidates);

struct UpstreamAnnouncement {
    Ipv4Prefix prefix;
    std::vector<Asn> as_path;

    friend auto operator<=>(const UpstreamAnnouncement&, const UpstreamAnnouncement&) = default;
};

struct TransitResult {
    std::vector<RouteDelivery> deliveries;
    std::vector<UpstreamAnnouncement> upstream;
};

/// Routes the transit member hands its customers over `sessions` (transit
/// kind with b == transit.asn): a default route for default_only, every
/// external prefix for full_table. Customer prefixes are re-announced
/// upstream behind the transit ASN.
TransitResult transit_propagate(const MemberAs& transit, Ipv4Addr transit_ip,
                                std::span<const PeeringSession> sessions,
                                std::span<const Ipv4Prefix> external_prefixes,
                                std::span<const MemberAs> members);

struct MemberRib {
    Asn member = 0;
    std::map<Ipv4Prefix, BgpRoute> routes;
    std::map<Ipv4Prefix, std::vector<BgpRoute>> candidates;

    /// Longest-prefix match.
    const BgpRoute* lookup(Ipv4Addr addr) const;
    /// Most specific selected route covering all of `prefix`.
    const BgpRoute* covering(const Ipv4Prefix& prefix) const;

    friend bool operator==(const MemberRib&, const MemberRib&) = default;
};

/// Everything route exchange needs from the rest of the exchange.
struct ExchangeView {
    std::span<const MemberAs> members;
    std::span<const MemberPort> ports;
    std::span<const PeeringSession> sessions;
    std::span<const RouteServer> servers;
    std::span<const Ipv4Prefix> externals;
    std::function<bool(const std::string&, const std::string&)> same_component;
};

/// Sessions come up only when every member endpoint's port is active and the
/// PEs involved share an underlay component.
bool session_established(const PeeringSession& session, const ExchangeView& view);

/// Synchronous-round BGP among members. Each round recomputes every
/// Adj-RIB-In from the current Loc-RIBs; members export only their own
/// prefixes to peers and route servers.
class RouteExchange {
public:
    /// One round; returns true if any member's RIB changed.
    bool step(const ExchangeView& view);

    const std::map<Asn, MemberRib>& ribs() const { return ribs_; }
    const MemberRib* rib(Asn member) const;

    /// Every route delivered over a session so far.
    const std::vector<RouteDelivery>& route_log() const { return route_log_; }
    const std::vector<UpstreamAnnouncement>& upstream() const { return upstream_; }
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::map<Asn, MemberRib> ribs_;
    std::vector<RouteDelivery> route_log_;
    std::vector<UpstreamAnnouncement> upstream_;
    std::vector<std::string> diagnostics_;
};

/// `member_asn|prefix|as_path|next_hop|learned_from`, one line per selected
/// route, lines sorted.
std::string format_rib_dump(const std::map<Asn, MemberRib>& ribs);

/// Broadcasts an ARP request from `requester` and waits for the owner of
/// `target_ip` to answer. nullopt (NO_ANSWER) when the requester or owner is
/// quarantined, the owner is absent, or the fabric is partitioned.
std::optional<MacAddr> arp_resolve(const MemberPort& requester, Ipv4Addr target_ip, Fabric& fabric, Round now);

/// ARP for `next_hop`, then a full-size IPv4 unicast to the answer. True iff
/// the frame reaches the port that owns `next_hop`.
bool data_path_ok(const MemberPort& src, Ipv4Addr next_hop, Fabric& fabric, Round now);

struct ReachabilityMatrix {
    std::vector<Asn> rows;             // member ASNs, ascending
    std::vector<Ipv4Prefix> columns;   // member prefixes then externals, each ascending
    std::vector<std::vector<bool>> cells;

    bool at(Asn member, const Ipv4Prefix& prefix) const;
    std::size_t true_count() const;

    friend bool operator==(const ReachabilityMatrix&, const ReachabilityMatrix&) = default;
};

/// A cell holds iff traffic from the member ends up at the prefix: each hop
/// follows the selected covering route, and the ARP plus unicast exchange to
/// its next hop succeeds on a scratch copy of the fabric. The walk ends at
/// the prefix's owner, or at a transit member for an external prefix.
ReachabilityMatrix reachability_matrix(const std::map<Asn, MemberRib>& ribs, std::span<const MemberAs> members,
                                       std::span<const Ipv4Prefix> externals, const Fabric& fabric, Round now);

}  // namespace remix

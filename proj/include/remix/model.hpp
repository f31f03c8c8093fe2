#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remix {

using Asn = std::uint32_t;
using Round = std::uint64_t;
using LinkId = std::size_t;

class Ipv4Addr {
public:
    constexpr Ipv4Addr() = default;
    constexpr explicit Ipv4Addr(std::uint32_t value) : value_(value) {}

    static std::optional<Ipv4Addr> parse(std::string_view text);

    constexpr std::uint32_t value() const { return value_; }
    std::string str() const;

    /// True for 10/8, 172.16/12 and 192.168/16.
    bool is_private() const;

    friend constexpr auto operator<=>(Ipv4Addr, Ipv4Addr) = default;

private:
    std::uint32_t value_ = 0;
};

class Ipv4Prefix {
public:
    constexpr Ipv4Prefix() = default;
    /// Host bits of `network` are cleared.
    Ipv4Prefix(Ipv4Addr network, int length);

    /// Accepts `a.b.c.d/len`; rejects host bits set beyond the mask.
    static std::optional<Ipv4Prefix> parse(std::string_view text);

    Ipv4Addr network() const { return network_; }
    int length() const { return length_; }
    std::uint32_t mask() const;

    bool contains(Ipv4Addr addr) const;
    bool contains(const Ipv4Prefix& other) const;
    bool overlaps(const Ipv4Prefix& other) const;

    std::string str() const;

    friend auto operator<=>(const Ipv4Prefix&, const Ipv4Prefix&) = default;

private:
    Ipv4Addr network_;
    int length_ = 0;
};

inline const Ipv4Prefix kDefaultRoute{};

class MacAddr {
public:
    constexpr MacAddr() = default;
    constexpr explicit MacAddr(std::uint64_t bits) : bits_(bits & 0xffff'ffff'ffffULL) {}

    static std::optional<MacAddr> parse(std::string_view text);
    static constexpr MacAddr broadcast() { return MacAddr(0xffff'ffff'ffffULL); }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool is_broadcast() const { return bits_ == 0xffff'ffff'ffffULL; }
    /// I/G bit of the first octet.
    constexpr bool is_group() const { return (bits_ >> 40) & 0x01; }
    constexpr bool is_unicast() const { return !is_group(); }

    std::string str() const;

    friend constexpr auto operator<=>(MacAddr, MacAddr) = default;

private:
    std::uint64_t bits_ = 0;
};

struct PeNode {
    std::string name;
    Ipv4Addr loopback;
    bool is_route_reflector = false;
    bool hosts_route_server = false;
};

enum class LinkKind { radio, leased };
enum class LinkState { up, down };

std::string_view to_string(LinkKind kind);

/// Smallest frame (bytes) every fabric link must pass.
inline constexpr std::uint32_t kMinFabricMtu = 1600;

/// Default metric when a scenario omits `cost`: leased circuits are preferred.
constexpr std::uint32_t default_cost(LinkKind kind) { return kind == LinkKind::leased ? 1 : 10; }

struct Link {
    std::string endpoint_a;
    std::string endpoint_b;
    std::uint32_t cost = 1;
    std::uint32_t mtu = kMinFabricMtu;
    LinkKind kind = LinkKind::radio;
    LinkState state = LinkState::up;

    bool is_up() const { return state == LinkState::up; }
    bool joins(std::string_view a, std::string_view b) const;
    bool touches(std::string_view node) const;
    /// The far end as seen from `node`; `node` must be an endpoint.
    const std::string& other(std::string_view node) const;
};

/// Physical fabric. Links form a multiset: parallel links are kept apart and
/// addressed by their LinkId (insertion index).
class Topology {
public:
    void add_node(PeNode node) { nodes_.push_back(std::move(node)); }
    LinkId add_link(Link link);

    const std::vector<PeNode>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    Link& link(LinkId id) { return links_.at(id); }
    const Link& link(LinkId id) const { return links_.at(id); }

    const PeNode* find_node(std::string_view name) const;
    bool has_node(std::string_view name) const { return find_node(name) != nullptr; }

    /// Node names in lexicographic order.
    std::vector<std::string> node_names() const;

private:
    std::vector<PeNode> nodes_;
    std::vector<Link> links_;
};

struct MemberAs {
    Asn asn = 0;
    std::string name;
    bool is_transit = false;
    std::vector<Ipv4Prefix> announced_prefixes;
};

enum class PortState { quarantine, active };

std::string_view to_string(PortState state);

struct MemberPort {
    Asn member = 0;
    std::string attach_pe;
    MacAddr nominated_mac;
    Ipv4Addr exchange_ip;
    PortState state = PortState::active;

    bool is_active() const { return state == PortState::active; }
};

bool is_private_asn(Asn asn);
bool is_reserved_asn(Asn asn);

enum class ViolationCode {
    DUP_NODE,
    DUP_LOOPBACK,
    NO_REFLECTOR,
    SELF_LOOP,
    UNKNOWN_ENDPOINT,
    BAD_COST,
    MTU_TOO_SMALL,
    DUP_ASN,
    PRIVATE_ASN,
    RESERVED_ASN,
    PREFIX_OVERLAP,
    UNKNOWN_MEMBER,
    DUP_PORT,
    UNKNOWN_ATTACH_PE,
    GROUP_MAC,
    DUP_MAC,
    DUP_EXCHANGE_IP,
    IP_OUTSIDE_EXCHANGE,
    PRIVATE_EXCHANGE_PREFIX,
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string detail;

    friend auto operator<=>(const Violation&, const Violation&) = default;
};

/// Violations sorted by (code, detail); empty means the inputs are valid.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool contains(ViolationCode code) const;
    std::size_t count(ViolationCode code) const;
};

/// Checks every structural invariant of the fabric, the members and their
/// ports. Violations are data; the function never throws. The result does
/// not depend on the order of nodes, links, members or ports.
ValidationReport validate_topology(const Topology& topo, std::span<const MemberAs> members,
                                   std::span<const MemberPort> ports,
                                   std::optional<Ipv4Prefix> exchange_prefix = std::nullopt);

/// Partition of the nodes by reachability over links that are up. Each
/// component is sorted, and components are ordered by their smallest name.
std::vector<std::vector<std::string>> connected_components(const Topology& topo);

/// Number of unordered PE pairs, i.e. pseudo-wires in a full mesh.
constexpr std::size_t full_mesh_size(std::size_t pe_count) {
    return pe_count < 2 ? 0 : pe_count * (pe_count - 1) / 2;
}

}  // namespace remix

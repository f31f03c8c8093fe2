#include "remix/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace remix {

namespace {

bool parse_uint(std::string_view text, std::uint32_t& out, int base = 10) {
    if (text.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out, base);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::optional<Ipv4Addr> Ipv4Addr::parse(std::string_view text) {
    std::uint32_t value = 0;
    for (int octet = 0; octet < 4; ++octet) {
        auto dot = text.find('.');
        if ((octet < 3) != (dot != std::string_view::npos)) {
            return std::nullopt;
        }
        auto part = text.substr(0, dot);
        std::uint32_t v = 0;
        if (part.size() > 3 || !parse_uint(part, v) || v > 255) {
            return std::nullopt;
        }
        value = (value << 8) | v;
        text = octet < 3 ? text.substr(dot + 1) : std::string_view{};
    }
    return Ipv4Addr(value);
}

std::string Ipv4Addr::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", value_ >> 24, (value_ >> 16) & 0xff,
                  (value_ >> 8) & 0xff, value_ & 0xff);
    return buf;
}

bool Ipv4Addr::is_private() const {
    return Ipv4Prefix(Ipv4Addr(0x0a000000), 8).contains(*this) ||
           Ipv4Prefix(Ipv4Addr(0xac100000), 12).contains(*this) ||
           Ipv4Prefix(Ipv4Addr(0xc0a80000), 16).contains(*this);
}

Ipv4Prefix::Ipv4Prefix(Ipv4Addr network, int length) : length_(length) {
    if (length < 0 || length > 32) {
        throw std::invalid_argument("prefix length out of range");
    }
    network_ = Ipv4Addr(network.value() & mask());
}

std::optional<Ipv4Prefix> Ipv4Prefix::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return std::nullopt;
    }
    auto addr = Ipv4Addr::parse(text.substr(0, slash));
    std::uint32_t len = 0;
    auto len_text = text.substr(slash + 1);
    if (!addr || len_text.size() > 2 || !parse_uint(len_text, len) || len > 32) {
        return std::nullopt;
    }
    Ipv4Prefix prefix(*addr, static_cast<int>(len));
    if (prefix.network() != *addr) {
        return std::nullopt;
    }
    return prefix;
}

std::uint32_t Ipv4Prefix::mask() const {
    return length_ == 0 ? 0u : ~std::uint32_t{0} << (32 - length_);
}

bool Ipv4Prefix::contains(Ipv4Addr addr) const {
    return (addr.value() & mask()) == network_.value();
}

bool Ipv4Prefix::contains(const Ipv4Prefix& other) const {
    return other.length_ >= length_ && contains(other.network_);
}

bool Ipv4Prefix::overlaps(const Ipv4Prefix& other) const {
    return contains(other) || other.contains(*this);
}

std::string Ipv4Prefix::str() const {
    return network_.str() + "/" + std::to_string(length_);
}

std::optional<MacAddr> MacAddr::parse(std::string_view text) {
    if (text.size() != 17) {
        return std::nullopt;
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 6; ++i) {
        if (i > 0 && text[i * 3 - 1] != ':') {
            return std::nullopt;
        }
        std::uint32_t octet = 0;
        if (!parse_uint(text.substr(i * 3, 2), octet, 16)) {
            return std::nullopt;
        }
        bits = (bits << 8) | octet;
    }
    return MacAddr(bits);
}

std::string MacAddr::str() const {
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                  static_cast<unsigned>((bits_ >> 40) & 0xff), static_cast<unsigned>((bits_ >> 32) & 0xff),
                  static_cast<unsigned>((bits_ >> 24) & 0xff), static_cast<unsigned>((bits_ >> 16) & 0xff),
                  static_cast<unsigned>((bits_ >> 8) & 0xff), static_cast<unsigned>(bits_ & 0xff));
    return buf;
}

std::string_view to_string(LinkKind kind) {
    return kind == LinkKind::leased ? "leased" : "radio";
}

std::string_view to_string(PortState state) {
    return state == PortState::active ? "active" : "quarantine";
}

bool Link::joins(std::string_view a, std::string_view b) const {
    return (endpoint_a == a && endpoint_b == b) || (endpoint_a == b && endpoint_b == a);
}

bool Link::touches(std::string_view node) const {
    return endpoint_a == node || endpoint_b == node;
}

const std::string& Link::other(std::string_view node) const {
    return endpoint_a == node ? endpoint_b : endpoint_a;
}

LinkId Topology::add_link(Link link) {
    links_.push_back(std::move(link));
    return links_.size() - 1;
}

const PeNode* Topology::find_node(std::string_view name) const {
    auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const PeNode& n) { return n.name == name; });
    return it == nodes_.end() ? nullptr : &*it;
}

std::vector<std::string> Topology::node_names() const {
    std::vector<std::string> names;
    names.reserve(nodes_.size());
    for (const auto& n : nodes_) {
        names.push_back(n.name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

bool is_private_asn(Asn asn) {
    return (asn >= 64512 && asn <= 65534) || (asn >= 4200000000u && asn <= 4294967294u);
}

bool is_reserved_asn(Asn asn) {
    return asn == 0 || asn == 23456 || asn == 65535 || asn == 4294967295u;
}

std::string_view to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::DUP_NODE: return "DUP_NODE";
        case ViolationCode::DUP_LOOPBACK: return "DUP_LOOPBACK";
        case ViolationCode::NO_REFLECTOR: return "NO_REFLECTOR";
        case ViolationCode::SELF_LOOP: return "SELF_LOOP";
        case ViolationCode::UNKNOWN_ENDPOINT: return "UNKNOWN_ENDPOINT";
        case ViolationCode::BAD_COST: return "BAD_COST";
        case ViolationCode::MTU_TOO_SMALL: return "MTU_TOO_SMALL";
        case ViolationCode::DUP_ASN: return "DUP_ASN";
        case ViolationCode::PRIVATE_ASN: return "PRIVATE_ASN";
        case ViolationCode::RESERVED_ASN: return "RESERVED_ASN";
        case ViolationCode::PREFIX_OVERLAP: return "PREFIX_OVERLAP";
        case ViolationCode::UNKNOWN_MEMBER: return "UNKNOWN_MEMBER";
        case ViolationCode::DUP_PORT: return "DUP_PORT";
        case ViolationCode::UNKNOWN_ATTACH_PE: return "UNKNOWN_ATTACH_PE";
        case ViolationCode::GROUP_MAC: return "GROUP_MAC";
        case ViolationCode::DUP_MAC: return "DUP_MAC";
        case ViolationCode::DUP_EXCHANGE_IP: return "DUP_EXCHANGE_IP";
        case ViolationCode::IP_OUTSIDE_EXCHANGE: return "IP_OUTSIDE_EXCHANGE";
        case ViolationCode::PRIVATE_EXCHANGE_PREFIX: return "PRIVATE_EXCHANGE_PREFIX";
    }
    return "UNKNOWN";
}

bool ValidationReport::contains(ViolationCode code) const {
    return count(code) > 0;
}

std::size_t ValidationReport::count(ViolationCode code) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [&](const Violation& v) { return v.code == code; }));
}

namespace {

// Emits one violation per key that occurs more than once.
template <typename Key>
void report_duplicates(const std::map<Key, std::size_t>& counts, ViolationCode code,
                       std::vector<Violation>& out, auto&& describe) {
    for (const auto& [key, n] : counts) {
        if (n > 1) {
            out.push_back({code, describe(key) + " x" + std::to_string(n)});
        }
    }
}

std::string link_label(const Link& l) {
    return std::min(l.endpoint_a, l.endpoint_b) + "-" + std::max(l.endpoint_a, l.endpoint_b);
}

}  // namespace

ValidationReport validate_topology(const Topology& topo, std::span<const MemberAs> members,
                                   std::span<const MemberPort> ports,
                                   std::optional<Ipv4Prefix> exchange_prefix) {
    std::vector<Violation> out;
    auto ident = [](const auto& k) { return std::string(k); };

    std::map<std::string, std::size_t> names;
    std::map<Ipv4Addr, std::size_t> loopbacks;
    bool any_reflector = false;
    for (const auto& n : topo.nodes()) {
        ++names[n.name];
        ++loopbacks[n.loopback];
        any_reflector |= n.is_route_reflector;
    }
    report_duplicates(names, ViolationCode::DUP_NODE, out, ident);
    report_duplicates(loopbacks, ViolationCode::DUP_LOOPBACK, out, [](Ipv4Addr a) { return a.str(); });
    if (topo.nodes().size() >= 2 && !any_reflector) {
        out.push_back({ViolationCode::NO_REFLECTOR, std::to_string(topo.nodes().size()) + " nodes"});
    }

    for (const auto& l : topo.links()) {
        const auto label = link_label(l);
        if (l.endpoint_a == l.endpoint_b) {
            out.push_back({ViolationCode::SELF_LOOP, label});
        }
        for (const auto* end : {&l.endpoint_a, &l.endpoint_b}) {
            if (!names.contains(*end)) {
                out.push_back({ViolationCode::UNKNOWN_ENDPOINT, label + " " + *end});
            }
        }
        if (l.cost < 1) {
            out.push_back({ViolationCode::BAD_COST, label});
        }
        if (l.mtu < kMinFabricMtu) {
            out.push_back({ViolationCode::MTU_TOO_SMALL, label + " mtu " + std::to_string(l.mtu)});
        }
    }

    std::map<Asn, std::size_t> asns;
    for (const auto& m : members) {
        ++asns[m.asn];
        if (is_reserved_asn(m.asn)) {
            out.push_back({ViolationCode::RESERVED_ASN, std::to_string(m.asn)});
        } else if (is_private_asn(m.asn)) {
            out.push_back({ViolationCode::PRIVATE_ASN, std::to_string(m.asn)});
        }
    }
    report_duplicates(asns, ViolationCode::DUP_ASN, out, [](Asn a) { return std::to_string(a); });

    // Prefixes of distinct members must be disjoint.
    std::vector<std::pair<Ipv4Prefix, Asn>> owned;
    for (const auto& m : members) {
        for (const auto& p : m.announced_prefixes) {
            owned.emplace_back(p, m.asn);
        }
    }
    std::sort(owned.begin(), owned.end());
    for (std::size_t i = 0; i < owned.size(); ++i) {
        for (std::size_t j = i + 1; j < owned.size(); ++j) {
            if (owned[i].second != owned[j].second && owned[i].first.overlaps(owned[j].first)) {
                out.push_back({ViolationCode::PREFIX_OVERLAP,
                               owned[i].first.str() + " " + owned[j].first.str()});
            }
        }
    }

    if (exchange_prefix && exchange_prefix->network().is_private()) {
        out.push_back({ViolationCode::PRIVATE_EXCHANGE_PREFIX, exchange_prefix->str()});
    }

    std::map<Asn, std::size_t> port_owners;
    std::map<MacAddr, std::size_t> macs;
    std::map<Ipv4Addr, std::size_t> ips;
    for (const auto& p : ports) {
        ++port_owners[p.member];
        ++macs[p.nominated_mac];
        ++ips[p.exchange_ip];
        if (!asns.contains(p.member)) {
            out.push_back({ViolationCode::UNKNOWN_MEMBER, std::to_string(p.member)});
        }
        if (!names.contains(p.attach_pe)) {
            out.push_back({ViolationCode::UNKNOWN_ATTACH_PE, std::to_string(p.member) + " " + p.attach_pe});
        }
        if (p.nominated_mac.is_group()) {
            out.push_back({ViolationCode::GROUP_MAC, p.nominated_mac.str()});
        }
        if (exchange_prefix && !exchange_prefix->contains(p.exchange_ip)) {
            out.push_back({ViolationCode::IP_OUTSIDE_EXCHANGE, p.exchange_ip.str()});
        }
    }
    report_duplicates(port_owners, ViolationCode::DUP_PORT, out, [](Asn a) { return std::to_string(a); });
    report_duplicates(macs, ViolationCode::DUP_MAC, out, [](MacAddr m) { return m.str(); });
    report_duplicates(ips, ViolationCode::DUP_EXCHANGE_IP, out, [](Ipv4Addr a) { return a.str(); });

    std::sort(out.begin(), out.end());
    return ValidationReport{std::move(out)};
}

std::vector<std::vector<std::string>> connected_components(const Topology& topo) {
    const auto names = topo.node_names();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
        index.emplace(names[i], i);
    }

    std::vector<std::size_t> parent(names.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& l : topo.links()) {
        if (!l.is_up()) {
            continue;
        }
        auto a = index.find(l.endpoint_a);
        auto b = index.find(l.endpoint_b);
        if (a == index.end() || b == index.end()) {
            continue;
        }
        auto ra = find(a->second);
        auto rb = find(b->second);
        if (ra != rb) {
            parent[std::max(ra, rb)] = std::min(ra, rb);
        }
    }

    // Roots are always the smallest index, so iterating names in order yields
    // components already sorted by their smallest member.
    std::vector<std::vector<std::string>> components;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto root = find(i);
        auto [it, inserted] = slot.emplace(root, components.size());
        if (inserted) {
            components.emplace_back();
        }
        components[it->second].push_back(names[i]);
    }
    return components;
}

}  // namespace remix

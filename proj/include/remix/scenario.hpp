#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "remix/dataplane.hpp"
#include "remix/exchange_l3.hpp"
#include "remix/model.hpp"

namespace remix {

enum class EventKind {
    link_down,
    link_up,
    port_add,
    port_promote_check,
    inject_frame,
    member_announce,
    member_withdraw,
};

std::string_view to_string(EventKind kind);

struct Event {
    Round at_round = 0;
    EventKind kind = EventKind::link_down;

    std::string node_a;  // link events
    std::string node_b;
    Asn member = 0;      // all member-scoped events
    Ipv4Prefix prefix;   // announce / withdraw

    MacAddr dst_mac = MacAddr::broadcast();  // inject
    EtherType ethertype = EtherType::ipv4;
    std::uint32_t payload_size = 0;

    std::optional<MemberAs> new_member;  // port_add
    std::optional<MemberPort> new_port;

    std::size_t line = 0;  // source line, 0 when built in code
};

struct Scenario {
    Topology topology;
    std::optional<Ipv4Prefix> exchange_prefix;
    std::vector<MemberAs> members;
    std::vector<MemberPort> ports;
    std::vector<PeeringSession> sessions;
    std::vector<Ipv4Prefix> external_prefixes;
    std::vector<Event> events;  // stable-sorted by round

    const MemberAs* find_member(Asn asn) const;
    const MemberPort* find_port(Asn asn) const;
};

/// Syntax, reference or validation failure in a scenario file. Validation
/// failures carry the code of the first violation as the token.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string token, const std::string& message, bool validation = false);

    std::size_t line() const { return line_; }
    const std::string& token() const { return token_; }
    bool is_validation() const { return validation_; }

private:
    std::size_t line_;
    std::string token_;
    bool validation_;
};

/// Parses the line-oriented scenario language:
///
///   node <name> loopback <ipv4> [rr] [rs]
///   link <a> <b> [cost <int>] [mtu <int>] type <radio|leased>
///   exchange-prefix <ipv4/len>
///   member <asn> <name> port <node> mac <mac> ip <ipv4> [transit] [quarantine]
///   announce <asn> <ipv4/len>
///   session bilateral <asn> <asn>
///   session rs <asn> <rs-node>
///   session transit <asn> <transit-asn> <default|full>
///   external <ipv4/len>
///   event <round> link-down|link-up <a> <b>
///   event <round> inject <asn> <dst-mac|broadcast> <arp|ipv4|other> <size>
///   event <round> promote <asn>
///   event <round> withdraw|announce <asn> <ipv4/len>
///
/// `#` starts a comment. Entities must be declared before they are
/// referenced, except that events are resolved against the whole file.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a file; an unreadable file is a ParseError on line 0.
Scenario load_scenario(const std::string& path);

}  // namespace remix

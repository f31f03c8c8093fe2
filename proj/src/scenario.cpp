#include "remix/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace remix {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::link_down: return "link-down";
        case EventKind::link_up: return "link-up";
        case EventKind::port_add: return "port-add";
        case EventKind::port_promote_check: return "promote";
        case EventKind::inject_frame: return "inject";
        case EventKind::member_announce: return "announce";
        case EventKind::member_withdraw: return "withdraw";
    }
    return "unknown";
}

const MemberAs* Scenario::find_member(Asn asn) const {
    auto it = std::find_if(members.begin(), members.end(), [&](const MemberAs& m) { return m.asn == asn; });
    return it == members.end() ? nullptr : &*it;
}

const MemberPort* Scenario::find_port(Asn asn) const {
    auto it = std::find_if(ports.begin(), ports.end(), [&](const MemberPort& p) { return p.member == asn; });
    return it == ports.end() ? nullptr : &*it;
}

ParseError::ParseError(std::size_t line, std::string token, const std::string& message, bool validation)
    : std::runtime_error("line " + std::to_string(line) + ": " + message + " '" + token + "'"),
      line_(line),
      token_(std::move(token)),
      validation_(validation) {}

namespace {

class Parser {
public:
    Scenario parse(std::string_view text);

private:
    using Tokens = std::vector<std::string>;

    [[noreturn]] void fail(const std::string& token, const std::string& message) const {
        throw ParseError(line_, token, message);
    }

    const std::string& at(const Tokens& t, std::size_t i, const char* what) const {
        if (i >= t.size()) {
            fail(t.empty() ? "" : t.back(), std::string("missing ") + what);
        }
        return t[i];
    }

    void expect_keyword(const Tokens& t, std::size_t i, std::string_view keyword) const {
        if (at(t, i, keyword.data()) != keyword) {
            fail(t[i], "expected '" + std::string(keyword) + "'");
        }
    }

    void expect_end(const Tokens& t, std::size_t i) const {
        if (t.size() > i) {
            fail(t[i], "unexpected token");
        }
    }

    template <typename Int>
    Int number(const Tokens& t, std::size_t i, const char* what) const {
        const auto& s = at(t, i, what);
        Int v{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            fail(s, std::string("bad ") + what);
        }
        return v;
    }

    Ipv4Addr address(const Tokens& t, std::size_t i) const {
        auto a = Ipv4Addr::parse(at(t, i, "address"));
        if (!a) {
            fail(t[i], "bad IPv4 address");
        }
        return *a;
    }

    Ipv4Prefix prefix(const Tokens& t, std::size_t i) const {
        auto p = Ipv4Prefix::parse(at(t, i, "prefix"));
        if (!p) {
            fail(t[i], "bad IPv4 prefix");
        }
        return *p;
    }

    const std::string& known_node(const Tokens& t, std::size_t i) const {
        const auto& name = at(t, i, "node");
        if (!s_.topology.has_node(name)) {
            fail(name, "unknown node");
        }
        return name;
    }

    Asn known_member(const Tokens& t, std::size_t i) const {
        Asn asn = number<Asn>(t, i, "ASN");
        if (s_.find_member(asn) == nullptr) {
            fail(t[i], "unknown member");
        }
        return asn;
    }

    void statement(const Tokens& t);
    void node(const Tokens& t);
    void link(const Tokens& t);
    void member(const Tokens& t);
    void session(const Tokens& t);
    void event(const Tokens& t);
    void resolve_events();
    void revalidate();

    Scenario s_;
    std::size_t line_ = 0;
    std::vector<Violation> known_violations_;
};

Scenario Parser::parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        std::istringstream is{std::string(raw)};
        Tokens tokens;
        for (std::string tok; is >> tok;) {
            tokens.push_back(std::move(tok));
        }
        if (!tokens.empty()) {
            statement(tokens);
        }
    }

    const bool has_reflector = std::any_of(s_.topology.nodes().begin(), s_.topology.nodes().end(),
                                           [](const PeNode& n) { return n.is_route_reflector; });
    if (s_.topology.nodes().size() >= 2 && !has_reflector) {
        throw ParseError(line_, std::string(to_string(ViolationCode::NO_REFLECTOR)),
                         "at least one node must be flagged rr", true);
    }
    for (const auto& rs : make_route_servers(s_.topology, s_.sessions)) {
        if (s_.find_member(rs.service_asn) != nullptr) {
            throw ParseError(line_, std::to_string(rs.service_asn),
                             "member ASN collides with route-server service ASN of " + rs.host_pe, true);
        }
    }
    resolve_events();
    std::stable_sort(s_.events.begin(), s_.events.end(),
                     [](const Event& a, const Event& b) { return a.at_round < b.at_round; });
    return std::move(s_);
}

void Parser::statement(const Tokens& t) {
    const auto& kw = t[0];
    if (kw == "node") {
        node(t);
    } else if (kw == "link") {
        link(t);
    } else if (kw == "exchange-prefix") {
        if (s_.exchange_prefix) {
            fail(kw, "exchange prefix already set");
        }
        s_.exchange_prefix = prefix(t, 1);
        expect_end(t, 2);
        revalidate();
    } else if (kw == "member") {
        member(t);
    } else if (kw == "announce") {
        Asn asn = known_member(t, 1);
        auto p = prefix(t, 2);
        expect_end(t, 3);
        for (auto& m : s_.members) {
            if (m.asn == asn) {
                m.announced_prefixes.push_back(p);
            }
        }
        revalidate();
    } else if (kw == "session") {
        session(t);
    } else if (kw == "external") {
        s_.external_prefixes.push_back(prefix(t, 1));
        expect_end(t, 2);
    } else if (kw == "event") {
        event(t);
    } else {
        fail(kw, "unknown statement");
    }
}

void Parser::node(const Tokens& t) {
    PeNode n;
    n.name = at(t, 1, "node name");
    expect_keyword(t, 2, "loopback");
    n.loopback = address(t, 3);
    for (std::size_t i = 4; i < t.size(); ++i) {
        if (t[i] == "rr") {
            n.is_route_reflector = true;
        } else if (t[i] == "rs") {
            n.hosts_route_server = true;
        } else {
            fail(t[i], "unexpected token");
        }
    }
    s_.topology.add_node(std::move(n));
    revalidate();
}

void Parser::link(const Tokens& t) {
    Link l;
    l.endpoint_a = known_node(t, 1);
    l.endpoint_b = known_node(t, 2);
    std::optional<std::uint32_t> cost;
    std::optional<LinkKind> kind;
    for (std::size_t i = 3; i < t.size(); i += 2) {
        if (t[i] == "cost") {
            cost = number<std::uint32_t>(t, i + 1, "cost");
        } else if (t[i] == "mtu") {
            l.mtu = number<std::uint32_t>(t, i + 1, "mtu");
        } else if (t[i] == "type") {
            const auto& k = at(t, i + 1, "link type");
            if (k == "radio") {
                kind = LinkKind::radio;
            } else if (k == "leased") {
                kind = LinkKind::leased;
            } else {
                fail(k, "bad link type");
            }
        } else {
            fail(t[i], "unexpected token");
        }
    }
    if (!kind) {
        fail(t.back(), "missing link type");
    }
    l.kind = *kind;
    l.cost = cost.value_or(default_cost(*kind));
    s_.topology.add_link(std::move(l));
    revalidate();
}

void Parser::member(const Tokens& t) {
    MemberAs m;
    MemberPort p;
    m.asn = number<Asn>(t, 1, "ASN");
    m.name = at(t, 2, "member name");
    expect_keyword(t, 3, "port");
    p.member = m.asn;
    p.attach_pe = known_node(t, 4);
    expect_keyword(t, 5, "mac");
    auto mac = MacAddr::parse(at(t, 6, "MAC"));
    if (!mac) {
        fail(t[6], "bad MAC address");
    }
    p.nominated_mac = *mac;
    expect_keyword(t, 7, "ip");
    p.exchange_ip = address(t, 8);
    for (std::size_t i = 9; i < t.size(); ++i) {
        if (t[i] == "transit") {
            m.is_transit = true;
        } else if (t[i] == "quarantine") {
            p.state = PortState::quarantine;
        } else {
            fail(t[i], "unexpected token");
        }
    }
    s_.members.push_back(std::move(m));
    s_.ports.push_back(p);
    revalidate();
}

void Parser::session(const Tokens& t) {
    const auto& kind = at(t, 1, "session kind");
    PeeringSession s;
    s.a = known_member(t, 2);
    if (kind == "bilateral") {
        s.kind = SessionKind::bilateral;
        s.b = known_member(t, 3);
        if (s.a == s.b) {
            fail(t[3], "session with itself");
        }
        expect_end(t, 4);
    } else if (kind == "rs") {
        s.kind = SessionKind::route_server;
        s.rs_node = known_node(t, 3);
        if (!s_.topology.find_node(s.rs_node)->hosts_route_server) {
            fail(t[3], "node does not host a route server");
        }
        expect_end(t, 4);
    } else if (kind == "transit") {
        s.kind = SessionKind::transit;
        s.b = known_member(t, 3);
        if (!s_.find_member(s.b)->is_transit) {
            fail(t[3], "member is not a transit provider");
        }
        if (s.a == s.b) {
            fail(t[3], "session with itself");
        }
        const auto& policy = at(t, 4, "transit policy");
        if (policy == "default") {
            s.policy = TransitPolicy::default_only;
        } else if (policy == "full") {
            s.policy = TransitPolicy::full_table;
        } else {
            fail(policy, "bad transit policy");
        }
        expect_end(t, 5);
    } else {
        fail(kind, "unknown session kind");
    }
    s_.sessions.push_back(std::move(s));
}

void Parser::event(const Tokens& t) {
    Event e;
    e.line = line_;
    e.at_round = number<Round>(t, 1, "round");
    const auto& kind = at(t, 2, "event kind");
    // Entity references are checked in resolve_events.
    if (kind == "link-down" || kind == "link-up") {
        e.kind = kind == "link-down" ? EventKind::link_down : EventKind::link_up;
        e.node_a = at(t, 3, "node");
        e.node_b = at(t, 4, "node");
        expect_end(t, 5);
    } else if (kind == "inject") {
        e.kind = EventKind::inject_frame;
        e.member = number<Asn>(t, 3, "ASN");
        const auto& dst = at(t, 4, "destination");
        if (dst != "broadcast") {
            auto mac = MacAddr::parse(dst);
            if (!mac) {
                fail(dst, "bad MAC address");
            }
            e.dst_mac = *mac;
        }
        const auto& type = at(t, 5, "ethertype");
        if (type == "arp") {
            e.ethertype = EtherType::arp;
        } else if (type == "ipv4") {
            e.ethertype = EtherType::ipv4;
        } else if (type == "other") {
            e.ethertype = EtherType::other;
        } else {
            fail(type, "bad ethertype");
        }
        e.payload_size = number<std::uint32_t>(t, 6, "size");
        expect_end(t, 7);
    } else if (kind == "promote") {
        e.kind = EventKind::port_promote_check;
        e.member = number<Asn>(t, 3, "ASN");
        expect_end(t, 4);
    } else if (kind == "withdraw" || kind == "announce") {
        e.kind = kind == "withdraw" ? EventKind::member_withdraw : EventKind::member_announce;
        e.member = number<Asn>(t, 3, "ASN");
        e.prefix = prefix(t, 4);
        expect_end(t, 5);
    } else {
        fail(kind, "unknown event");
    }
    s_.events.push_back(std::move(e));
}

void Parser::resolve_events() {
    for (const auto& e : s_.events) {
        line_ = e.line;
        switch (e.kind) {
            case EventKind::link_down:
            case EventKind::link_up: {
                for (const auto* n : {&e.node_a, &e.node_b}) {
                    if (!s_.topology.has_node(*n)) {
                        fail(*n, "unknown node");
                    }
                }
                const auto& links = s_.topology.links();
                if (std::none_of(links.begin(), links.end(),
                                 [&](const Link& l) { return l.joins(e.node_a, e.node_b); })) {
                    fail(e.node_b, "no link between " + e.node_a + " and");
                }
                break;
            }
            default:
                if (s_.find_member(e.member) == nullptr) {
                    fail(std::to_string(e.member), "unknown member");
                }
        }
    }
}

void Parser::revalidate() {
    auto report = validate_topology(s_.topology, s_.members, s_.ports, s_.exchange_prefix);
    std::vector<Violation> fresh;
    std::set_difference(report.violations.begin(), report.violations.end(), known_violations_.begin(),
                        known_violations_.end(), std::back_inserter(fresh));
    fresh.erase(std::remove_if(fresh.begin(), fresh.end(),
                               [](const Violation& v) { return v.code == ViolationCode::NO_REFLECTOR; }),
                fresh.end());
    if (!fresh.empty()) {
        throw ParseError(line_, std::string(to_string(fresh.front().code)), fresh.front().detail, true);
    }
    known_violations_ = std::move(report.violations);
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    return Parser{}.parse(text);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(0, path, "cannot open scenario");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace remix

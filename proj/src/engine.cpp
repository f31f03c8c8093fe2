#include "remix/engine.hpp"

#include <algorithm>
#include <sstream>

#include "remix/error.hpp"

namespace remix {

std::string Report::str() const {
    std::string out;
    for (const auto& [k, v] : values) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::optional<std::string> Report::get(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? std::nullopt : std::optional(it->second);
}

Engine::Engine(Scenario scenario, EngineOptions options)
    : scenario_(std::move(scenario)), options_(options) {
    fabric_.set_mac_aging(options_.mac_aging);
}

std::size_t Engine::round_cap() const {
    return options_.max_rounds.value_or(4 * (scenario_.topology.nodes().size() + scenario_.members.size()));
}

bool Engine::same_component(const std::string& a, const std::string& b) const {
    auto ia = component_of_.find(a);
    auto ib = component_of_.find(b);
    return ia != component_of_.end() && ib != component_of_.end() && ia->second == ib->second;
}

ExchangeView Engine::view() const {
    return ExchangeView{scenario_.members,
                        scenario_.ports,
                        scenario_.sessions,
                        servers_,
                        scenario_.external_prefixes,
                        [this](const std::string& a, const std::string& b) { return same_component(a, b); }};
}

std::size_t Engine::converge() {
    const auto& topo = scenario_.topology;
    trees_ = compute_all_spf(topo);
    labels_ = allocate_labels(topo, trees_);
    ibgp_ = build_session_graph(topo);
    const auto pes = topo.node_names();
    adverts_ = originate_adverts(pes, labels_);
    received_ = propagate(adverts_, ibgp_);
    mesh_ = derive_pseudowires(received_, labels_, trees_);
    fabric_.rebuild(topo, scenario_.ports, mesh_);

    component_of_.clear();
    const auto components = connected_components(topo);
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (const auto& n : components[i]) {
            component_of_[n] = i;
        }
    }
    servers_ = make_route_servers(topo, scenario_.sessions);

    const auto cap = round_cap();
    const auto v = view();
    std::size_t rounds = 0;
    while (exchange_.step(v)) {
        if (++rounds > cap) {
            throw Error(ErrorCode::NONCONVERGENCE, "RIBs still changing after " + std::to_string(cap) + " rounds");
        }
    }
    total_rounds_ += rounds;
    return rounds;
}

void Engine::apply_event(const Event& e) {
    now_ = std::max(now_, e.at_round);
    ++events_applied_;

    auto member_port = [&]() -> MemberPort& {
        auto it = std::find_if(scenario_.ports.begin(), scenario_.ports.end(),
                               [&](const MemberPort& p) { return p.member == e.member; });
        if (it == scenario_.ports.end()) {
            throw Error(ErrorCode::UNKNOWN_ENTITY, "member " + std::to_string(e.member));
        }
        return *it;
    };
    auto member = [&]() -> MemberAs& {
        auto it = std::find_if(scenario_.members.begin(), scenario_.members.end(),
                               [&](const MemberAs& m) { return m.asn == e.member; });
        if (it == scenario_.members.end()) {
            throw Error(ErrorCode::UNKNOWN_ENTITY, "member " + std::to_string(e.member));
        }
        return *it;
    };

    switch (e.kind) {
        case EventKind::link_down:
        case EventKind::link_up: {
            const auto want = e.kind == EventKind::link_down ? LinkState::up : LinkState::down;
            auto& topo = scenario_.topology;
            bool exists = false;
            for (LinkId id = 0; id < topo.links().size(); ++id) {
                auto& l = topo.link(id);
                if (!l.joins(e.node_a, e.node_b)) {
                    continue;
                }
                exists = true;
                if (l.state == want) {
                    l.state = want == LinkState::up ? LinkState::down : LinkState::up;
                    break;
                }
            }
            if (!exists) {
                throw Error(ErrorCode::UNKNOWN_ENTITY, "link " + e.node_a + "-" + e.node_b);
            }
            converge();
            break;
        }
        case EventKind::inject_frame: {
            const auto& port = member_port();
            EthernetFrame frame{port.nominated_mac, e.dst_mac, e.ethertype, e.payload_size, 0, std::nullopt};
            fabric_.inject(e.member, frame, now_);
            break;
        }
        case EventKind::port_promote_check: {
            auto& port = member_port();
            if (port.state == PortState::quarantine) {
                const Round from = now_ >= kQuarantineWindow ? now_ - kQuarantineWindow + 1 : 0;
                const auto observed = fabric_.violations(e.member, from, now_);
                port = promote_port(port, observed);
                converge();
            }
            break;
        }
        case EventKind::member_announce: {
            auto& m = member();
            if (std::find(m.announced_prefixes.begin(), m.announced_prefixes.end(), e.prefix) ==
                m.announced_prefixes.end()) {
                m.announced_prefixes.push_back(e.prefix);
            }
            converge();
            break;
        }
        case EventKind::member_withdraw: {
            auto& prefixes = member().announced_prefixes;
            auto it = std::find(prefixes.begin(), prefixes.end(), e.prefix);
            if (it == prefixes.end()) {
                throw Error(ErrorCode::UNKNOWN_ENTITY, e.prefix.str() + " not announced by " + std::to_string(e.member));
            }
            prefixes.erase(it);
            converge();
            break;
        }
        case EventKind::port_add: {
            if (!e.new_member || !e.new_port || e.new_port->member != e.new_member->asn ||
                !scenario_.topology.has_node(e.new_port->attach_pe)) {
                throw Error(ErrorCode::UNKNOWN_ENTITY, "port_add needs a member, its port and a known PE");
            }
            if (scenario_.find_member(e.new_member->asn) != nullptr) {
                throw Error(ErrorCode::UNKNOWN_ENTITY, "member " + std::to_string(e.new_member->asn) + " exists");
            }
            scenario_.members.push_back(*e.new_member);
            scenario_.ports.push_back(*e.new_port);
            converge();
            break;
        }
    }
}

void Engine::run() {
    converge();
    for (const auto& e : scenario_.events) {
        apply_event(e);
    }
}

std::vector<PeeringSession> Engine::established_sessions() const {
    std::vector<PeeringSession> out;
    const auto v = view();
    for (const auto& rs : servers_) {
        for (const auto& s : rs.client_sessions) {
            if (session_established(s, v)) {
                out.push_back(s);
            }
        }
    }
    for (const auto& s : scenario_.sessions) {
        if (s.kind != SessionKind::route_server && session_established(s, v)) {
            out.push_back(s);
        }
    }
    return out;
}

ReachabilityMatrix Engine::reachability() const {
    return reachability_matrix(exchange_.ribs(), scenario_.members, scenario_.external_prefixes, fabric_, now_);
}

Report Engine::report() const {
    Report r;
    auto put = [&](const std::string& k, auto v) {
        if constexpr (std::is_convertible_v<decltype(v), std::string>) {
            r.values[k] = v;
        } else {
            r.values[k] = std::to_string(v);
        }
    };
    const auto n = scenario_.members.size();
    std::size_t rs_sessions = 0;
    for (const auto& rs : servers_) {
        rs_sessions += rs.client_sessions.size();
    }
    const auto established = established_sessions();

    put("bilateral_equivalent", n < 2 ? std::size_t{0} : n * (n - 1) / 2);
    put("convergence_rounds", total_rounds_);
    for (auto reason : {DropReason::QUARANTINED, DropReason::MAC_MISMATCH, DropReason::FORBIDDEN_TRAFFIC,
                        DropReason::MTU_EXCEEDED}) {
        auto it = fabric_.drops().find(reason);
        put("drops." + std::string(to_string(reason)), it == fabric_.drops().end() ? std::uint64_t{0} : it->second);
    }
    put("events_applied", events_applied_);
    put("ibgp_session_count", ibgp_.size());
    put("member_count", n);
    put("missing_transport", mesh_.diagnostics.size());
    put("node_count", scenario_.topology.nodes().size());
    put("pseudowire_count", mesh_.pseudowires.size());
    put("route_server_count", servers_.size());
    put("rs_session_count", rs_sessions);
    put("sessions_established", established.size());
    put("trace_records", fabric_.trace().size());
    put("upstream_announcements", exchange_.upstream().size());
    put("as_loop_diagnostics", exchange_.diagnostics().size());

    const auto matrix = reachability();
    std::string columns;
    for (const auto& c : matrix.columns) {
        columns += (columns.empty() ? "" : " ") + c.str();
    }
    put("reachability.columns", columns);
    put("reachability.cells", matrix.rows.size() * matrix.columns.size());
    put("reachability.reachable", matrix.true_count());
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        std::string bits;
        for (bool b : matrix.cells[i]) {
            bits += b ? '1' : '0';
        }
        put("reachability." + std::to_string(matrix.rows[i]), bits);
    }
    return r;
}

std::string Engine::rib_dump() const {
    return format_rib_dump(exchange_.ribs());
}

std::string Engine::trace_csv() const {
    return format_trace(fabric_.trace());
}

std::optional<DotLayer> parse_dot_layer(std::string_view name) {
    if (name == "physical") {
        return DotLayer::physical;
    }
    if (name == "vpls") {
        return DotLayer::vpls;
    }
    if (name == "peering") {
        return DotLayer::peering;
    }
    return std::nullopt;
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string export_dot(const Engine& engine, DotLayer layer) {
    std::ostringstream os;
    const auto& topo = engine.topology();
    switch (layer) {
        case DotLayer::physical: {
            os << "graph physical {\n";
            for (const auto& name : topo.node_names()) {
                const auto* n = topo.find_node(name);
                os << "  " << quoted(name) << " [label=" << quoted(name + "\\n" + n->loopback.str())
                   << (n->is_route_reflector ? ", shape=doublecircle" : "") << "];\n";
            }
            for (const auto& l : topo.links()) {
                os << "  " << quoted(l.endpoint_a) << " -- " << quoted(l.endpoint_b) << " [label="
                   << quoted(std::to_string(l.cost)) << ", color=" << (l.kind == LinkKind::leased ? "orange" : "black")
                   << ", style=" << (l.is_up() ? "solid" : "dotted") << "];\n";
            }
            break;
        }
        case DotLayer::vpls: {
            os << "graph vpls {\n";
            for (const auto& name : topo.node_names()) {
                os << "  " << quoted(name) << ";\n";
            }
            for (const auto& pw : engine.mesh().pseudowires) {
                os << "  " << quoted(pw.pe_a) << " -- " << quoted(pw.pe_b) << " [label="
                   << quoted(std::to_string(pw.label_a_to_b) + "/" + std::to_string(pw.label_b_to_a))
                   << ", style=dashed];\n";
            }
            break;
        }
        case DotLayer::peering: {
            os << "graph peering {\n";
            auto members = engine.scenario().members;
            std::sort(members.begin(), members.end(),
                      [](const MemberAs& a, const MemberAs& b) { return a.asn < b.asn; });
            for (const auto& m : members) {
                os << "  " << quoted("AS" + std::to_string(m.asn)) << " [label="
                   << quoted(std::to_string(m.asn) + "\\n" + m.name) << (m.is_transit ? ", shape=box" : "")
                   << "];\n";
            }
            for (const auto& rs : engine.route_servers()) {
                os << "  " << quoted("rs:" + rs.host_pe) << " [label="
                   << quoted("rs " + rs.host_pe + "\\n" + std::to_string(rs.service_asn)) << ", shape=diamond];\n";
            }
            auto established = engine.established_sessions();
            std::sort(established.begin(), established.end());
            auto sessions = engine.scenario().sessions;
            for (auto& s : sessions) {
                for (const auto& rs : engine.route_servers()) {
                    if (s.kind == SessionKind::route_server && s.rs_node == rs.host_pe) {
                        s.b = rs.service_asn;
                    }
                }
            }
            std::sort(sessions.begin(), sessions.end());
            for (const auto& s : sessions) {
                const bool up = std::binary_search(established.begin(), established.end(), s);
                const auto a = quoted("AS" + std::to_string(s.a));
                const auto b = s.kind == SessionKind::route_server ? quoted("rs:" + s.rs_node)
                                                                   : quoted("AS" + std::to_string(s.b));
                os << "  " << a << " -- " << b << " [label=" << quoted(std::string(to_string(s.kind)))
                   << ", style=" << (up ? (s.kind == SessionKind::transit ? "bold" : "solid") : "dotted")
                   << "];\n";
            }
            break;
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace remix

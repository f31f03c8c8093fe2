#include "remix/dataplane.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "remix/error.hpp"

namespace remix {

std::string_view to_string(EtherType type) {
    switch (type) {
        case EtherType::ipv4: return "ipv4";
        case EtherType::arp: return "arp";
        case EtherType::other: return "other";
    }
    return "other";
}

std::string Attachment::str() const {
    return is_port() ? "port:" + std::to_string(port) : "pw:" + remote_pe;
}

std::string_view to_string(DropReason reason) {
    switch (reason) {
        case DropReason::QUARANTINED: return "QUARANTINED";
        case DropReason::MAC_MISMATCH: return "MAC_MISMATCH";
        case DropReason::FORBIDDEN_TRAFFIC: return "FORBIDDEN_TRAFFIC";
        case DropReason::MTU_EXCEEDED: return "MTU_EXCEEDED";
    }
    return "UNKNOWN";
}

Emission make_emission(const EthernetFrame& frame, Attachment via) {
    std::uint32_t size = frame.payload_size + kEthernetOverhead;
    if (via.is_pseudowire()) {
        size += kMplsOverhead;
    }
    return Emission{frame, std::move(via), size};
}

std::optional<DropReason> policy_violation(const MemberPort& port, const EthernetFrame& frame) {
    if (frame.src_mac != port.nominated_mac) {
        return DropReason::MAC_MISMATCH;
    }
    const bool allowed = frame.dst_mac.is_unicast() ||
                         (frame.dst_mac.is_broadcast() && frame.ethertype == EtherType::arp);
    if (!allowed) {
        return DropReason::FORBIDDEN_TRAFFIC;
    }
    return std::nullopt;
}

std::optional<DropReason> ingress_filter(const MemberPort& port, const EthernetFrame& frame) {
    if (!port.is_active()) {
        return DropReason::QUARANTINED;
    }
    return policy_violation(port, frame);
}

bool BridgeState::is_local_mac(MacAddr mac) const {
    return std::any_of(attached_ports.begin(), attached_ports.end(),
                       [&](const MemberPort& p) { return p.nominated_mac == mac; });
}

std::vector<Emission> bridge_forward(BridgeState& bridge, const EthernetFrame& frame,
                                     const Attachment& arrived_via, Round now) {
    // A local port's MAC is never learned from a pseudo-wire.
    if (frame.src_mac.is_unicast() &&
        !(arrived_via.is_pseudowire() && bridge.is_local_mac(frame.src_mac))) {
        bridge.mac_table[frame.src_mac] = MacEntry{arrived_via, now};
    }

    std::vector<Emission> out;
    if (frame.dst_mac.is_unicast()) {
        auto it = bridge.mac_table.find(frame.dst_mac);
        if (it != bridge.mac_table.end() && now - it->second.learned_at >= bridge.mac_aging) {
            bridge.mac_table.erase(it);
            it = bridge.mac_table.end();
        }
        if (it != bridge.mac_table.end()) {
            const auto& via = it->second.via;
            const bool hairpin = via == arrived_via;
            const bool pw_to_pw = via.is_pseudowire() && arrived_via.is_pseudowire();
            if (!hairpin && !pw_to_pw) {
                out.push_back(make_emission(frame, via));
            }
            return out;
        }
    }

    for (const auto& p : bridge.attached_ports) {
        auto via = Attachment::local(p.member);
        if (via != arrived_via) {
            out.push_back(make_emission(frame, std::move(via)));
        }
    }
    if (arrived_via.is_port()) {
        for (const auto& remote : bridge.attached_pws) {
            out.push_back(make_emission(frame, Attachment::pseudowire(remote)));
        }
    }
    return out;
}

TransmitResult transmit(const Emission& emission, const Topology& topo, const LspPath* transport) {
    if (transport == nullptr) {
        return {emission.encapsulated_size <= kAccessMtu, std::nullopt};
    }
    for (const auto& hop : transport->hops) {
        if (emission.encapsulated_size > topo.link(hop.link).mtu) {
            return {false, hop.link};
        }
    }
    return {};
}

MemberPort promote_port(MemberPort port, std::span<const DropReason> observed) {
    const bool clean = std::none_of(observed.begin(), observed.end(), [](DropReason r) {
        return r == DropReason::MAC_MISMATCH || r == DropReason::FORBIDDEN_TRAFFIC;
    });
    if (clean) {
        port.state = PortState::active;
    }
    return port;
}

std::string format_trace(std::span<const TraceRecord> records) {
    std::ostringstream os;
    os << kTraceHeader << '\n';
    for (const auto& r : records) {
        os << r.round << ',' << r.trace_id << ',' << r.pe << ',' << r.via << ',' << r.action << '\n';
    }
    return os.str();
}

void Fabric::rebuild(const Topology& topo, std::span<const MemberPort> ports, const PseudowireMesh& mesh) {
    topo_ = topo;
    ports_.clear();
    for (const auto& p : ports) {
        ports_[p.member] = p;
    }

    transport_.clear();
    std::map<std::string, std::vector<std::string>> pws;
    for (const auto& pw : mesh.pseudowires) {
        pws[pw.pe_a].push_back(pw.pe_b);
        pws[pw.pe_b].push_back(pw.pe_a);
        transport_[{pw.pe_a, pw.pe_b}] = pw.transport_a_to_b;
        transport_[{pw.pe_b, pw.pe_a}] = pw.transport_b_to_a;
    }

    std::map<std::string, BridgeState> next;
    for (const auto& name : topo.node_names()) {
        auto& b = next[name];
        b.pe = name;
        b.mac_aging = mac_aging_;
        for (const auto& [asn, p] : ports_) {
            if (p.attach_pe == name) {
                b.attached_ports.push_back(p);
            }
        }
        b.attached_pws = pws[name];
        std::sort(b.attached_pws.begin(), b.attached_pws.end());

        if (auto old = bridges_.find(name); old != bridges_.end()) {
            for (const auto& [mac, entry] : old->second.mac_table) {
                const auto& via = entry.via;
                const bool survives =
                    via.is_port()
                        ? std::any_of(b.attached_ports.begin(), b.attached_ports.end(),
                                      [&](const MemberPort& p) { return p.member == via.port; })
                        : std::binary_search(b.attached_pws.begin(), b.attached_pws.end(), via.remote_pe);
                if (survives && !(via.is_pseudowire() && b.is_local_mac(mac))) {
                    b.mac_table.emplace(mac, entry);
                }
            }
        }
    }
    bridges_ = std::move(next);
}

void Fabric::record(Round round, TraceId id, const std::string& pe, const std::string& via, std::string action) {
    if (tracing_) {
        trace_.push_back({round, id, pe, via, std::move(action)});
    }
}

InjectOutcome Fabric::inject(Asn from, EthernetFrame frame, Round now) {
    auto pit = ports_.find(from);
    if (pit == ports_.end()) {
        throw Error(ErrorCode::UNKNOWN_ENTITY, "no port for member " + std::to_string(from));
    }
    const MemberPort& port = pit->second;
    if (frame.trace_id == 0) {
        frame.trace_id = next_trace_++;
    } else {
        next_trace_ = std::max(next_trace_, frame.trace_id + 1);
    }

    InjectOutcome outcome;
    outcome.trace_id = frame.trace_id;
    const auto ingress = Attachment::local(from);

    if (auto drop = ingress_filter(port, frame)) {
        ++drops_[*drop];
        outcome.ingress_drop = drop;
        if (*drop == DropReason::QUARANTINED) {
            if (auto violation = policy_violation(port, frame)) {
                probation_log_[from].emplace_back(now, *violation);
            }
        }
        record(now, frame.trace_id, port.attach_pe, ingress.str(), "drop:" + std::string(to_string(*drop)));
        return outcome;
    }
    record(now, frame.trace_id, port.attach_pe, ingress.str(), "accept");

    struct Arrival {
        std::string pe;
        Attachment via;
    };
    std::deque<Arrival> queue{{port.attach_pe, ingress}};
    while (!queue.empty()) {
        auto [pe, via] = std::move(queue.front());
        queue.pop_front();
        auto& bridge = bridges_.at(pe);
        for (auto& e : bridge_forward(bridge, frame, via, now)) {
            const LspPath* transport = nullptr;
            if (e.via.is_pseudowire()) {
                transport = &transport_.at({pe, e.via.remote_pe});
            }
            auto tx = transmit(e, topo_, transport);
            if (!tx.delivered) {
                ++drops_[DropReason::MTU_EXCEEDED];
                ++outcome.mtu_drops;
                record(now, frame.trace_id, pe, e.via.str(), "drop:MTU_EXCEEDED");
                continue;
            }
            if (e.via.is_port()) {
                outcome.reached.push_back(e.via.port);
                record(now, frame.trace_id, pe, e.via.str(), "deliver");
            } else {
                ++outcome.pseudowire_traversals;
                record(now, frame.trace_id, pe, e.via.str(), "send");
                record(now, frame.trace_id, e.via.remote_pe, Attachment::pseudowire(pe).str(), "receive");
                queue.push_back({e.via.remote_pe, Attachment::pseudowire(pe)});
            }
        }
    }
    return outcome;
}

const BridgeState* Fabric::bridge(const std::string& pe) const {
    auto it = bridges_.find(pe);
    return it == bridges_.end() ? nullptr : &it->second;
}

const MemberPort* Fabric::port(Asn member) const {
    auto it = ports_.find(member);
    return it == ports_.end() ? nullptr : &it->second;
}

std::vector<DropReason> Fabric::violations(Asn member, Round from, Round to) const {
    std::vector<DropReason> out;
    auto it = probation_log_.find(member);
    if (it == probation_log_.end()) {
        return out;
    }
    for (const auto& [round, reason] : it->second) {
        if (round >= from && round <= to) {
            out.push_back(reason);
        }
    }
    return out;
}

void Fabric::set_mac_aging(Round rounds) {
    mac_aging_ = rounds;
    for (auto& [name, b] : bridges_) {
        b.mac_aging = rounds;
    }
}

}  // namespace remix

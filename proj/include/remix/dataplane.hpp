#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remix/model.hpp"
#include "remix/vpls_signal.hpp"

namespace remix {

enum class EtherType { ipv4, arp, other };

std::string_view to_string(EtherType type);

using TraceId = std::uint64_t;

struct ArpPayload {
    enum class Op { request, reply };
    Op op = Op::request;
    Ipv4Addr sender_ip;
    MacAddr sender_mac;
    Ipv4Addr target_ip;
};

struct EthernetFrame {
    MacAddr src_mac;
    MacAddr dst_mac;
    EtherType ethertype = EtherType::ipv4;
    std::uint32_t payload_size = 0;
    TraceId trace_id = 0;  // 0: assigned by the fabric on injection
    std::optional<ArpPayload> arp;
};

/// Where a frame enters or leaves a virtual bridge: a local member port or
/// the pseudo-wire to a remote PE.
struct Attachment {
    enum class Kind { port, pseudowire };

    Kind kind = Kind::port;
    Asn port = 0;
    std::string remote_pe;

    static Attachment local(Asn member) { return {Kind::port, member, {}}; }
    static Attachment pseudowire(std::string remote) { return {Kind::pseudowire, 0, std::move(remote)}; }

    bool is_port() const { return kind == Kind::port; }
    bool is_pseudowire() const { return kind == Kind::pseudowire; }

    /// `port:<asn>` or `pw:<remote-pe>`.
    std::string str() const;

    friend auto operator<=>(const Attachment&, const Attachment&) = default;
};

enum class DropReason { QUARANTINED, MAC_MISMATCH, FORBIDDEN_TRAFFIC, MTU_EXCEEDED };

std::string_view to_string(DropReason reason);

inline constexpr std::uint32_t kEthernetOverhead = 18;
inline constexpr std::uint32_t kMplsOverhead = 8;  // transport + pseudo-wire label
/// MTU of a member's access link into its PE.
inline constexpr std::uint32_t kAccessMtu = 1600;
inline constexpr Round kDefaultMacAging = 300;
inline constexpr Round kQuarantineWindow = 10;

struct Emission {
    EthernetFrame frame;
    Attachment via;
    std::uint32_t encapsulated_size = 0;
};

Emission make_emission(const EthernetFrame& frame, Attachment via);

/// Member-port policy ignoring the port state: nominated source MAC, and
/// only unicast or ARP broadcast destinations.
std::optional<DropReason> policy_violation(const MemberPort& port, const EthernetFrame& frame);

/// Edge admission check; nullopt means accept. A quarantined port drops
/// everything with QUARANTINED before the policy is consulted.
std::optional<DropReason> ingress_filter(const MemberPort& port, const EthernetFrame& frame);

struct MacEntry {
    Attachment via;
    Round learned_at = 0;
};

struct BridgeState {
    std::string pe;
    std::map<MacAddr, MacEntry> mac_table;
    std::vector<MemberPort> attached_ports;  // sorted by member ASN
    std::vector<std::string> attached_pws;   // remote PE names, sorted
    Round mac_aging = kDefaultMacAging;

    bool is_local_mac(MacAddr mac) const;
};

/// MAC learning and forwarding at one virtual bridge. Frames from a
/// pseudo-wire are only ever flooded to local ports (split horizon), and a
/// known destination behind the arrival attachment is not echoed back.
/// Entries older than `mac_aging` rounds count as unknown.
std::vector<Emission> bridge_forward(BridgeState& bridge, const EthernetFrame& frame,
                                     const Attachment& arrived_via, Round now);

struct TransmitResult {
    bool delivered = true;
    std::optional<LinkId> offending_link;  // set on MTU_EXCEEDED over a pseudo-wire
};

/// Checks the encapsulated size against every link of `transport`, or
/// against the access MTU when `transport` is null (local port).
TransmitResult transmit(const Emission& emission, const Topology& topo, const LspPath* transport);

/// Leaves quarantine iff the window holds no MAC_MISMATCH or
/// FORBIDDEN_TRAFFIC. Silence is compliant.
MemberPort promote_port(MemberPort port, std::span<const DropReason> observed);

struct TraceRecord {
    Round round = 0;
    TraceId trace_id = 0;
    std::string pe;
    std::string via;
    std::string action;
};

inline constexpr std::string_view kTraceHeader = "round,trace_id,pe,via,action";

/// Trace log in CSV form, header included.
std::string format_trace(std::span<const TraceRecord> records);

struct InjectOutcome {
    TraceId trace_id = 0;
    std::optional<DropReason> ingress_drop;
    std::vector<Asn> reached;  // ports the frame was delivered to, in order
    std::size_t mtu_drops = 0;
    std::size_t pseudowire_traversals = 0;
};

/// The distributed E-LAN: one bridge per PE joined by the pseudo-wire mesh.
class Fabric {
public:
    /// Re-attaches ports and pseudo-wires after a control-plane change. MAC
    /// entries pointing at attachments that no longer exist are flushed.
    void rebuild(const Topology& topo, std::span<const MemberPort> ports, const PseudowireMesh& mesh);

    /// Runs one frame from a member port through the fabric to completion.
    InjectOutcome inject(Asn from, EthernetFrame frame, Round now);

    const BridgeState* bridge(const std::string& pe) const;
    const std::map<std::string, BridgeState>& bridges() const { return bridges_; }
    const MemberPort* port(Asn member) const;

    const std::vector<TraceRecord>& trace() const { return trace_; }
    const std::map<DropReason, std::uint64_t>& drops() const { return drops_; }

    /// Policy violations seen on quarantined ports, for promotion checks.
    std::vector<DropReason> violations(Asn member, Round from, Round to) const;

    void set_mac_aging(Round rounds);
    void set_tracing(bool on) { tracing_ = on; }

private:
    void record(Round round, TraceId id, const std::string& pe, const std::string& via, std::string action);

    Topology topo_;
    std::map<std::string, BridgeState> bridges_;
    std::map<Asn, MemberPort> ports_;
    std::map<std::pair<std::string, std::string>, LspPath> transport_;  // (from, to)
    std::vector<TraceRecord> trace_;
    std::map<DropReason, std::uint64_t> drops_;
    std::map<Asn, std::vector<std::pair<Round, DropReason>>> probation_log_;
    TraceId next_trace_ = 1;
    Round mac_aging_ = kDefaultMacAging;
    bool tracing_ = true;
};

}  // namespace remix

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "remix/dataplane.hpp"
#include "remix/error.hpp"

namespace remix {
namespace {

MacAddr mac(std::uint64_t n) { return MacAddr(0x0200'5e00'0000ULL + n); }

MemberPort port(Asn asn, std::string pe, PortState state = PortState::active) {
    return MemberPort{asn, std::move(pe), mac(asn - 64500 + 1), Ipv4Addr(0xc0000200u + (asn - 64500) + 10), state};
}

EthernetFrame frame(MacAddr src, MacAddr dst, EtherType type = EtherType::ipv4, std::uint32_t size = 100) {
    return EthernetFrame{src, dst, type, size, 0, std::nullopt};
}

TEST(IngressFilter, PolicyOutcomes) {
    auto p = port(64500, "a");
    EXPECT_EQ(ingress_filter(p, frame(p.nominated_mac, mac(9))), std::nullopt);
    EXPECT_EQ(ingress_filter(p, frame(p.nominated_mac, MacAddr::broadcast(), EtherType::arp)), std::nullopt);
    EXPECT_EQ(ingress_filter(p, frame(p.nominated_mac, MacAddr::broadcast(), EtherType::other)),
              DropReason::FORBIDDEN_TRAFFIC);
    EXPECT_EQ(ingress_filter(p, frame(p.nominated_mac, MacAddr::broadcast(), EtherType::ipv4)),
              DropReason::FORBIDDEN_TRAFFIC);
    EXPECT_EQ(ingress_filter(p, frame(p.nominated_mac, *MacAddr::parse("01:00:5e:00:00:fb"), EtherType::arp)),
              DropReason::FORBIDDEN_TRAFFIC);
    EXPECT_EQ(ingress_filter(p, frame(mac(77), mac(9))), DropReason::MAC_MISMATCH);
    auto q = port(64501, "a", PortState::quarantine);
    EXPECT_EQ(ingress_filter(q, frame(q.nominated_mac, mac(9))), DropReason::QUARANTINED);
    EXPECT_EQ(policy_violation(q, frame(mac(77), mac(9))), DropReason::MAC_MISMATCH);
}

BridgeState bridge_with(std::size_t local_ports, std::size_t pws) {
    BridgeState b;
    b.pe = "pe";
    for (std::size_t i = 0; i < local_ports; ++i) {
        b.attached_ports.push_back(port(64500 + static_cast<Asn>(i), "pe"));
    }
    for (std::size_t i = 0; i < pws; ++i) {
        b.attached_pws.push_back("r" + std::to_string(i));
    }
    return b;
}

TEST(BridgeForward, FloodFromLocalPortReachesPortsAndPseudowires) {
    auto b = bridge_with(2, 7);
    const auto& src = b.attached_ports[0];
    auto out = bridge_forward(b, frame(src.nominated_mac, mac(99)), Attachment::local(src.member), 1);
    // One other local port plus every pseudo-wire.
    EXPECT_EQ(out.size(), (2u - 1u) + 7u);
    EXPECT_EQ(std::count_if(out.begin(), out.end(), [](const Emission& e) { return e.via.is_pseudowire(); }), 7);
    EXPECT_EQ(b.mac_table.at(src.nominated_mac).via, Attachment::local(src.member));
}

TEST(BridgeForward, SplitHorizonOnPseudowireArrival) {
    auto b = bridge_with(2, 7);
    auto out = bridge_forward(b, frame(mac(50), MacAddr::broadcast(), EtherType::arp), Attachment::pseudowire("r3"), 1);
    EXPECT_EQ(out.size(), 2u);
    for (const auto& e : out) {
        EXPECT_TRUE(e.via.is_port());
    }
    EXPECT_EQ(b.mac_table.at(mac(50)).via, Attachment::pseudowire("r3"));
}

TEST(BridgeForward, KnownUnicastGoesOneWayAndNeverHairpins) {
    auto b = bridge_with(2, 3);
    const auto& p0 = b.attached_ports[0];
    const auto& p1 = b.attached_ports[1];
    bridge_forward(b, frame(p1.nominated_mac, mac(99)), Attachment::local(p1.member), 1);
    auto out = bridge_forward(b, frame(p0.nominated_mac, p1.nominated_mac), Attachment::local(p0.member), 2);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].via, Attachment::local(p1.member));

    bridge_forward(b, frame(mac(60), mac(99)), Attachment::pseudowire("r1"), 3);
    EXPECT_TRUE(bridge_forward(b, frame(mac(61), mac(60)), Attachment::pseudowire("r1"), 3).empty());
    // pseudo-wire to pseudo-wire is never forwarded either
    EXPECT_TRUE(bridge_forward(b, frame(mac(61), mac(60)), Attachment::pseudowire("r2"), 3).empty());
}

TEST(BridgeForward, LocalMacNotLearnedFromPseudowire) {
    auto b = bridge_with(1, 2);
    const auto& p0 = b.attached_ports[0];
    bridge_forward(b, frame(p0.nominated_mac, mac(99)), Attachment::pseudowire("r0"), 1);
    EXPECT_FALSE(b.mac_table.contains(p0.nominated_mac));
}

TEST(BridgeForward, AgedEntriesFlood) {
    auto b = bridge_with(1, 2);
    b.mac_aging = 300;
    bridge_forward(b, frame(mac(60), mac(99)), Attachment::pseudowire("r0"), 10);
    const auto& p0 = b.attached_ports[0];
    EXPECT_EQ(bridge_forward(b, frame(p0.nominated_mac, mac(60)), Attachment::local(p0.member), 309).size(), 1u);
    EXPECT_EQ(bridge_forward(b, frame(p0.nominated_mac, mac(60)), Attachment::local(p0.member), 310).size(), 2u);
}

TEST(Transmit, MtuArithmetic) {
    Topology t;
    t.add_node({"a", Ipv4Addr(1), true, false});
    t.add_node({"b", Ipv4Addr(2), false, false});
    t.add_node({"c", Ipv4Addr(3), false, false});
    t.add_link({"a", "b", 1, 1600, LinkKind::radio, LinkState::up});
    t.add_link({"b", "c", 1, 1600, LinkKind::radio, LinkState::up});
    LspPath lsp{"a", "c", {{"a", 17, 0}, {"b", kImplicitNull, 1}}};
    auto pw = Attachment::pseudowire("c");

    auto e1500 = make_emission(frame(mac(1), mac(2), EtherType::ipv4, 1500), pw);
    EXPECT_EQ(e1500.encapsulated_size, 1526u);
    EXPECT_TRUE(transmit(e1500, t, &lsp).delivered);

    auto e1580 = make_emission(frame(mac(1), mac(2), EtherType::ipv4, 1580), pw);
    EXPECT_EQ(e1580.encapsulated_size, 1606u);
    auto r = transmit(e1580, t, &lsp);
    EXPECT_FALSE(r.delivered);
    EXPECT_EQ(r.offending_link, LinkId{0});

    auto e1574 = make_emission(frame(mac(1), mac(2), EtherType::ipv4, 1574), pw);
    EXPECT_EQ(e1574.encapsulated_size, 1600u);
    EXPECT_TRUE(transmit(e1574, t, &lsp).delivered);

    EXPECT_TRUE(transmit(make_emission(frame(mac(1), mac(2), EtherType::ipv4, 0), pw), t, &lsp).delivered);

    auto local = make_emission(frame(mac(1), mac(2), EtherType::ipv4, 1500), Attachment::local(64500));
    EXPECT_EQ(local.encapsulated_size, 1518u);
    EXPECT_TRUE(transmit(local, t, nullptr).delivered);
}

TEST(PromotePort, Window) {
    auto q = port(64500, "a", PortState::quarantine);
    EXPECT_TRUE(promote_port(q, {}).is_active());
    std::vector<DropReason> clean{DropReason::QUARANTINED, DropReason::MTU_EXCEEDED};
    EXPECT_TRUE(promote_port(q, clean).is_active());
    std::vector<DropReason> bad{DropReason::MAC_MISMATCH};
    EXPECT_FALSE(promote_port(q, bad).is_active());
    std::vector<DropReason> forbidden{DropReason::FORBIDDEN_TRAFFIC};
    EXPECT_FALSE(promote_port(q, forbidden).is_active());
}

TEST(FormatTrace, HeaderAndColumns) {
    std::vector<TraceRecord> recs{{3, 7, "eigg", "port:64500", "accept"}};
    EXPECT_EQ(format_trace(recs), "round,trace_id,pe,via,action\n3,7,eigg,port:64500,accept\n");
}

// Fabric over a random connected topology, one member per node.
struct FabricFixture {
    Topology topo;
    std::vector<MemberPort> ports;
    Fabric fabric;

    explicit FabricFixture(std::mt19937& rng, std::size_t pes) {
        topo = oracle::random_topology(rng, pes, rng() % 5);
        auto names = topo.node_names();
        for (std::size_t i = 0; i < names.size(); ++i) {
            ports.push_back(port(64500 + static_cast<Asn>(i), names[i]));
        }
        auto trees = compute_all_spf(topo);
        auto labels = allocate_labels(topo, trees);
        auto adverts = originate_adverts(names, labels);
        auto mesh = derive_pseudowires(propagate(adverts, build_session_graph(topo)), labels, trees);
        fabric.rebuild(topo, ports, mesh);
    }
};

TEST(Fabric, LearningThenUnicastDoesNotFlood) {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        FabricFixture f(rng, 2 + rng() % 8);
        const auto& x = f.ports[rng() % f.ports.size()];
        f.fabric.inject(x.member, frame(x.nominated_mac, MacAddr::broadcast(), EtherType::arp), 1);
        for (const auto& y : f.ports) {
            if (y.member == x.member) continue;
            auto out = f.fabric.inject(y.member, frame(y.nominated_mac, x.nominated_mac), 2);
            EXPECT_EQ(out.reached, std::vector<Asn>{x.member});
            EXPECT_LE(out.pseudowire_traversals, 1u);
        }
    }
}

TEST(Fabric, MacTableEntriesComeFromObservedFrames) {
    std::mt19937 rng(13);
    FabricFixture f(rng, 7);
    std::map<TraceId, MacAddr> sources;
    for (int i = 0; i < 40; ++i) {
        const auto& src = f.ports[rng() % f.ports.size()];
        const auto& dst = f.ports[rng() % f.ports.size()];
        auto dst_mac = rng() % 3 == 0 ? MacAddr::broadcast() : dst.nominated_mac;
        auto type = dst_mac.is_broadcast() ? EtherType::arp : EtherType::ipv4;
        auto out = f.fabric.inject(src.member, frame(src.nominated_mac, dst_mac, type), static_cast<Round>(i));
        sources[out.trace_id] = src.nominated_mac;
    }
    std::set<std::tuple<std::string, std::string, MacAddr>> observed;  // pe, via, src
    for (const auto& r : f.fabric.trace()) {
        if (r.action == "accept" || r.action == "receive") {
            observed.emplace(r.pe, r.via, sources.at(r.trace_id));
        }
    }
    for (const auto& [pe, bridge] : f.fabric.bridges()) {
        for (const auto& [m, entry] : bridge.mac_table) {
            EXPECT_TRUE(observed.contains({pe, entry.via.str(), m})) << pe << " " << m.str();
        }
    }
}

TEST(Fabric, QuarantinedPortLogsViolations) {
    std::mt19937 rng(14);
    FabricFixture f(rng, 3);
    auto ports = f.ports;
    ports[0].state = PortState::quarantine;
    PseudowireMesh empty;
    f.fabric.rebuild(f.topo, ports, empty);
    auto out = f.fabric.inject(ports[0].member, frame(mac(99), mac(5)), 4);
    EXPECT_EQ(out.ingress_drop, DropReason::QUARANTINED);
    EXPECT_EQ(f.fabric.violations(ports[0].member, 0, 10), std::vector<DropReason>{DropReason::MAC_MISMATCH});
    EXPECT_TRUE(f.fabric.violations(ports[0].member, 5, 10).empty());
    EXPECT_EQ(f.fabric.drops().at(DropReason::QUARANTINED), 1u);
    EXPECT_THROW(f.fabric.inject(1, frame(mac(1), mac(2)), 4), Error);
}

}  // namespace
}  // namespace remix

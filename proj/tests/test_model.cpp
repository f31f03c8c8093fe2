#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "remix/model.hpp"

namespace remix {
namespace {

Ipv4Addr ip(const char* s) { return *Ipv4Addr::parse(s); }
Ipv4Prefix pfx(const char* s) { return *Ipv4Prefix::parse(s); }
MacAddr mac(const char* s) { return *MacAddr::parse(s); }

Link radio(std::string a, std::string b, std::uint32_t cost = 10, std::uint32_t mtu = 1600) {
    return Link{std::move(a), std::move(b), cost, mtu, LinkKind::radio, LinkState::up};
}

Topology line3() {
    Topology t;
    t.add_node({"a", ip("172.16.0.1"), true, false});
    t.add_node({"b", ip("172.16.0.2"), false, false});
    t.add_node({"c", ip("172.16.0.3"), false, false});
    t.add_link(radio("a", "b"));
    t.add_link(radio("b", "c"));
    return t;
}

TEST(Addressing, ParsesAndFormats) {
    EXPECT_EQ(ip("192.0.2.1").str(), "192.0.2.1");
    EXPECT_FALSE(Ipv4Addr::parse("192.0.2"));
    EXPECT_FALSE(Ipv4Addr::parse("192.0.2.256"));
    EXPECT_FALSE(Ipv4Addr::parse("1.2.3.4.5"));
    EXPECT_EQ(pfx("10.66.0.0/20").str(), "10.66.0.0/20");
    EXPECT_FALSE(Ipv4Prefix::parse("10.66.0.1/20"));  // host bits
    EXPECT_FALSE(Ipv4Prefix::parse("10.0.0.0/33"));
    EXPECT_EQ(mac("02:00:5E:00:00:0a").str(), "02:00:5e:00:00:0a");
    EXPECT_FALSE(MacAddr::parse("02:00:5e:00:00"));
    EXPECT_TRUE(MacAddr::broadcast().is_broadcast());
    EXPECT_TRUE(mac("01:00:5e:00:00:01").is_group());
}

TEST(Addressing, PrefixContainment) {
    EXPECT_TRUE(kDefaultRoute.contains(ip("8.8.8.8")));
    EXPECT_TRUE(pfx("10.66.0.0/16").contains(pfx("10.66.16.0/20")));
    EXPECT_FALSE(pfx("10.66.16.0/20").contains(pfx("10.66.0.0/16")));
    EXPECT_TRUE(pfx("10.66.16.0/20").overlaps(pfx("10.66.0.0/16")));
    EXPECT_FALSE(pfx("10.66.16.0/20").overlaps(pfx("10.66.32.0/20")));
    EXPECT_TRUE(ip("172.20.1.1").is_private());
    EXPECT_FALSE(ip("192.0.2.1").is_private());
}

TEST(ValidateTopology, CleanInputIsEmpty) {
    std::vector<MemberAs> members{{64500, "x", false, {pfx("10.66.0.0/20")}}};
    std::vector<MemberPort> ports{{64500, "a", mac("02:00:00:00:00:01"), ip("192.0.2.1"), PortState::active}};
    EXPECT_TRUE(validate_topology(line3(), members, ports, pfx("192.0.2.0/24")).ok());
}

TEST(ValidateTopology, DuplicateLoopback) {
    Topology t;
    t.add_node({"a", ip("172.16.0.1"), true, false});
    t.add_node({"b", ip("172.16.0.1"), false, false});
    EXPECT_TRUE(validate_topology(t, {}, {}).contains(ViolationCode::DUP_LOOPBACK));
}

TEST(ValidateTopology, MtuBelowFabricMinimum) {
    auto t = line3();
    t.add_link(radio("a", "c", 10, 1500));
    auto r = validate_topology(t, {}, {});
    EXPECT_EQ(r.count(ViolationCode::MTU_TOO_SMALL), 1u);
}

TEST(ValidateTopology, PrivateAsn) {
    std::vector<MemberAs> members{{64512, "p", false, {}}, {65534, "q", false, {}}, {64511, "ok", false, {}}};
    auto r = validate_topology(line3(), members, {});
    EXPECT_EQ(r.count(ViolationCode::PRIVATE_ASN), 2u);
}

TEST(ValidateTopology, StructuralViolations) {
    Topology t;
    t.add_node({"a", ip("172.16.0.1"), false, false});
    t.add_node({"a", ip("172.16.0.2"), false, false});
    t.add_link(radio("a", "a"));
    t.add_link(radio("a", "zz", 0));
    std::vector<MemberAs> members{{64500, "x", false, {pfx("10.0.0.0/16")}},
                                  {64501, "y", false, {pfx("10.0.1.0/24")}},
                                  {64500, "dup", false, {}}};
    std::vector<MemberPort> ports{
        {64500, "a", mac("02:00:00:00:00:01"), ip("192.0.2.1"), PortState::active},
        {64501, "nowhere", mac("02:00:00:00:00:01"), ip("198.51.100.1"), PortState::active},
        {64999, "a", mac("01:00:00:00:00:02"), ip("192.0.2.1"), PortState::active},
    };
    auto r = validate_topology(t, members, ports, pfx("192.0.2.0/24"));
    for (auto code : {ViolationCode::DUP_NODE, ViolationCode::NO_REFLECTOR, ViolationCode::SELF_LOOP,
                      ViolationCode::UNKNOWN_ENDPOINT, ViolationCode::BAD_COST, ViolationCode::DUP_ASN,
                      ViolationCode::PREFIX_OVERLAP, ViolationCode::UNKNOWN_MEMBER, ViolationCode::UNKNOWN_ATTACH_PE,
                      ViolationCode::GROUP_MAC, ViolationCode::DUP_MAC, ViolationCode::DUP_EXCHANGE_IP,
                      ViolationCode::IP_OUTSIDE_EXCHANGE}) {
        EXPECT_TRUE(r.contains(code)) << to_string(code);
    }
}

TEST(ValidateTopology, PrivateExchangePrefix) {
    auto r = validate_topology(line3(), {}, {}, pfx("10.1.0.0/24"));
    EXPECT_TRUE(r.contains(ViolationCode::PRIVATE_EXCHANGE_PREFIX));
}

// Permuting the inputs never changes the violation multiset.
TEST(ValidateTopology, OrderInsensitiveAndIdempotent) {
    std::mt19937 rng(7);
    Topology base;
    std::vector<PeNode> nodes{{"a", ip("172.16.0.1"), false, false},
                              {"b", ip("172.16.0.1"), false, false},
                              {"c", ip("172.16.0.3"), false, false},
                              {"c", ip("172.16.0.4"), false, false}};
    std::vector<Link> links{radio("a", "b", 1, 1500), radio("b", "c"), radio("c", "c"), radio("a", "q", 0)};
    std::vector<MemberAs> members{{64512, "p", false, {pfx("10.0.0.0/8")}}, {64500, "q", false, {pfx("10.1.0.0/16")}}};
    std::vector<MemberPort> ports{{64500, "a", mac("02:00:00:00:00:01"), ip("192.0.2.1"), PortState::active},
                                  {64512, "b", mac("02:00:00:00:00:01"), ip("192.0.2.1"), PortState::active}};

    auto build = [&] {
        Topology t;
        for (const auto& n : nodes) t.add_node(n);
        for (const auto& l : links) t.add_link(l);
        return t;
    };
    const auto reference = validate_topology(build(), members, ports);
    EXPECT_FALSE(reference.ok());
    EXPECT_EQ(validate_topology(build(), members, ports).violations, reference.violations);
    for (int i = 0; i < 50; ++i) {
        std::shuffle(nodes.begin(), nodes.end(), rng);
        std::shuffle(links.begin(), links.end(), rng);
        std::shuffle(members.begin(), members.end(), rng);
        std::shuffle(ports.begin(), ports.end(), rng);
        EXPECT_EQ(validate_topology(build(), members, ports).violations, reference.violations);
    }
}

TEST(ConnectedComponents, SingleNode) {
    Topology t;
    t.add_node({"solo", ip("172.16.0.1"), true, false});
    auto c = connected_components(t);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0], std::vector<std::string>{"solo"});
}

TEST(ConnectedComponents, LineWithCutLink) {
    auto t = line3();
    t.link(1).state = LinkState::down;
    auto c = connected_components(t);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(c[1], (std::vector<std::string>{"c"}));
}

TEST(ConnectedComponents, PartitionMatchesOracle) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto t = oracle::random_topology(rng, 1 + rng() % 12, rng() % 6);
        for (LinkId id = 0; id < t.links().size(); ++id) {
            if (rng() % 3 == 0) {
                t.link(id).state = LinkState::down;
            }
        }
        const auto labels = oracle::component_labels(t);
        const auto comps = connected_components(t);

        std::set<std::string> seen;
        std::string prev_first;
        for (const auto& comp : comps) {
            ASSERT_FALSE(comp.empty());
            EXPECT_TRUE(std::is_sorted(comp.begin(), comp.end()));
            EXPECT_LT(prev_first, comp.front());
            prev_first = comp.front();
            for (const auto& n : comp) {
                EXPECT_TRUE(seen.insert(n).second) << "node in two components";
                EXPECT_EQ(labels.at(n), comp.front());
            }
        }
        EXPECT_EQ(seen.size(), t.nodes().size());
    }
}

TEST(FullMeshSize, SmallValues) {
    EXPECT_EQ(full_mesh_size(0), 0u);
    EXPECT_EQ(full_mesh_size(1), 0u);
    EXPECT_EQ(full_mesh_size(2), 1u);
    EXPECT_EQ(full_mesh_size(8), 28u);
}

TEST(FullMeshSize, MatchesPairEnumeration) {
    for (std::size_t n = 0; n <= 64; ++n) {
        EXPECT_EQ(full_mesh_size(n), oracle::enumerate_pairs(n)) << n;
    }
}

}  // namespace
}  // namespace remix

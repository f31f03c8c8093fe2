#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "remix/dataplane.hpp"
#include "remix/exchange_l3.hpp"
#include "remix/scenario.hpp"
#include "remix/underlay.hpp"
#include "remix/vpls_signal.hpp"

namespace remix {

struct EngineOptions {
    std::optional<std::size_t> max_rounds;  // default 4 * (nodes + members)
    Round mac_aging = kDefaultMacAging;
};

/// Sorted key=value lines.
struct Report {
    std::map<std::string, std::string> values;

    std::string str() const;
    std::optional<std::string> get(const std::string& key) const;
};

/// One strictly sequential simulation of a scenario. Control-plane state is
/// recomputed globally on every convergence; bridges and RIBs persist across
/// events.
class Engine {
public:
    explicit Engine(Scenario scenario, EngineOptions options = {});

    /// SPF, LDP, iBGP signalling, pseudo-wires, then BGP rounds until no RIB
    /// changes. Returns the number of rounds that changed a RIB. Throws
    /// Error(NONCONVERGENCE) past the round cap.
    std::size_t converge();

    /// Applies one event at its round. Inject events only touch the data
    /// plane; everything else reconverges. Throws Error(UNKNOWN_ENTITY).
    void apply_event(const Event& event);

    /// converge() then every scenario event in order.
    void run();

    const Scenario& scenario() const { return scenario_; }
    const Topology& topology() const { return scenario_.topology; }
    const SpfTrees& spf() const { return trees_; }
    const LabelTable& labels() const { return labels_; }
    const std::vector<IbgpSession>& ibgp_sessions() const { return ibgp_; }
    const std::vector<VplsAdvert>& adverts() const { return adverts_; }
    const ReceivedAdverts& received_adverts() const { return received_; }
    const PseudowireMesh& mesh() const { return mesh_; }
    const std::vector<RouteServer>& route_servers() const { return servers_; }
    const RouteExchange& exchange() const { return exchange_; }
    const Fabric& fabric() const { return fabric_; }
    Fabric& fabric() { return fabric_; }

    Round now() const { return now_; }
    std::size_t total_rounds() const { return total_rounds_; }
    std::size_t round_cap() const;
    bool same_component(const std::string& a, const std::string& b) const;

    /// Sessions whose endpoints are currently up.
    std::vector<PeeringSession> established_sessions() const;

    ReachabilityMatrix reachability() const;
    Report report() const;
    std::string rib_dump() const;
    std::string trace_csv() const;

private:
    ExchangeView view() const;

    Scenario scenario_;
    EngineOptions options_;
    SpfTrees trees_;
    LabelTable labels_;
    std::vector<IbgpSession> ibgp_;
    std::vector<VplsAdvert> adverts_;
    ReceivedAdverts received_;
    PseudowireMesh mesh_;
    std::vector<RouteServer> servers_;
    std::map<std::string, std::size_t> component_of_;
    RouteExchange exchange_;
    Fabric fabric_;
    Round now_ = 0;
    std::size_t total_rounds_ = 0;
    std::size_t events_applied_ = 0;
};

enum class DotLayer { physical, vpls, peering };

std::optional<DotLayer> parse_dot_layer(std::string_view name);

/// Graphviz rendering of one layer with nodes and edges in a fixed order.
std::string export_dot(const Engine& engine, DotLayer layer);

}  // namespace remix

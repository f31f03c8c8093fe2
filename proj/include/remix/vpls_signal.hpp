#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remix/model.hpp"
#include "remix/underlay.hpp"

namespace remix {

enum class IbgpKind { rr_client, rr_to_rr };

struct IbgpSession {
    std::string a;
    std::string b;
    IbgpKind kind = IbgpKind::rr_client;

    friend auto operator<=>(const IbgpSession&, const IbgpSession&) = default;
};

/// iBGP sessions through the route reflectors: every client peers with every
/// reflector, reflectors are fully meshed. For P nodes and R reflectors this
/// yields R*(P-R) + R*(R-1)/2 sessions. Sorted; `a` is the reflector side of
/// client sessions and the smaller name of reflector pairs.
///
/// Throws Error(NO_REFLECTOR) when P >= 2 and no node is flagged.
std::vector<IbgpSession> build_session_graph(const Topology& topo);

/// Closed form of the session count, for reporting.
constexpr std::size_t ibgp_session_count(std::size_t nodes, std::size_t reflectors) {
    if (reflectors == 0) {
        return 0;
    }
    return reflectors * (nodes - reflectors) + reflectors * (reflectors - 1) / 2;
}

/// Membership advertisement of one PE in the exchange VPLS: a single label
/// block [label_base, label_base + block_size) indexed by VE ID from
/// block_offset.
struct VplsAdvert {
    std::string origin_pe;
    std::uint32_t ve_id = 0;
    Label label_base = 0;
    std::uint32_t block_offset = 1;
    std::uint32_t block_size = 0;

    friend auto operator<=>(const VplsAdvert&, const VplsAdvert&) = default;
};

/// VE IDs 1..P in name order; each PE's label block comes from its own label
/// space starting at `labels.next_free(pe)`. Returns adverts in name order.
std::vector<VplsAdvert> originate_adverts(std::span<const std::string> pes, const LabelTable& labels);
std::vector<VplsAdvert> originate_adverts(std::span<const std::string> pes);

using ReceivedAdverts = std::map<std::string, std::vector<VplsAdvert>>;

/// Floods adverts over the session graph with route-reflector rules until
/// nothing new is learned. Each node's list excludes its own advert and is
/// sorted by origin.
ReceivedAdverts propagate(std::span<const VplsAdvert> adverts, std::span<const IbgpSession> sessions);

/// Demultiplexor label a PE with `sender_ve_id` must push towards the PE that
/// originated `receiver`.
Label pseudowire_label(const VplsAdvert& receiver, std::uint32_t sender_ve_id);

struct Pseudowire {
    std::string pe_a;  // pe_a < pe_b
    std::string pe_b;
    Label label_a_to_b = 0;
    Label label_b_to_a = 0;
    LspPath transport_a_to_b;
    LspPath transport_b_to_a;

    friend bool operator==(const Pseudowire&, const Pseudowire&) = default;
};

struct PairDiagnostic {
    std::string code;  // MISSING_TRANSPORT
    std::string pe_a;
    std::string pe_b;

    friend auto operator<=>(const PairDiagnostic&, const PairDiagnostic&) = default;
};

struct PseudowireMesh {
    std::vector<Pseudowire> pseudowires;  // sorted by (pe_a, pe_b)
    std::vector<PairDiagnostic> diagnostics;

    const Pseudowire* find(const std::string& x, const std::string& y) const;
};

/// One pseudo-wire per unordered pair of PEs that hold each other's advert
/// and have an LSP in both directions; pairs lacking transport are reported
/// as MISSING_TRANSPORT.
PseudowireMesh derive_pseudowires(const ReceivedAdverts& received, const LabelTable& bindings,
                                  const SpfTrees& trees);

}  // namespace remix

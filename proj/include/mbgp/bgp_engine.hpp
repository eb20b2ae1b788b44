#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mbgp/net.hpp"

namespace mbgp::bgp {

enum class Origin : uint8_t { Igp = 0, Egp = 1, Incomplete = 2 };
enum class Protocol : uint8_t { Ebgp, Ibgp };

// One path for a prefix as learnt from a neighbor, carrying the attribute
// vector the decision process ranks on. neighbor_as must equal the first
// element of as_path.
struct RouteCandidate {
    Ipv4 next_hop;
    uint32_t neighbor_as = 0;
    std::vector<uint32_t> as_path;
    uint32_t loc_pref = 100;
    uint32_t weight = 0;
    Origin origin = Origin::Igp;
    uint32_t med = 0;
    Protocol protocol = Protocol::Ebgp;
    uint32_t igp_metric = 0;
    Ipv4 router_id;
};

enum class Ordering { APreferred, BPreferred, Tie };

// Decision ladder, evaluated in strict order until one rung differs:
// higher weight, higher loc_pref, shorter as_path, lower origin, lower MED
// (only when both routes come from the same neighbor AS), eBGP over iBGP,
// lower IGP metric. Router ID is deliberately not part of the ladder; it is
// the residual tie-break applied at installation time.
Ordering compare_routes(const RouteCandidate& a, const RouteCandidate& b);

// Routes installed for one prefix. routes are sorted ascending by next_hop
// (the order the per-flow hash indexes into); best_index marks the route
// that wins the residual router-ID tie-break.
struct InstalledRouteSet {
    Prefix prefix;
    std::vector<RouteCandidate> routes;
    size_t best_index = 0;
    bool multipath = false;

    const RouteCandidate& best() const { return routes[best_index]; }
};

// Picks the installed set out of all candidates for a prefix. The top group
// is the set of candidates no other candidate beats; multipath applies only
// when that group has eBGP members sharing the best route's neighbor AS.
// Throws Error(Errc::NoRoutes) on an empty candidate set.
InstalledRouteSet select_installed(std::vector<RouteCandidate> candidates,
                                   Prefix prefix, uint32_t max_paths);

struct FlowKey {
    Ipv4 src;
    Ipv4 dst;
};

// Deterministic per-destination egress choice: flow_hash(src, dst) modulo
// the number of installed routes.
Ipv4 egress_next_hop(FlowKey key, const InstalledRouteSet& installed);

// Fraction of a prefix's host addresses that egress_next_hop sends to each
// next hop. Network and broadcast addresses are excluded. Requires
// prefix.len <= 30. The two variants compute identical results; the
// parallel one fans the host sweep out over OpenMP threads.
std::map<Ipv4, double> expected_shares(Prefix prefix, Ipv4 src,
                                       const InstalledRouteSet& installed);
std::map<Ipv4, double> expected_shares_serial(Prefix prefix, Ipv4 src,
                                              const InstalledRouteSet& installed);

}  // namespace mbgp::bgp

#include "mbgp/bgp_engine.hpp"

#include <algorithm>
#include <tuple>

namespace mbgp::bgp {

Ordering compare_routes(const RouteCandidate& a, const RouteCandidate& b) {
    if (a.weight != b.weight)
        return a.weight > b.weight ? Ordering::APreferred : Ordering::BPreferred;
    if (a.loc_pref != b.loc_pref)
        return a.loc_pref > b.loc_pref ? Ordering::APreferred : Ordering::BPreferred;
    if (a.as_path.size() != b.as_path.size())
        return a.as_path.size() < b.as_path.size() ? Ordering::APreferred : Ordering::BPreferred;
    if (a.origin != b.origin)
        return a.origin < b.origin ? Ordering::APreferred : Ordering::BPreferred;
    // MED is comparable only between routes from the same neighbor AS.
    if (a.neighbor_as == b.neighbor_as && a.med != b.med)
        return a.med < b.med ? Ordering::APreferred : Ordering::BPreferred;
    if (a.protocol != b.protocol)
        return a.protocol == Protocol::Ebgp ? Ordering::APreferred : Ordering::BPreferred;
    if (a.igp_metric != b.igp_metric)
        return a.igp_metric < b.igp_metric ? Ordering::APreferred : Ordering::BPreferred;
    return Ordering::Tie;
}

namespace {

// Residual ordering once the ladder says tie: router ID, then next hop.
bool residual_less(const RouteCandidate& a, const RouteCandidate& b) {
    if (a.router_id != b.router_id) return a.router_id < b.router_id;
    return a.next_hop < b.next_hop;
}

// Total order used only when the guarded-MED ladder leaves no unbeaten
// candidate (the MED preference cycle). Same ladder with MED compared
// unconditionally, then the residual order; total, so the pick cannot
// depend on input order.
bool canonical_less(const RouteCandidate& a, const RouteCandidate& b) {
    auto key = [](const RouteCandidate& r) {
        return std::tuple(~r.weight, ~r.loc_pref, r.as_path.size(), r.origin, r.med,
                          r.protocol, r.igp_metric);
    };
    if (key(a) != key(b)) return key(a) < key(b);
    return residual_less(a, b);
}

}  // namespace

InstalledRouteSet select_installed(std::vector<RouteCandidate> candidates,
                                   Prefix prefix, uint32_t max_paths) {
    if (candidates.empty()) throw Error(Errc::NoRoutes, "no routes");
    if (max_paths < 1) throw Error(Errc::BadInput, "max_paths must be >= 1");

    const size_t n = candidates.size();
    // Top group: candidates no other candidate strictly beats. Members are
    // pairwise ties by construction.
    std::vector<const RouteCandidate*> top;
    for (size_t i = 0; i < n; i++) {
        bool beaten = false;
        for (size_t j = 0; j < n && !beaten; j++) {
            if (i != j && compare_routes(candidates[j], candidates[i]) == Ordering::APreferred)
                beaten = true;
        }
        if (!beaten) top.push_back(&candidates[i]);
    }
    if (top.empty()) {
        // Guarded MED admits preference cycles across neighbor ASes; pick a
        // deterministic single best so selection stays permutation-invariant.
        auto it = std::min_element(candidates.begin(), candidates.end(), canonical_less);
        InstalledRouteSet out{prefix, {*it}, 0, false};
        return out;
    }

    const RouteCandidate* best =
        *std::min_element(top.begin(), top.end(),
                          [](auto* a, auto* b) { return residual_less(*a, *b); });

    std::vector<const RouteCandidate*> group;
    if (max_paths >= 2 && best->protocol == Protocol::Ebgp) {
        for (auto* c : top)
            if (c->protocol == Protocol::Ebgp && c->neighbor_as == best->neighbor_as)
                group.push_back(c);
    }
    if (group.size() < 2) group = {best};

    // Take the lowest router IDs, then store ascending by next hop.
    std::sort(group.begin(), group.end(),
              [](auto* a, auto* b) { return residual_less(*a, *b); });
    if (group.size() > max_paths) group.resize(max_paths);
    std::sort(group.begin(), group.end(),
              [](auto* a, auto* b) { return a->next_hop < b->next_hop; });

    InstalledRouteSet out;
    out.prefix = prefix;
    out.multipath = group.size() >= 2;
    for (size_t i = 0; i < group.size(); i++) {
        out.routes.push_back(*group[i]);
        if (group[i] == best) out.best_index = i;
    }
    return out;
}

Ipv4 egress_next_hop(FlowKey key, const InstalledRouteSet& installed) {
    if (installed.routes.empty()) throw Error(Errc::NoRoutes, "no routes");
    uint64_t h = flow_hash(key.src, key.dst);
    return installed.routes[h % installed.routes.size()].next_hop;
}

namespace {

std::map<Ipv4, double> shares_from_counts(const InstalledRouteSet& installed,
                                          const std::vector<uint64_t>& counts,
                                          uint64_t total) {
    std::map<Ipv4, double> shares;
    for (size_t i = 0; i < installed.routes.size(); i++)
        shares[installed.routes[i].next_hop] += double(counts[i]) / double(total);
    return shares;
}

}  // namespace

std::map<Ipv4, double> expected_shares_serial(Prefix prefix, Ipv4 src,
                                              const InstalledRouteSet& installed) {
    if (prefix.len > 30) throw Error(Errc::BadInput, "prefix longer than /30");
    const size_t k = installed.routes.size();
    const uint64_t hosts = prefix.size() - 2;  // skip network and broadcast
    std::vector<uint64_t> counts(k, 0);
    for (uint64_t off = 1; off <= hosts; off++) {
        uint64_t h = flow_hash(src, prefix.host(uint32_t(off)));
        counts[h % k]++;
    }
    return shares_from_counts(installed, counts, hosts);
}

std::map<Ipv4, double> expected_shares(Prefix prefix, Ipv4 src,
                                       const InstalledRouteSet& installed) {
    if (prefix.len > 30) throw Error(Errc::BadInput, "prefix longer than /30");
    const size_t k = installed.routes.size();
    const uint64_t hosts = prefix.size() - 2;
    std::vector<uint64_t> counts(k, 0);
#pragma omp parallel
    {
        std::vector<uint64_t> local(k, 0);
#pragma omp for nowait
        for (int64_t off = 1; off <= int64_t(hosts); off++) {
            uint64_t h = flow_hash(src, prefix.host(uint32_t(off)));
            local[h % k]++;
        }
#pragma omp critical
        for (size_t i = 0; i < k; i++) counts[i] += local[i];
    }
    return shares_from_counts(installed, counts, hosts);
}

}  // namespace mbgp::bgp

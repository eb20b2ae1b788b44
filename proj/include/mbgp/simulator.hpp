#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbgp/bgp_engine.hpp"
#include "mbgp/campaign.hpp"
#include "mbgp/net.hpp"
#include "mbgp/tables.hpp"
#include "mbgp/trace_analysis.hpp"

namespace mbgp::sim {

enum class Wiring { Parallel, Divergent };

struct IxpSpec {
    std::string name;
    Prefix lan;
};

struct RouterSpec {
    std::string id;
    std::string location;
    std::string ixp_name;
    Ipv4 nearside_ip;   // last hop inside the source AS
    Ipv4 probe_src;     // measurement vantage behind this router
};

struct PeerSpec {
    uint32_t asn = 0;
    std::vector<Prefix> prefixes;  // announced /24s
};

// One (router, peer) adjacency. link_count >= 2 means tied routes (M-BGP);
// a single-route adjacency may still expose two neighbor addresses whose
// routes differ in LocPref, which makes it a detection-negative candidate.
struct LinkConfig {
    std::string router;
    uint32_t peer_asn = 0;
    uint32_t link_count = 1;
    Wiring wiring = Wiring::Parallel;
    std::vector<Ipv4> neighbor_addresses;
    std::vector<std::vector<Ipv4>> farsides;  // per neighbor address

    bool mbgp() const { return link_count >= 2; }
};

struct Scenario {
    uint64_t seed = 0;
    uint32_t source_asn = 64500;
    uint32_t max_paths = 4;
    double mix[3] = {82.8, 8.7, 8.4};  // share of 2/3/4-link deployments
    std::vector<IxpSpec> ixps;
    std::vector<RouterSpec> routers;
    std::vector<PeerSpec> peers;
    std::vector<LinkConfig> links;

    const RouterSpec* router_by_id(const std::string& id) const;
    const RouterSpec* router_by_probe(Ipv4 src) const;
    const PeerSpec* peer_by_asn(uint32_t asn) const;
    const PeerSpec* peer_containing(Ipv4 ip) const;
    const LinkConfig* link_of(const std::string& router, uint32_t asn) const;
    const IxpSpec* ixp_by_name(const std::string& name) const;
};

struct GroundTruthRow {
    std::string router;
    uint32_t peer_asn = 0;
    Prefix prefix;                 // first announced /24 (the detection stop)
    std::vector<Ipv4> next_hops;   // installed set, ascending
    Wiring shape = Wiring::Parallel;
};

struct GroundTruth {
    std::vector<GroundTruthRow> rows;  // ordered by (router, peer)
};

struct ScenarioConfig {
    uint32_t routers = 4;
    uint32_t peers = 16;
    uint32_t max_prefixes_per_peer = 3;
    uint32_t max_paths = 4;
    uint32_t divergent_fanout = 3;
    double mix2 = 82.8;
    double mix3 = 8.7;
    double mix4 = 8.4;
    uint64_t seed = 7;
};

// Deterministic per (config, seed): same inputs give byte-identical
// scenarios, fixtures and ground truth.
std::pair<Scenario, GroundTruth> generate_scenario(const ScenarioConfig& config);

// Installed routes for target's prefix at this router, per the decision
// engine; empty when the router has no adjacency covering target.
std::optional<bgp::InstalledRouteSet> installed_for(const Scenario& s,
                                                    const std::string& router,
                                                    Ipv4 target);

// Canonical LG response bodies.
std::string synth_summary(const Scenario& s, const std::string& router);
std::string synth_route_detail(const Scenario& s, const std::string& router, Ipv4 target);

// Deterministic probe batch for one (src, dst): identical hop sequences per
// probe, exchange hop picked by the per-destination hash, farside picked by
// the wiring (fixed lane when parallel, second hash over the fanout when
// divergent).
std::vector<trace::TraceroutePath> synth_traceroute(const Scenario& s, Ipv4 src, Ipv4 dst,
                                                    uint32_t probes, uint64_t interval_s);

// In-process transport backed by synth_summary / synth_route_detail.
class SimulatorTransport : public campaign::LgTransport {
public:
    explicit SimulatorTransport(const Scenario& s) : scenario_(s) {}
    std::string query(const std::string& router, const std::string& command) override;

private:
    const Scenario& scenario_;
};

// Companion datasets the analysis side consumes.
IxpDataset make_ixp_dataset(const Scenario& s);
PrefixTable make_prefix_table(const Scenario& s);
trace::IpOracle make_primary_oracle(const Scenario& s);    // knows exchange LANs
trace::IpOracle make_secondary_oracle(const Scenario& s);  // LANs unmapped
AsRankTable make_as_rank(const Scenario& s);

// Versionable structured-text form; from_text round-trips to_text exactly.
std::string scenario_to_text(const Scenario& s);
Scenario scenario_from_text(const std::string& text);  // throws Errc::BadInput
std::string ground_truth_to_csv(const GroundTruth& gt);
GroundTruth ground_truth_from_csv(const std::string& text, size_t* skipped = nullptr);

}  // namespace mbgp::sim

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbgp/net.hpp"
#include "mbgp/tables.hpp"

namespace mbgp::trace {

struct Hop {
    int ttl = 0;
    std::optional<Ipv4> ip;        // empty when the hop did not respond
    std::optional<double> rtt_ms;
};

struct TraceroutePath {
    Ipv4 src;
    Ipv4 dst;
    uint64_t started_at = 0;  // seconds
    std::vector<Hop> hops;    // ttl strictly increasing
};

// Line format: src,dst,started_at,ttl:ip:rtt|ttl:ip:rtt|...  ('*' marks an
// unresponsive hop; its rtt part may be omitted).
std::string to_line(const TraceroutePath& path);
std::optional<TraceroutePath> parse_line(const std::string& line);

enum class VerdictKind { As, Ixp, Unmapped };

struct OracleVerdict {
    VerdictKind kind = VerdictKind::Unmapped;
    uint32_t asn = 0;          // kind == As
    std::string ixp_name;      // kind == Ixp

    static OracleVerdict as(uint32_t a) { return {VerdictKind::As, a, {}}; }
    static OracleVerdict ixp(std::string name) { return {VerdictKind::Ixp, 0, std::move(name)}; }
    static OracleVerdict unmapped() { return {}; }
};

// One IP-to-AS oracle as data: a longest-prefix-match verdict table.
// Lookup misses resolve to Unmapped, keeping the oracle a total function.
class IpOracle {
public:
    void add(Prefix p, OracleVerdict v);
    OracleVerdict lookup(Ipv4 ip) const;

    // CSV: prefix,verdict with verdict one of <asn>, IXP:<name>, unmapped
    static IpOracle from_csv(const std::string& text, size_t* skipped = nullptr);
    std::string to_csv() const;

private:
    // per prefix length, masked base -> verdict
    std::map<int, std::map<uint32_t, OracleVerdict>> by_len_;
};

enum class MappingKind { As, Ixp, Unmapped, Disagreement };

struct IpMapping {
    Ipv4 ip;
    MappingKind kind = MappingKind::Unmapped;
    uint32_t asn = 0;
    std::string ixp_name;
};

// Two-oracle agreement rule: AS verdicts must match (else Disagreement); an
// IXP verdict wins over Unmapped and over a lone AS claim (the IXP claim is
// confirmed downstream against the IXP dataset); a lone AS verdict against
// Unmapped is not trusted.
IpMapping map_ip(Ipv4 ip, const IpOracle& primary, const IpOracle& secondary);

struct IxpResolution {
    uint32_t asn = 0;
    std::string ixp_name;
};

// Maps an exchange-LAN hop to a member AS: exact member-IP record first,
// then LAN containment (attributed to the AS of the next hop). No match
// means the mapping failed and the caller discards the path.
std::optional<IxpResolution> resolve_ixp_hop(uint32_t prev_as, Ipv4 ixp_ip,
                                             uint32_t next_as, const IxpDataset& ixp);

struct BorderCrossing {
    Ipv4 nearside_ip;
    Ipv4 ixp_ip;
    Ipv4 farside_ip;
    std::string ixp_name;
};

// Finds the unique consecutive (nearside in src_as, exchange hop resolving
// to peer_as, farside in peer_as) triple. Returns nothing when the triple is
// absent or ambiguous, or when any responsive hop maps to Disagreement.
std::optional<BorderCrossing> extract_border_crossing(
    const TraceroutePath& path, uint32_t src_as, uint32_t peer_as,
    const std::vector<IpMapping>& hop_mappings, const IxpDataset& ixp);

// Per-path outcome of the full pipeline (oracle mapping + border
// extraction); discard_reason is set exactly when crossing is empty.
struct PathAnalysis {
    TraceroutePath path;
    std::optional<BorderCrossing> crossing;
    std::string discard_reason;
};

// Batch driver; the parallel variant distributes paths over OpenMP threads
// and produces results identical to the serial one.
std::vector<PathAnalysis> analyze_paths(const std::vector<TraceroutePath>& paths,
                                        const IpOracle& primary, const IpOracle& secondary,
                                        const IxpDataset& ixp);
std::vector<PathAnalysis> analyze_paths_serial(const std::vector<TraceroutePath>& paths,
                                               const IpOracle& primary,
                                               const IpOracle& secondary,
                                               const IxpDataset& ixp);

enum class DeploymentShape { Parallel, Divergent };

struct DeploymentProfile {
    std::map<Ipv4, double> ixp_shares;                         // over accepted paths
    std::map<std::pair<Ipv4, Ipv4>, double> farside_shares;    // conditional per ixp_ip
    std::map<Ipv4, bool> stability;                            // per destination
    DeploymentShape shape = DeploymentShape::Parallel;

    // supporting detail for reports
    std::map<Ipv4, uint64_t> ixp_counts;
    std::map<std::pair<Ipv4, Ipv4>, uint64_t> farside_counts;
    std::set<Ipv4> nearside_ips;
    std::map<Ipv4, std::string> ixp_names;  // per ixp_ip
    uint64_t accepted = 0;
    uint64_t discarded = 0;
};

// Folds one deployment's analyzed paths into shares, per-destination
// stability and the parallel/divergent shape. Throws Error(Errc::BadInput)
// when no path was accepted.
DeploymentProfile compute_profile(const std::vector<PathAnalysis>& outcomes);

// Full /24 sweep: 254 destinations x probes_per_dst rounds, round r of every
// destination scheduled at r * interval_s, ordered by destination then round.
std::vector<std::pair<Ipv4, uint64_t>> plan_probe_schedule(Prefix prefix,
                                                           uint32_t probes_per_dst,
                                                           uint64_t interval_s);

}  // namespace mbgp::trace

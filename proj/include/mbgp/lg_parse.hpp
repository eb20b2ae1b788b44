#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbgp/net.hpp"

namespace mbgp::lg {

// One row of a `show ip bgp summary` table. Only the neighbor address and
// ASN are interpreted; the rest is carried as opaque text.
struct BgpSummaryEntry {
    Ipv4 neighbor_address;
    uint32_t neighbor_as = 0;
    std::string state_or_prefix_count;
    std::string uptime;
    std::map<std::string, std::string> extras;  // positional, col5...
};

struct SummaryParse {
    std::vector<BgpSummaryEntry> entries;
    size_t skipped = 0;                        // banner/malformed lines
    std::vector<std::string> skipped_sample;   // first three, for diagnostics
};

// Tolerant row scan anchored on an IPv4 token followed by an AS number.
// Lines without that anchor are skipped and counted. Throws
// Error(Errc::UnrecognizedSummaryFormat) when no row parses at all.
SummaryParse parse_bgp_summary(const std::string& text);

// One route block of a `show ip bgp detail <ip>` response.
struct RouteDetailRecord {
    Prefix prefix;
    std::set<char> status_codes;  // M, E, B, I interpreted; others preserved
    Ipv4 next_hop;
    std::optional<int64_t> loc_pref;
    std::optional<int64_t> weight;
    std::optional<int64_t> med;
    std::vector<uint32_t> as_path;
    std::string raw_block;
};

struct RouteDetailParse {
    std::vector<RouteDetailRecord> records;
    size_t skipped_blocks = 0;
};

// Accepts the canonical block format as well as prose-style vendor output
// (status words like "multipath, external, best" and a shared
// "routing table entry for <prefix>" header). Throws
// Error(Errc::NoRoutesInResponse) when no route block is found.
RouteDetailParse parse_route_detail(const std::string& text);

// A confirmed deployment: one (router, peering AS, prefix) with >= 2
// equally-ranked external next hops.
struct MbgpEvidence {
    std::string router;
    uint32_t peering_as = 0;
    Prefix prefix;
    std::vector<Ipv4> next_hops;  // sorted ascending
    uint32_t link_count = 0;      // == next_hops.size()
};

// Evidence requires >= 2 counted records: the records flagged multipath plus
// any best-path record that ties them on (loc_pref, weight, |as_path|),
// absent fields agreeing. Every counted record must lead with peering_as in
// its AS path, and counted records must agree on the three metrics. Throws
// Error(Errc::MixedPrefixes) when the records span more than one prefix.
std::optional<MbgpEvidence> detect_mbgp(const std::vector<RouteDetailRecord>& records,
                                        const std::string& router, uint32_t peering_as);

}  // namespace mbgp::lg

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mbgp/lg_parse.hpp"
#include "mbgp/net.hpp"
#include "mbgp/tables.hpp"

namespace mbgp::campaign {

// Delivery failure (connection refused, timeout); distinct from a response
// that parses to nothing.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Looking-glass transport: request = (router id, command string), response =
// full body text. Implementations: fixture directory, simulator, live HTTP.
class LgTransport {
public:
    virtual ~LgTransport() = default;
    virtual std::string query(const std::string& router, const std::string& command) = 0;
};

inline std::string summary_command() { return "show ip bgp summary"; }
inline std::string detail_command(Ipv4 target) {
    return "show ip bgp detail " + target.str();
}

// Serves responses from <dir>/<router>.summary.txt and
// <dir>/<router>.detail.<a.b.c.d>.txt; missing file -> TransportError.
class FixtureTransport : public LgTransport {
public:
    explicit FixtureTransport(std::string dir) : dir_(std::move(dir)) {}
    std::string query(const std::string& router, const std::string& command) override;

private:
    std::string dir_;
};

class Clock {
public:
    virtual ~Clock() = default;
    virtual uint64_t now_ms() = 0;
    virtual void wait_until_ms(uint64_t t) = 0;
};

class SystemClock : public Clock {
public:
    uint64_t now_ms() override;
    void wait_until_ms(uint64_t t) override;
};

// Manual clock for tests: waiting just advances the reading.
class SimClock : public Clock {
public:
    explicit SimClock(uint64_t start_ms = 0) : now_(start_ms) {}
    uint64_t now_ms() override;
    void wait_until_ms(uint64_t t) override;
    void advance_ms(uint64_t d);

private:
    std::mutex m_;
    uint64_t now_;
};

// Shared gate: at most `per_minute` acquisitions in any sliding 60 s window
// (window half-open, (t-60s, t]). acquire() blocks on the clock until a slot
// frees and returns the send timestamp.
class RateLimiter {
public:
    RateLimiter(uint32_t per_minute, Clock& clock);
    uint64_t acquire();

private:
    uint32_t limit_;
    Clock& clock_;
    std::mutex m_;
    std::deque<uint64_t> sent_;
};

// A (router, peering AS) pair with the multiple neighbor addresses that make
// tied paths possible.
struct PeerCandidate {
    std::string router;
    uint32_t peering_as = 0;
    std::vector<Ipv4> neighbor_addresses;  // sorted, |.| >= 2
    bool via_ixp = false;
    std::optional<std::string> ixp_name;
};

// Groups summary rows by (router, neighbor AS) and keeps the multi-address
// groups whose every address is backed by the IXP dataset (member record of
// that AS, or containment in a peering LAN). Non-IXP groups are dropped.
std::vector<PeerCandidate> find_multipath_candidates(
    const std::map<std::string, std::vector<lg::BgpSummaryEntry>>& summaries,
    const IxpDataset& ixp);

// The .1 host of every /24 the AS originates, ascending.
std::vector<Ipv4> select_probe_targets(uint32_t asn, const PrefixTable& prefixes);

struct QueryLogEntry {
    uint64_t at_ms = 0;
    std::string router;
    std::string command;
    uint32_t attempt = 1;
    bool delivered = true;
};

struct CandidateFailure {
    std::string router;
    uint32_t peering_as = 0;
    std::vector<std::string> failed_targets;  // delivery failed after retries
};

struct CampaignOptions {
    uint32_t rate_limit_per_min = 6;
    uint32_t max_attempts = 3;        // total delivery attempts per target
    uint64_t retry_backoff_ms = 0;    // 0 = immediate (fixtures); doubles per retry
    uint32_t threads = 1;             // queries to distinct routers may overlap
    Clock* clock = nullptr;           // default: shared SystemClock
};

struct CandidateOutcome {
    PeerCandidate candidate;
    std::optional<lg::MbgpEvidence> evidence;
    uint32_t targets_queried = 0;
    std::vector<std::string> failed_targets;
};

struct CampaignResult {
    std::vector<lg::MbgpEvidence> evidences;       // candidate order
    std::vector<CandidateFailure> failures;        // candidates with failed targets
    std::vector<CandidateOutcome> outcomes;        // one per candidate
    std::vector<QueryLogEntry> query_log;          // timestamped audit trail
};

// Walks each candidate's targets in order, stops a candidate at its first
// detected deployment, retries delivery failures, and never exceeds the
// request rate in any sliding 60 s window. Results are deterministic for a
// deterministic transport, whatever the thread count.
CampaignResult run_campaign(LgTransport& transport,
                            const std::vector<PeerCandidate>& candidates,
                            const PrefixTable& prefixes, const CampaignOptions& opts = {});

struct CampaignReport {
    std::vector<lg::MbgpEvidence> deployments;       // one per case
    std::map<std::string, uint32_t> per_router_counts;   // router -> AS count
    std::map<uint32_t, uint32_t> per_as_router_counts;   // AS -> router count
    std::map<uint32_t, uint64_t> link_count_histogram;   // links -> cases
    std::map<std::string, uint32_t> rank_groups;         // label -> AS count
    uint64_t cases = 0;
};

// A case is a distinct (router, peering AS) pair; its link count is the
// maximum across that pair's evidences. ASes absent from the rank table land
// in the "unranked" bucket.
CampaignReport aggregate(const std::vector<lg::MbgpEvidence>& deployments,
                         const AsRankTable& ranks,
                         const std::vector<uint32_t>& group_bounds = {100, 1000, 10000});

// Evidence record: router,peering_as,prefix,link_count,hop;hop;...
std::string evidence_to_line(const lg::MbgpEvidence& e);
std::optional<lg::MbgpEvidence> evidence_from_line(const std::string& line);
std::string evidences_to_text(const std::vector<lg::MbgpEvidence>& list);
std::vector<lg::MbgpEvidence> evidences_from_text(const std::string& text,
                                                  size_t* skipped = nullptr);

}  // namespace mbgp::campaign

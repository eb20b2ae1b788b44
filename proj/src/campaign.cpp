#include "mbgp/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <chrono>
#include <set>
#include <thread>

namespace mbgp::campaign {

std::string FixtureTransport::query(const std::string& router, const std::string& command) {
    std::string file;
    if (command == summary_command()) {
        file = dir_ + "/" + router + ".summary.txt";
    } else if (command.rfind("show ip bgp detail ", 0) == 0) {
        file = dir_ + "/" + router + ".detail." + command.substr(19) + ".txt";
    } else {
        throw TransportError("unsupported command: " + command);
    }
    try {
        return read_text_file(file);
    } catch (const Error&) {
        throw TransportError("no fixture " + file);
    }
}

uint64_t SystemClock::now_ms() {
    using namespace std::chrono;
    return uint64_t(duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count());
}

void SystemClock::wait_until_ms(uint64_t t) {
    uint64_t now = now_ms();
    if (t > now) std::this_thread::sleep_for(std::chrono::milliseconds(t - now));
}

uint64_t SimClock::now_ms() {
    std::lock_guard lock(m_);
    return now_;
}

void SimClock::wait_until_ms(uint64_t t) {
    std::lock_guard lock(m_);
    now_ = std::max(now_, t);
}

void SimClock::advance_ms(uint64_t d) {
    std::lock_guard lock(m_);
    now_ += d;
}

RateLimiter::RateLimiter(uint32_t per_minute, Clock& clock)
    : limit_(per_minute ? per_minute : 1), clock_(clock) {}

uint64_t RateLimiter::acquire() {
    std::unique_lock lock(m_);
    for (;;) {
        uint64_t now = clock_.now_ms();
        while (!sent_.empty() && sent_.front() + 60000 <= now) sent_.pop_front();
        if (sent_.size() < limit_) {
            sent_.push_back(now);
            return now;
        }
        uint64_t wake = sent_.front() + 60000;
        lock.unlock();
        clock_.wait_until_ms(wake);
        lock.lock();
    }
}

std::vector<PeerCandidate> find_multipath_candidates(
    const std::map<std::string, std::vector<lg::BgpSummaryEntry>>& summaries,
    const IxpDataset& ixp) {
    std::vector<PeerCandidate> out;
    for (const auto& [router, entries] : summaries) {
        std::map<uint32_t, std::set<Ipv4>> by_as;
        for (const auto& e : entries) by_as[e.neighbor_as].insert(e.neighbor_address);
        for (const auto& [asn, addrs] : by_as) {
            if (addrs.size() < 2) continue;
            bool via_ixp = true;
            std::optional<std::string> name;
            for (Ipv4 a : addrs) {
                const IxpRecord* member = ixp.member_by_ip(a);
                if (member && member->member_asn == asn) {
                    if (!name) name = member->ixp_name;
                    continue;
                }
                if (auto lan = ixp.lan_containing(a)) {
                    if (!name) name = lan;
                    continue;
                }
                via_ixp = false;
                break;
            }
            if (!via_ixp) continue;
            PeerCandidate c;
            c.router = router;
            c.peering_as = asn;
            c.neighbor_addresses.assign(addrs.begin(), addrs.end());
            c.via_ixp = true;
            c.ixp_name = name;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<Ipv4> select_probe_targets(uint32_t asn, const PrefixTable& prefixes) {
    std::vector<Ipv4> out;
    for (const Prefix& p : prefixes.slash24_of(asn)) out.push_back(p.host(1));
    return out;
}

namespace {

CandidateOutcome probe_candidate(LgTransport& transport, const PeerCandidate& cand,
                                 const std::vector<Ipv4>& targets, RateLimiter& limiter,
                                 Clock& clock, const CampaignOptions& opts,
                                 std::vector<QueryLogEntry>& log, std::mutex& log_mutex) {
    CandidateOutcome out;
    out.candidate = cand;
    for (Ipv4 target : targets) {
        std::string command = detail_command(target);
        std::optional<std::string> body;
        for (uint32_t attempt = 1; attempt <= opts.max_attempts; attempt++) {
            if (attempt > 1 && opts.retry_backoff_ms)
                clock.wait_until_ms(clock.now_ms() +
                                    (opts.retry_backoff_ms << (attempt - 2)));
            uint64_t at = limiter.acquire();
            QueryLogEntry entry{at, cand.router, command, attempt, true};
            try {
                body = transport.query(cand.router, command);
            } catch (const TransportError&) {
                entry.delivered = false;
            }
            {
                std::lock_guard lock(log_mutex);
                log.push_back(entry);
            }
            if (body) break;
        }
        out.targets_queried++;
        if (!body) {
            out.failed_targets.push_back(target.str());
            continue;
        }
        try {
            auto parsed = lg::parse_route_detail(*body);
            auto evidence = lg::detect_mbgp(parsed.records, cand.router, cand.peering_as);
            if (evidence) {
                out.evidence = evidence;
                break;  // first deployment settles the candidate
            }
        } catch (const Error&) {
            // unparseable or mixed response: target consumed, no evidence
        }
    }
    return out;
}

}  // namespace

CampaignResult run_campaign(LgTransport& transport,
                            const std::vector<PeerCandidate>& candidates,
                            const PrefixTable& prefixes, const CampaignOptions& opts) {
    static SystemClock default_clock;
    Clock& clock = opts.clock ? *opts.clock : default_clock;
    RateLimiter limiter(opts.rate_limit_per_min, clock);

    CampaignResult result;
    result.outcomes.resize(candidates.size());
    std::vector<std::vector<Ipv4>> targets(candidates.size());
    for (size_t i = 0; i < candidates.size(); i++)
        targets[i] = select_probe_targets(candidates[i].peering_as, prefixes);

    std::mutex log_mutex;
    uint32_t threads = std::max(1u, opts.threads);
    if (threads == 1) {
        for (size_t i = 0; i < candidates.size(); i++)
            result.outcomes[i] = probe_candidate(transport, candidates[i], targets[i],
                                                 limiter, clock, opts, result.query_log,
                                                 log_mutex);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= candidates.size()) return;
                result.outcomes[i] = probe_candidate(transport, candidates[i], targets[i],
                                                     limiter, clock, opts,
                                                     result.query_log, log_mutex);
            }
        };
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < threads; t++) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& o : result.outcomes) {
        if (o.evidence) result.evidences.push_back(*o.evidence);
        if (!o.failed_targets.empty())
            result.failures.push_back(
                {o.candidate.router, o.candidate.peering_as, o.failed_targets});
    }
    return result;
}

CampaignReport aggregate(const std::vector<lg::MbgpEvidence>& deployments,
                         const AsRankTable& ranks,
                         const std::vector<uint32_t>& group_bounds) {
    CampaignReport report;

    std::map<std::pair<std::string, uint32_t>, lg::MbgpEvidence> cases;
    for (const auto& e : deployments) {
        auto key = std::make_pair(e.router, e.peering_as);
        auto it = cases.find(key);
        if (it == cases.end() || e.link_count > it->second.link_count) cases[key] = e;
    }

    std::map<std::string, std::set<uint32_t>> ases_per_router;
    std::map<uint32_t, std::set<std::string>> routers_per_as;
    for (const auto& [key, e] : cases) {
        report.deployments.push_back(e);
        report.link_count_histogram[e.link_count]++;
        ases_per_router[e.router].insert(e.peering_as);
        routers_per_as[e.peering_as].insert(e.router);
    }
    report.cases = cases.size();
    for (const auto& [router, set] : ases_per_router)
        report.per_router_counts[router] = uint32_t(set.size());
    for (const auto& [asn, set] : routers_per_as)
        report.per_as_router_counts[asn] = uint32_t(set.size());

    auto group_label = [&](uint32_t rank) {
        uint32_t lo = 1;
        for (uint32_t bound : group_bounds) {
            if (rank <= bound)
                return "rank " + std::to_string(lo) + "-" + std::to_string(bound);
            lo = bound + 1;
        }
        return "rank >" + std::to_string(group_bounds.empty() ? 0 : group_bounds.back());
    };
    for (const auto& [asn, routers] : routers_per_as) {
        auto it = ranks.by_asn.find(asn);
        if (it == ranks.by_asn.end())
            report.rank_groups["unranked"]++;
        else
            report.rank_groups[group_label(it->second.rank)]++;
    }
    return report;
}

std::string evidence_to_line(const lg::MbgpEvidence& e) {
    std::string out = e.router + "," + std::to_string(e.peering_as) + "," + e.prefix.str() +
                      "," + std::to_string(e.link_count) + ",";
    for (size_t i = 0; i < e.next_hops.size(); i++) {
        if (i) out += ';';
        out += e.next_hops[i].str();
    }
    return out;
}

std::optional<lg::MbgpEvidence> evidence_from_line(const std::string& line) {
    auto f = split_csv(line);
    if (f.size() != 5) return std::nullopt;
    lg::MbgpEvidence e;
    e.router = f[0];
    if (e.router.empty()) return std::nullopt;
    try {
        size_t pos = 0;
        unsigned long asn = std::stoul(f[1], &pos);
        if (pos != f[1].size() || asn == 0 || asn > 0xffffffffull) return std::nullopt;
        e.peering_as = uint32_t(asn);
        unsigned long links = std::stoul(f[3], &pos);
        if (pos != f[3].size() || links < 2) return std::nullopt;
        e.link_count = uint32_t(links);
    } catch (...) {
        return std::nullopt;
    }
    auto prefix = Prefix::parse(f[2]);
    if (!prefix) return std::nullopt;
    e.prefix = *prefix;
    std::string cur;
    for (char c : f[4] + ";") {
        if (c == ';') {
            if (cur.empty()) return std::nullopt;
            auto ip = Ipv4::parse(cur);
            if (!ip) return std::nullopt;
            e.next_hops.push_back(*ip);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::sort(e.next_hops.begin(), e.next_hops.end());
    if (e.next_hops.size() != e.link_count) return std::nullopt;
    return e;
}

std::string evidences_to_text(const std::vector<lg::MbgpEvidence>& list) {
    std::string out = "# router,peering_as,prefix,link_count,next_hops\n";
    for (const auto& e : list) out += evidence_to_line(e) + "\n";
    return out;
}

std::vector<lg::MbgpEvidence> evidences_from_text(const std::string& text, size_t* skipped) {
    std::vector<lg::MbgpEvidence> out;
    size_t bad = 0;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (auto e = evidence_from_line(line))
            out.push_back(std::move(*e));
        else
            bad++;
    }
    if (skipped) *skipped = bad;
    return out;
}

}  // namespace mbgp::campaign

#include "mbgp/trace_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace mbgp::trace {

std::string to_line(const TraceroutePath& path) {
    std::string out = path.src.str() + "," + path.dst.str() + "," +
                      std::to_string(path.started_at) + ",";
    for (size_t i = 0; i < path.hops.size(); i++) {
        const Hop& h = path.hops[i];
        if (i) out += '|';
        out += std::to_string(h.ttl);
        out += ':';
        out += h.ip ? h.ip->str() : "*";
        if (h.rtt_ms) {
            char buf[32];
            std::snprintf(buf, sizeof buf, ":%.3f", *h.rtt_ms);
            out += buf;
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::optional<TraceroutePath> parse_line(const std::string& line) {
    auto fields = split_csv(line, 4);
    if (fields.size() != 4) return std::nullopt;
    auto src = Ipv4::parse(fields[0]);
    auto dst = Ipv4::parse(fields[1]);
    if (!src || !dst) return std::nullopt;
    uint64_t started = 0;
    {
        const auto& f = fields[2];
        auto [next, ec] = std::from_chars(f.data(), f.data() + f.size(), started);
        if (ec != std::errc{} || next != f.data() + f.size()) return std::nullopt;
    }
    TraceroutePath path{*src, *dst, started, {}};
    int prev_ttl = 0;
    for (const auto& part : split_on(fields[3], '|')) {
        if (part.empty()) return std::nullopt;
        auto bits = split_on(part, ':');
        if (bits.size() < 2 || bits.size() > 3) return std::nullopt;
        Hop h;
        auto [next, ec] = std::from_chars(bits[0].data(), bits[0].data() + bits[0].size(), h.ttl);
        if (ec != std::errc{} || next != bits[0].data() + bits[0].size()) return std::nullopt;
        if (h.ttl <= prev_ttl) return std::nullopt;  // ttl strictly increasing
        prev_ttl = h.ttl;
        if (bits[1] != "*") {
            auto ip = Ipv4::parse(bits[1]);
            if (!ip) return std::nullopt;
            h.ip = ip;
        }
        if (bits.size() == 3 && !bits[2].empty()) {
            try {
                h.rtt_ms = std::stod(bits[2]);
            } catch (...) {
                return std::nullopt;
            }
        }
        path.hops.push_back(h);
    }
    if (path.hops.empty()) return std::nullopt;
    return path;
}

void IpOracle::add(Prefix p, OracleVerdict v) { by_len_[p.len][p.base.v] = std::move(v); }

OracleVerdict IpOracle::lookup(Ipv4 ip) const {
    for (auto it = by_len_.rbegin(); it != by_len_.rend(); ++it) {
        uint32_t mask = it->first == 0 ? 0 : ~uint32_t(0) << (32 - it->first);
        auto hit = it->second.find(ip.v & mask);
        if (hit != it->second.end()) return hit->second;
    }
    return OracleVerdict::unmapped();
}

IpOracle IpOracle::from_csv(const std::string& text, size_t* skipped) {
    IpOracle o;
    size_t bad = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv(line, 2);
        auto prefix = f.size() == 2 ? Prefix::parse(f[0]) : std::nullopt;
        if (!prefix) {
            bad++;
            continue;
        }
        const std::string& v = f[1];
        if (v == "unmapped") {
            o.add(*prefix, OracleVerdict::unmapped());
        } else if (v.rfind("IXP:", 0) == 0) {
            o.add(*prefix, OracleVerdict::ixp(v.substr(4)));
        } else {
            uint64_t asn = 0;
            auto [next, ec] = std::from_chars(v.data(), v.data() + v.size(), asn);
            if (ec != std::errc{} || next != v.data() + v.size() || asn == 0 ||
                asn > 0xffffffffull) {
                bad++;
                continue;
            }
            o.add(*prefix, OracleVerdict::as(uint32_t(asn)));
        }
    }
    if (skipped) *skipped = bad;
    return o;
}

std::string IpOracle::to_csv() const {
    std::string out = "# prefix,verdict\n";
    for (const auto& [len, entries] : by_len_) {
        for (const auto& [base, v] : entries) {
            out += Prefix{Ipv4{base}, len}.str() + ",";
            switch (v.kind) {
                case VerdictKind::As: out += std::to_string(v.asn); break;
                case VerdictKind::Ixp: out += "IXP:" + v.ixp_name; break;
                case VerdictKind::Unmapped: out += "unmapped"; break;
            }
            out += "\n";
        }
    }
    return out;
}

IpMapping map_ip(Ipv4 ip, const IpOracle& primary, const IpOracle& secondary) {
    OracleVerdict a = primary.lookup(ip);
    OracleVerdict b = secondary.lookup(ip);
    IpMapping m;
    m.ip = ip;

    if (a.kind == VerdictKind::As && b.kind == VerdictKind::As) {
        if (a.asn == b.asn) {
            m.kind = MappingKind::As;
            m.asn = a.asn;
        } else {
            m.kind = MappingKind::Disagreement;
        }
        return m;
    }
    if (a.kind == VerdictKind::Ixp || b.kind == VerdictKind::Ixp) {
        m.kind = MappingKind::Ixp;
        m.ixp_name = a.kind == VerdictKind::Ixp ? a.ixp_name : b.ixp_name;
        return m;
    }
    // one AS verdict against Unmapped, or both Unmapped
    m.kind = MappingKind::Unmapped;
    return m;
}

std::optional<IxpResolution> resolve_ixp_hop(uint32_t prev_as, Ipv4 ixp_ip,
                                             uint32_t next_as, const IxpDataset& ixp) {
    (void)prev_as;
    if (const IxpRecord* rec = ixp.member_by_ip(ixp_ip))
        return IxpResolution{rec->member_asn, rec->ixp_name};
    if (auto lan = ixp.lan_containing(ixp_ip)) return IxpResolution{next_as, *lan};
    return std::nullopt;
}

std::optional<BorderCrossing> extract_border_crossing(
    const TraceroutePath& path, uint32_t src_as, uint32_t peer_as,
    const std::vector<IpMapping>& hop_mappings, const IxpDataset& ixp) {
    if (hop_mappings.size() != path.hops.size()) return std::nullopt;

    for (const auto& m : hop_mappings)
        if (m.kind == MappingKind::Disagreement) return std::nullopt;

    std::optional<BorderCrossing> found;
    for (size_t i = 0; i + 2 < path.hops.size(); i++) {
        const Hop &h0 = path.hops[i], &h1 = path.hops[i + 1], &h2 = path.hops[i + 2];
        if (!h0.ip || !h1.ip || !h2.ip) continue;
        if (h1.ttl != h0.ttl + 1 || h2.ttl != h1.ttl + 1) continue;

        const IpMapping &m0 = hop_mappings[i], &m1 = hop_mappings[i + 1],
                        &m2 = hop_mappings[i + 2];
        if (m0.kind != MappingKind::As || m0.asn != src_as) continue;
        if (m2.kind != MappingKind::As || m2.asn != peer_as) continue;

        bool exchange_hop = m1.kind == MappingKind::Ixp ||
                            (m1.kind == MappingKind::Unmapped && ixp.lan_containing(*h1.ip));
        if (!exchange_hop) continue;
        auto res = resolve_ixp_hop(src_as, *h1.ip, m2.asn, ixp);
        if (!res || res->asn != peer_as) continue;

        if (found) return std::nullopt;  // ambiguous: two candidate triples
        found = BorderCrossing{*h0.ip, *h1.ip, *h2.ip, res->ixp_name};
    }
    return found;
}

namespace {

PathAnalysis analyze_one(const TraceroutePath& path, const IpOracle& primary,
                         const IpOracle& secondary, const IxpDataset& ixp) {
    PathAnalysis out;
    out.path = path;

    IpMapping src_map = map_ip(path.src, primary, secondary);
    if (src_map.kind != MappingKind::As) {
        out.discard_reason = "source address not mapped to an AS";
        return out;
    }
    IpMapping dst_map = map_ip(path.dst, primary, secondary);
    if (dst_map.kind != MappingKind::As) {
        out.discard_reason = "destination address not mapped to an AS";
        return out;
    }
    if (src_map.asn == dst_map.asn) {
        out.discard_reason = "path never leaves the source AS";
        return out;
    }

    std::vector<IpMapping> mappings;
    mappings.reserve(path.hops.size());
    for (const Hop& h : path.hops)
        mappings.push_back(h.ip ? map_ip(*h.ip, primary, secondary) : IpMapping{});
    for (size_t i = 0; i < path.hops.size(); i++) {
        if (path.hops[i].ip && mappings[i].kind == MappingKind::Disagreement) {
            out.discard_reason = "oracle disagreement on hop " + path.hops[i].ip->str();
            return out;
        }
    }

    out.crossing = extract_border_crossing(path, src_map.asn, dst_map.asn, mappings, ixp);
    if (!out.crossing) out.discard_reason = "no unique border crossing";
    return out;
}

}  // namespace

std::vector<PathAnalysis> analyze_paths_serial(const std::vector<TraceroutePath>& paths,
                                               const IpOracle& primary,
                                               const IpOracle& secondary,
                                               const IxpDataset& ixp) {
    std::vector<PathAnalysis> out(paths.size());
    for (size_t i = 0; i < paths.size(); i++)
        out[i] = analyze_one(paths[i], primary, secondary, ixp);
    return out;
}

std::vector<PathAnalysis> analyze_paths(const std::vector<TraceroutePath>& paths,
                                        const IpOracle& primary, const IpOracle& secondary,
                                        const IxpDataset& ixp) {
    std::vector<PathAnalysis> out(paths.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < int64_t(paths.size()); i++)
        out[i] = analyze_one(paths[i], primary, secondary, ixp);
    return out;
}

DeploymentProfile compute_profile(const std::vector<PathAnalysis>& outcomes) {
    DeploymentProfile prof;
    std::map<Ipv4, std::set<Ipv4>> per_dst_ixp;

    for (const auto& o : outcomes) {
        if (!o.crossing) {
            prof.discarded++;
            continue;
        }
        prof.accepted++;
        const BorderCrossing& c = *o.crossing;
        prof.ixp_counts[c.ixp_ip]++;
        prof.farside_counts[{c.ixp_ip, c.farside_ip}]++;
        prof.nearside_ips.insert(c.nearside_ip);
        prof.ixp_names[c.ixp_ip] = c.ixp_name;
        per_dst_ixp[o.path.dst].insert(c.ixp_ip);
    }
    if (prof.accepted == 0) throw Error(Errc::BadInput, "no accepted paths");

    for (const auto& [ip, n] : prof.ixp_counts)
        prof.ixp_shares[ip] = double(n) / double(prof.accepted);
    for (const auto& [key, n] : prof.farside_counts)
        prof.farside_shares[key] = double(n) / double(prof.ixp_counts[key.first]);
    for (const auto& [dst, set] : per_dst_ixp) prof.stability[dst] = set.size() == 1;

    std::map<Ipv4, std::set<Ipv4>> fanout;
    for (const auto& [key, n] : prof.farside_counts) fanout[key.first].insert(key.second);
    prof.shape = DeploymentShape::Parallel;
    for (const auto& [ip, fars] : fanout)
        if (fars.size() > 1) prof.shape = DeploymentShape::Divergent;
    return prof;
}

std::vector<std::pair<Ipv4, uint64_t>> plan_probe_schedule(Prefix prefix,
                                                           uint32_t probes_per_dst,
                                                           uint64_t interval_s) {
    if (prefix.len != 24) throw Error(Errc::BadInput, "probe schedule expects a /24");
    if (probes_per_dst < 1) throw Error(Errc::BadInput, "probes_per_dst must be >= 1");
    std::vector<std::pair<Ipv4, uint64_t>> out;
    out.reserve(254u * probes_per_dst);
    for (uint32_t off = 1; off <= 254; off++)
        for (uint32_t r = 0; r < probes_per_dst; r++)
            out.emplace_back(prefix.host(off), uint64_t(r) * interval_s);
    return out;
}

}  // namespace mbgp::trace

#include "mbgp/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

namespace mbgp::sim {

namespace {

constexpr uint32_t kNearsideBase = 0xC6120000;  // 198.18.0.0/15
constexpr uint32_t kProbeBase = 0xC6130000;     // 198.19.0.0/16
constexpr uint32_t kPeerBase = 0x0A000000;      // peer i owns base + (i+1) << 16, a /16
constexpr uint32_t kIxpBase = 0xAC140000;       // 172.20.0.0, one /20 LAN per exchange
constexpr uint32_t kIxpLanSize = 4096;
constexpr uint32_t kFirstPeerAsn = 64512;

const char* kCities[] = {"ams", "fra", "lon", "nyc", "sjc", "tor", "par",
                         "sto", "hkg", "sin", "syd", "mia", "chi", "sea",
                         "dal", "mad", "zur", "vie", "waw", "mil"};
constexpr size_t kCityCount = sizeof(kCities) / sizeof(kCities[0]);

uint64_t draw(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

Prefix peer_space(size_t peer_index) {
    return Prefix{Ipv4{kPeerBase + (uint32_t(peer_index + 1) << 16)}, 16};
}

std::vector<bgp::RouteCandidate> candidates_of(const Scenario& s, const LinkConfig& link) {
    std::vector<bgp::RouteCandidate> out;
    for (size_t i = 0; i < link.neighbor_addresses.size(); i++) {
        bgp::RouteCandidate c;
        c.next_hop = link.neighbor_addresses[i];
        c.neighbor_as = link.peer_asn;
        c.as_path = {link.peer_asn};
        // tied attributes when M-BGP is configured, otherwise a LocPref
        // ladder that keeps exactly one best path
        c.loc_pref = link.mbgp() ? 100 : uint32_t(100 - 10 * i);
        c.weight = 0;
        c.origin = bgp::Origin::Igp;
        c.med = 0;
        c.protocol = bgp::Protocol::Ebgp;
        c.igp_metric = 10;
        c.router_id = link.neighbor_addresses[i];
        out.push_back(std::move(c));
    }
    (void)s;
    return out;
}

std::string uptime_token(const std::string& router, Ipv4 addr) {
    std::string key = router + "/" + addr.str();
    uint64_t h = fnv1a64(reinterpret_cast<const uint8_t*>(key.data()), key.size());
    return std::to_string(1 + h % 20) + "w" + std::to_string(h % 7) + "d";
}

}  // namespace

const RouterSpec* Scenario::router_by_id(const std::string& id) const {
    for (const auto& r : routers)
        if (r.id == id) return &r;
    return nullptr;
}

const RouterSpec* Scenario::router_by_probe(Ipv4 src) const {
    for (const auto& r : routers)
        if (r.probe_src == src) return &r;
    return nullptr;
}

const PeerSpec* Scenario::peer_by_asn(uint32_t asn) const {
    for (const auto& p : peers)
        if (p.asn == asn) return &p;
    return nullptr;
}

const PeerSpec* Scenario::peer_containing(Ipv4 ip) const {
    for (const auto& p : peers)
        for (const auto& prefix : p.prefixes)
            if (prefix.contains(ip)) return &p;
    return nullptr;
}

const LinkConfig* Scenario::link_of(const std::string& router, uint32_t asn) const {
    for (const auto& l : links)
        if (l.router == router && l.peer_asn == asn) return &l;
    return nullptr;
}

const IxpSpec* Scenario::ixp_by_name(const std::string& name) const {
    for (const auto& x : ixps)
        if (x.name == name) return &x;
    return nullptr;
}

std::pair<Scenario, GroundTruth> generate_scenario(const ScenarioConfig& config) {
    if (config.routers < 1 || config.peers < 1)
        throw Error(Errc::BadInput, "need at least one router and one peer");
    if (config.peers > 1022) throw Error(Errc::BadInput, "at most 1022 peers");
    if (config.max_paths < 1) throw Error(Errc::BadInput, "max_paths must be >= 1");

    std::mt19937_64 rng(config.seed);
    Scenario s;
    s.seed = config.seed;
    s.max_paths = config.max_paths;
    s.mix[0] = config.mix2;
    s.mix[1] = config.mix3;
    s.mix[2] = config.mix4;

    uint32_t n_ixps = std::max(1u, config.routers / 2);
    for (uint32_t i = 0; i < n_ixps; i++) {
        IxpSpec x;
        x.name = "IX-" + std::string(kCities[i % kCityCount]) +
                 (i >= kCityCount ? std::to_string(i / kCityCount + 1) : "");
        x.lan = Prefix{Ipv4{kIxpBase + i * kIxpLanSize}, 20};
        s.ixps.push_back(std::move(x));
    }

    for (uint32_t i = 0; i < config.routers; i++) {
        RouterSpec r;
        r.location = kCities[i % kCityCount];
        r.id = r.location + std::to_string(i / kCityCount + 1);
        r.ixp_name = s.ixps[i % n_ixps].name;
        r.nearside_ip = Ipv4{kNearsideBase + (i << 8) + 1};
        r.probe_src = Ipv4{kProbeBase + (i << 8) + 1};
        s.routers.push_back(std::move(r));
    }

    for (uint32_t i = 0; i < config.peers; i++) {
        PeerSpec p;
        p.asn = kFirstPeerAsn + i;
        uint32_t n_prefixes =
            1 + uint32_t(draw(rng, std::max(1u, config.max_prefixes_per_peer)));
        for (uint32_t k = 0; k < n_prefixes; k++)
            p.prefixes.push_back(Prefix{Ipv4{peer_space(i).base.v + (k << 8)}, 24});
        s.peers.push_back(std::move(p));
    }

    // link-count mix for the tied adjacencies, normalized
    double mix_total = s.mix[0] + s.mix[1] + s.mix[2];
    if (mix_total <= 0) throw Error(Errc::BadInput, "link-count mix must be positive");
    std::map<std::string, uint32_t> lan_cursor;  // per exchange, next host offset
    std::map<size_t, uint32_t> farside_cursor;   // per peer, next /24 block

    for (uint32_t pi = 0; pi < config.peers; pi++) {
        uint32_t spread = 1 + uint32_t(draw(rng, std::min(3u, config.routers)));
        std::vector<uint32_t> router_ids(config.routers);
        for (uint32_t r = 0; r < config.routers; r++) router_ids[r] = r;
        for (uint32_t r = 0; r < spread; r++) {  // partial Fisher-Yates
            uint32_t j = r + uint32_t(draw(rng, config.routers - r));
            std::swap(router_ids[r], router_ids[j]);
        }
        std::sort(router_ids.begin(), router_ids.begin() + spread);

        for (uint32_t r = 0; r < spread; r++) {
            const RouterSpec& router = s.routers[router_ids[r]];
            LinkConfig link;
            link.router = router.id;
            link.peer_asn = s.peers[pi].asn;

            uint64_t profile = draw(rng, 100);
            uint32_t addresses = 1;
            if (profile < 45) {
                link.link_count = 1;  // single session, never a candidate
            } else if (profile < 60) {
                link.link_count = 1;  // two sessions, routes not tied
                addresses = 2;
            } else {
                double pick = double(draw(rng, 100000)) / 100000.0 * mix_total;
                link.link_count = pick < s.mix[0] ? 2 : pick < s.mix[0] + s.mix[1] ? 3 : 4;
                addresses = link.link_count;
                link.wiring = draw(rng, 100) < 30 ? Wiring::Divergent : Wiring::Parallel;
            }

            const IxpSpec* ixp = s.ixp_by_name(router.ixp_name);
            uint32_t& cursor = lan_cursor[ixp->name];
            for (uint32_t a = 0; a < addresses; a++) {
                if (++cursor >= kIxpLanSize - 1)
                    throw Error(Errc::BadInput, "scenario too dense for exchange LANs");
                link.neighbor_addresses.push_back(Ipv4{ixp->lan.base.v + cursor});
            }

            uint32_t fanout =
                link.mbgp() && link.wiring == Wiring::Divergent
                    ? std::max(2u, config.divergent_fanout)
                    : 1;
            for (uint32_t a = 0; a < addresses; a++) {
                std::vector<Ipv4> fars;
                for (uint32_t f = 0; f < fanout; f++) {
                    uint32_t block = 200 + farside_cursor[pi]++;
                    if (block > 255)
                        throw Error(Errc::BadInput, "scenario too dense for farside blocks");
                    fars.push_back(Ipv4{peer_space(pi).base.v + (block << 8) + 1});
                }
                link.farsides.push_back(std::move(fars));
            }
            s.links.push_back(std::move(link));
        }
    }

    GroundTruth gt;
    for (const auto& link : s.links) {
        if (!link.mbgp()) continue;
        const PeerSpec* peer = s.peer_by_asn(link.peer_asn);
        auto installed = bgp::select_installed(candidates_of(s, link),
                                               peer->prefixes.front(), s.max_paths);
        if (!installed.multipath) continue;
        GroundTruthRow row;
        row.router = link.router;
        row.peer_asn = link.peer_asn;
        row.prefix = peer->prefixes.front();
        for (const auto& rc : installed.routes) row.next_hops.push_back(rc.next_hop);
        row.shape = link.wiring;
        gt.rows.push_back(std::move(row));
    }
    std::sort(gt.rows.begin(), gt.rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.router, a.peer_asn) < std::tie(b.router, b.peer_asn);
    });
    return {std::move(s), std::move(gt)};
}

std::optional<bgp::InstalledRouteSet> installed_for(const Scenario& s,
                                                    const std::string& router,
                                                    Ipv4 target) {
    const PeerSpec* peer = s.peer_containing(target);
    if (!peer) return std::nullopt;
    const LinkConfig* link = s.link_of(router, peer->asn);
    if (!link) return std::nullopt;
    Prefix prefix;
    for (const auto& p : peer->prefixes)
        if (p.contains(target)) prefix = p;
    return bgp::select_installed(candidates_of(s, *link), prefix, s.max_paths);
}

std::string synth_summary(const Scenario& s, const std::string& router) {
    const RouterSpec* r = s.router_by_id(router);
    if (!r) throw Error(Errc::BadInput, "unknown router " + router);
    std::string out = "Neighbor          AS      State/PfxRcd  Up/Down\n";
    for (const auto& link : s.links) {
        if (link.router != router) continue;
        const PeerSpec* peer = s.peer_by_asn(link.peer_asn);
        for (Ipv4 addr : link.neighbor_addresses) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%-17s %-7u %-13zu %s\n", addr.str().c_str(),
                          link.peer_asn, peer->prefixes.size(),
                          uptime_token(router, addr).c_str());
            out += buf;
        }
    }
    return out;
}

std::string synth_route_detail(const Scenario& s, const std::string& router, Ipv4 target) {
    const RouterSpec* r = s.router_by_id(router);
    if (!r) throw Error(Errc::BadInput, "unknown router " + router);
    auto installed = installed_for(s, router, target);
    if (!installed) return "% Network not in table\n";

    const LinkConfig* link = s.link_of(router, s.peer_containing(target)->asn);
    auto render = [&](const bgp::RouteCandidate& c, const std::string& codes) {
        char buf[192];
        std::snprintf(buf, sizeof buf,
                      "Prefix: %s\n"
                      "Status: %s  NextHop: %s  LocPrf: %u  Weight: %u  MED: %u\n"
                      "Path: %u\n\n",
                      installed->prefix.str().c_str(), codes.c_str(),
                      c.next_hop.str().c_str(), c.loc_pref, c.weight, c.med, c.neighbor_as);
        return std::string(buf);
    };

    std::string out;
    for (size_t i = 0; i < installed->routes.size(); i++) {
        std::string codes;
        if (installed->multipath)
            codes = i == installed->best_index ? "B,M,E" : "M,E";
        else
            codes = "B,E";
        out += render(installed->routes[i], codes);
    }
    // sessions whose routes lost the decision process still show up,
    // external but neither best nor multipath
    for (const auto& c : candidates_of(s, *link)) {
        bool is_installed = false;
        for (const auto& ir : installed->routes)
            if (ir.next_hop == c.next_hop) is_installed = true;
        if (!is_installed) out += render(c, "E");
    }
    return out;
}

std::vector<trace::TraceroutePath> synth_traceroute(const Scenario& s, Ipv4 src, Ipv4 dst,
                                                    uint32_t probes, uint64_t interval_s) {
    const RouterSpec* router = s.router_by_probe(src);
    if (!router) throw Error(Errc::BadInput, "no vantage with source " + src.str());
    auto installed = installed_for(s, router->id, dst);
    if (!installed)
        throw Error(Errc::BadInput, "destination " + dst.str() + " not reachable from " +
                                        router->id);
    const LinkConfig* link = s.link_of(router->id, s.peer_containing(dst)->asn);

    Ipv4 ixp_ip = bgp::egress_next_hop({src, dst}, *installed);
    size_t addr_index = 0;
    for (size_t i = 0; i < link->neighbor_addresses.size(); i++)
        if (link->neighbor_addresses[i] == ixp_ip) addr_index = i;
    const std::vector<Ipv4>& fars = link->farsides[addr_index];

    Ipv4 farside = fars[0];
    if (link->mbgp() && link->wiring == Wiring::Divergent) {
        // second stage: an independent hash keyed on the destination and the
        // exchange address picks the farside lane
        uint8_t key[8] = {dst.octet(0), dst.octet(1), dst.octet(2), dst.octet(3),
                          ixp_ip.octet(0), ixp_ip.octet(1), ixp_ip.octet(2), ixp_ip.octet(3)};
        farside = fars[fnv1a64(key, 8) % fars.size()];
    }

    auto jitter = [&](uint32_t probe, int ttl) {
        std::string key = src.str() + ">" + dst.str() + "#" + std::to_string(probe) + "@" +
                          std::to_string(ttl);
        uint64_t h = fnv1a64(reinterpret_cast<const uint8_t*>(key.data()), key.size());
        return double(h % 400) / 1000.0;
    };

    // one or two aggregation hops inside the source network before the
    // border; count fixed per (src, dst) so repeated probes line up
    uint8_t ingress[8] = {src.octet(0), src.octet(1), src.octet(2), src.octet(3),
                          dst.octet(3), dst.octet(2), dst.octet(1), dst.octet(0)};
    int intra = 1 + int(fnv1a64(ingress, 8) % 2);

    std::vector<trace::TraceroutePath> out;
    for (uint32_t probe = 0; probe < probes; probe++) {
        trace::TraceroutePath p;
        p.src = src;
        p.dst = dst;
        p.started_at = uint64_t(probe) * interval_s;
        int ttl = 1;
        for (int i = 0; i < intra; i++, ttl++)
            p.hops.push_back({ttl, Ipv4{router->nearside_ip.v + 100 + uint32_t(i)},
                              0.4 * ttl + jitter(probe, ttl)});
        p.hops.push_back({ttl, router->nearside_ip, 0.4 * ttl + jitter(probe, ttl)});
        ttl++;
        p.hops.push_back({ttl, ixp_ip, 0.4 * ttl + 0.6 + jitter(probe, ttl)});
        ttl++;
        p.hops.push_back({ttl, farside, 0.4 * ttl + 1.2 + jitter(probe, ttl)});
        ttl++;
        p.hops.push_back({ttl, dst, 0.4 * ttl + 1.8 + jitter(probe, ttl)});
        out.push_back(std::move(p));
    }
    return out;
}

std::string SimulatorTransport::query(const std::string& router, const std::string& command) {
    try {
        if (command == campaign::summary_command()) return synth_summary(scenario_, router);
        if (command.rfind("show ip bgp detail ", 0) == 0) {
            auto target = Ipv4::parse(command.substr(19));
            if (!target) throw campaign::TransportError("bad target in: " + command);
            return synth_route_detail(scenario_, router, *target);
        }
    } catch (const Error& e) {
        throw campaign::TransportError(e.what());
    }
    throw campaign::TransportError("unsupported command: " + command);
}

IxpDataset make_ixp_dataset(const Scenario& s) {
    IxpDataset ds;
    for (const auto& link : s.links) {
        const RouterSpec* router = s.router_by_id(link.router);
        const IxpSpec* ixp = s.ixp_by_name(router->ixp_name);
        for (Ipv4 addr : link.neighbor_addresses)
            ds.add({ixp->name, ixp->lan, link.peer_asn, addr});
    }
    return ds;
}

PrefixTable make_prefix_table(const Scenario& s) {
    PrefixTable t;
    for (const auto& p : s.peers)
        for (const auto& prefix : p.prefixes) t.entries.emplace_back(prefix, p.asn);
    return t;
}

trace::IpOracle make_primary_oracle(const Scenario& s) {
    trace::IpOracle o;
    o.add(Prefix{Ipv4{kNearsideBase}, 15}, trace::OracleVerdict::as(s.source_asn));
    for (size_t i = 0; i < s.peers.size(); i++)
        o.add(peer_space(i), trace::OracleVerdict::as(s.peers[i].asn));
    for (const auto& x : s.ixps) o.add(x.lan, trace::OracleVerdict::ixp(x.name));
    return o;
}

trace::IpOracle make_secondary_oracle(const Scenario& s) {
    trace::IpOracle o;
    o.add(Prefix{Ipv4{kNearsideBase}, 15}, trace::OracleVerdict::as(s.source_asn));
    for (size_t i = 0; i < s.peers.size(); i++)
        o.add(peer_space(i), trace::OracleVerdict::as(s.peers[i].asn));
    // exchange LANs stay unmapped here; the membership data resolves them
    for (const auto& x : s.ixps) o.add(x.lan, trace::OracleVerdict::unmapped());
    return o;
}

AsRankTable make_as_rank(const Scenario& s) {
    AsRankTable t;
    for (size_t i = 0; i < s.peers.size(); i++) {
        if (i % 9 == 8) continue;  // leave a few ASes unranked
        uint32_t asn = s.peers[i].asn;
        uint32_t rank = uint32_t((uint64_t(asn) * 2654435761u) % (s.peers.size() * 40) + 1);
        AsRankEntry e{asn, rank, std::max<uint64_t>(1, 50000 / rank),
                      "SimPeer-" + std::to_string(asn)};
        t.by_asn[asn] = std::move(e);
    }
    return t;
}

std::string scenario_to_text(const Scenario& s) {
    std::ostringstream out;
    out << "# mbgpkit scenario v1\n";
    out << "seed " << s.seed << "\n";
    out << "source_as " << s.source_asn << "\n";
    out << "max_paths " << s.max_paths << "\n";
    char mix[64];
    std::snprintf(mix, sizeof mix, "mix %g %g %g\n", s.mix[0], s.mix[1], s.mix[2]);
    out << mix;
    for (const auto& x : s.ixps) out << "ixp " << x.name << " " << x.lan.str() << "\n";
    for (const auto& r : s.routers)
        out << "router " << r.id << " " << r.location << " " << r.ixp_name << " "
            << r.nearside_ip.str() << " " << r.probe_src.str() << "\n";
    for (const auto& p : s.peers) {
        out << "peer " << p.asn << " ";
        for (size_t i = 0; i < p.prefixes.size(); i++)
            out << (i ? "," : "") << p.prefixes[i].str();
        out << "\n";
    }
    for (const auto& l : s.links) {
        out << "link " << l.router << " " << l.peer_asn << " " << l.link_count << " "
            << (l.wiring == Wiring::Divergent ? "divergent" : "parallel") << " ";
        for (size_t i = 0; i < l.neighbor_addresses.size(); i++)
            out << (i ? "," : "") << l.neighbor_addresses[i].str();
        out << " ";
        for (size_t i = 0; i < l.farsides.size(); i++) {
            if (i) out << ";";
            for (size_t f = 0; f < l.farsides[i].size(); f++)
                out << (f ? "," : "") << l.farsides[i][f].str();
        }
        out << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
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

Ipv4 need_ip(const std::string& tok) {
    auto ip = Ipv4::parse(tok);
    if (!ip) throw Error(Errc::BadInput, "scenario: bad address " + tok);
    return *ip;
}

Prefix need_prefix(const std::string& tok) {
    auto p = Prefix::parse(tok);
    if (!p) throw Error(Errc::BadInput, "scenario: bad prefix " + tok);
    return *p;
}

uint64_t need_u64(const std::string& tok) {
    try {
        size_t pos = 0;
        uint64_t v = std::stoull(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (...) {
        throw Error(Errc::BadInput, "scenario: bad number " + tok);
    }
}

}  // namespace

Scenario scenario_from_text(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    bool seen_any = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        seen_any = true;
        const std::string& kind = tok[0];
        if (kind == "seed" && tok.size() == 2) {
            s.seed = need_u64(tok[1]);
        } else if (kind == "source_as" && tok.size() == 2) {
            s.source_asn = uint32_t(need_u64(tok[1]));
        } else if (kind == "max_paths" && tok.size() == 2) {
            s.max_paths = uint32_t(need_u64(tok[1]));
        } else if (kind == "mix" && tok.size() == 4) {
            for (int i = 0; i < 3; i++) s.mix[i] = std::stod(tok[i + 1]);
        } else if (kind == "ixp" && tok.size() == 3) {
            s.ixps.push_back({tok[1], need_prefix(tok[2])});
        } else if (kind == "router" && tok.size() == 6) {
            s.routers.push_back({tok[1], tok[2], tok[3], need_ip(tok[4]), need_ip(tok[5])});
        } else if (kind == "peer" && tok.size() == 3) {
            PeerSpec p;
            p.asn = uint32_t(need_u64(tok[1]));
            for (const auto& item : split_list(tok[2], ','))
                p.prefixes.push_back(need_prefix(item));
            s.peers.push_back(std::move(p));
        } else if (kind == "link" && tok.size() == 7) {
            LinkConfig l;
            l.router = tok[1];
            l.peer_asn = uint32_t(need_u64(tok[2]));
            l.link_count = uint32_t(need_u64(tok[3]));
            if (tok[4] == "divergent")
                l.wiring = Wiring::Divergent;
            else if (tok[4] == "parallel")
                l.wiring = Wiring::Parallel;
            else
                throw Error(Errc::BadInput, "scenario: bad wiring " + tok[4]);
            for (const auto& item : split_list(tok[5], ','))
                l.neighbor_addresses.push_back(need_ip(item));
            for (const auto& group : split_list(tok[6], ';')) {
                std::vector<Ipv4> fars;
                for (const auto& item : split_list(group, ',')) fars.push_back(need_ip(item));
                l.farsides.push_back(std::move(fars));
            }
            if (l.farsides.size() != l.neighbor_addresses.size())
                throw Error(Errc::BadInput, "scenario: farside groups must match addresses");
            s.links.push_back(std::move(l));
        } else {
            throw Error(Errc::BadInput, "scenario: unrecognized line: " + line);
        }
    }
    if (!seen_any || s.routers.empty() || s.peers.empty())
        throw Error(Errc::BadInput, "scenario: missing routers or peers");
    for (const auto& l : s.links) {
        if (!s.router_by_id(l.router))
            throw Error(Errc::BadInput, "scenario: link references unknown router " + l.router);
        if (!s.peer_by_asn(l.peer_asn))
            throw Error(Errc::BadInput, "scenario: link references unknown peer " +
                                            std::to_string(l.peer_asn));
    }
    return s;
}

std::string ground_truth_to_csv(const GroundTruth& gt) {
    std::string out = "# router,peering_as,prefix,link_count,next_hops,shape\n";
    for (const auto& row : gt.rows) {
        out += row.router + "," + std::to_string(row.peer_asn) + "," + row.prefix.str() +
               "," + std::to_string(row.next_hops.size()) + ",";
        for (size_t i = 0; i < row.next_hops.size(); i++) {
            if (i) out += ';';
            out += row.next_hops[i].str();
        }
        out += row.shape == Wiring::Divergent ? ",divergent\n" : ",parallel\n";
    }
    return out;
}

GroundTruth ground_truth_from_csv(const std::string& text, size_t* skipped) {
    GroundTruth gt;
    size_t bad = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv(line);
        if (f.size() != 6) {
            bad++;
            continue;
        }
        GroundTruthRow row;
        row.router = f[0];
        auto prefix = Prefix::parse(f[2]);
        if (row.router.empty() || !prefix) {
            bad++;
            continue;
        }
        row.prefix = *prefix;
        try {
            row.peer_asn = uint32_t(need_u64(f[1]));
            size_t n = size_t(need_u64(f[3]));
            for (const auto& item : split_list(f[4], ';'))
                row.next_hops.push_back(need_ip(item));
            if (row.next_hops.size() != n) throw Error(Errc::BadInput, "count mismatch");
        } catch (const Error&) {
            bad++;
            continue;
        }
        if (f[5] == "divergent")
            row.shape = Wiring::Divergent;
        else if (f[5] == "parallel")
            row.shape = Wiring::Parallel;
        else {
            bad++;
            continue;
        }
        gt.rows.push_back(std::move(row));
    }
    if (skipped) *skipped = bad;
    return gt;
}

}  // namespace mbgp::sim

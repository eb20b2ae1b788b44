#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "mbgp/simulator.hpp"

using namespace mbgp;
using namespace mbgp::sim;

TEST_CASE("generation is deterministic per seed") {
    ScenarioConfig cfg{.routers = 1, .peers = 1, .seed = 7};
    auto [s1, gt1] = generate_scenario(cfg);
    auto [s2, gt2] = generate_scenario(cfg);
    CHECK(scenario_to_text(s1) == scenario_to_text(s2));
    CHECK(ground_truth_to_csv(gt1) == ground_truth_to_csv(gt2));

    cfg.seed = 8;
    auto [s3, gt3] = generate_scenario(cfg);
    CHECK(scenario_to_text(s1) != scenario_to_text(s3));
}

TEST_CASE("scenario text round trips exactly") {
    auto [s, gt] = generate_scenario({.routers = 5, .peers = 23, .seed = 99});
    auto text = scenario_to_text(s);
    Scenario back = scenario_from_text(text);
    CHECK(scenario_to_text(back) == text);

    auto gt_text = ground_truth_to_csv(gt);
    size_t skipped = 1;
    GroundTruth gt_back = ground_truth_from_csv(gt_text, &skipped);
    CHECK(skipped == 0);
    CHECK(ground_truth_to_csv(gt_back) == gt_text);

    CHECK_THROWS_AS(scenario_from_text(""), Error);
    CHECK_THROWS_AS(scenario_from_text("bogus line\n"), Error);
}

TEST_CASE("ground truth rows are exactly the multipath links") {
    auto [s, gt] = generate_scenario({.routers = 6, .peers = 60, .seed = 3});
    std::set<std::pair<std::string, uint32_t>> expected;
    for (const auto& link : s.links)
        if (link.mbgp()) expected.insert({link.router, link.peer_asn});
    std::set<std::pair<std::string, uint32_t>> got;
    for (const auto& row : gt.rows) {
        got.insert({row.router, row.peer_asn});
        CHECK(row.next_hops.size() >= 2);
    }
    CHECK(got == expected);
}

TEST_CASE("link-count mix lands near the configured split") {
    auto [s, gt] = generate_scenario({.routers = 12, .peers = 1000, .seed = 7});
    std::map<uint32_t, double> hist;
    double total = 0;
    for (const auto& link : s.links) {
        if (!link.mbgp()) continue;
        hist[link.link_count]++;
        total++;
    }
    REQUIRE(total > 500);
    CHECK(hist[2] / total == doctest::Approx(0.828).epsilon(0.04));
    CHECK(hist[3] / total == doctest::Approx(0.087).epsilon(0.35));
    CHECK(hist[4] / total == doctest::Approx(0.084).epsilon(0.35));
    // absolute deviation within 3 percentage points
    CHECK(std::abs(hist[2] / total - 0.828) < 0.03);
    CHECK(std::abs(hist[3] / total - 0.087) < 0.03);
    CHECK(std::abs(hist[4] / total - 0.084) < 0.03);
}

TEST_CASE("summary: rows mirror scenario adjacency and parse back") {
    auto [s, gt] = generate_scenario({.routers = 4, .peers = 24, .seed = 11});
    for (const auto& r : s.routers) {
        auto text = synth_summary(s, r.id);
        std::multiset<std::pair<Ipv4, uint32_t>> expected;
        for (const auto& link : s.links)
            if (link.router == r.id)
                for (Ipv4 a : link.neighbor_addresses) expected.insert({a, link.peer_asn});
        if (expected.empty()) {
            CHECK_THROWS_AS(lg::parse_bgp_summary(text), Error);
            continue;
        }
        auto parsed = lg::parse_bgp_summary(text);
        std::multiset<std::pair<Ipv4, uint32_t>> got;
        for (const auto& e : parsed.entries) got.insert({e.neighbor_address, e.neighbor_as});
        CHECK(got == expected);
    }
}

TEST_CASE("summary: peer with two addresses produces two rows of one ASN") {
    auto [s, gt] = generate_scenario({.routers = 1, .peers = 8, .seed = 5});
    const LinkConfig* multi = nullptr;
    for (const auto& link : s.links)
        if (link.neighbor_addresses.size() == 2) multi = &link;
    REQUIRE(multi);
    auto parsed = lg::parse_bgp_summary(synth_summary(s, multi->router));
    int rows = 0;
    for (const auto& e : parsed.entries)
        if (e.neighbor_as == multi->peer_asn) rows++;
    CHECK(rows == int(multi->neighbor_addresses.size()));
}

TEST_CASE("route detail: multipath blocks carry M,E and parse-detect agrees with truth") {
    auto [s, gt] = generate_scenario({.routers = 5, .peers = 40, .seed = 17});
    std::set<std::pair<std::string, uint32_t>> truth;
    for (const auto& row : gt.rows) truth.insert({row.router, row.peer_asn});

    for (const auto& link : s.links) {
        const PeerSpec* peer = s.peer_by_asn(link.peer_asn);
        Ipv4 target = peer->prefixes.front().host(1);
        auto text = synth_route_detail(s, link.router, target);
        auto parsed = lg::parse_route_detail(text);
        auto ev = lg::detect_mbgp(parsed.records, link.router, link.peer_asn);
        bool expected = truth.count({link.router, link.peer_asn}) > 0;
        CAPTURE(link.router);
        CAPTURE(link.peer_asn);
        CHECK(ev.has_value() == expected);
        if (ev) {
            const GroundTruthRow* row = nullptr;
            for (const auto& r : gt.rows)
                if (r.router == link.router && r.peer_asn == link.peer_asn) row = &r;
            REQUIRE(row);
            CHECK(ev->next_hops == row->next_hops);
            CHECK(ev->prefix == row->prefix);
        }
    }
}

TEST_CASE("route detail: k=1 yields a single B,E block, no M anywhere") {
    auto [s, gt] = generate_scenario({.routers = 3, .peers = 30, .seed = 23});
    const LinkConfig* single = nullptr;
    for (const auto& link : s.links)
        if (!link.mbgp() && link.neighbor_addresses.size() == 1) single = &link;
    REQUIRE(single);
    Ipv4 target = s.peer_by_asn(single->peer_asn)->prefixes.front().host(1);
    auto parsed = lg::parse_route_detail(synth_route_detail(s, single->router, target));
    REQUIRE(parsed.records.size() == 1);
    CHECK(parsed.records[0].status_codes == std::set<char>{'B', 'E'});
}

TEST_CASE("route detail: unknown target reads as no routes") {
    auto [s, gt] = generate_scenario({.routers = 2, .peers = 4, .seed = 2});
    auto text = synth_route_detail(s, s.routers[0].id, *Ipv4::parse("203.0.113.99"));
    CHECK_THROWS_AS(lg::parse_route_detail(text), Error);
}

TEST_CASE("traceroute: repeated probes of one destination are identical") {
    auto [s, gt] = generate_scenario({.routers = 4, .peers = 30, .seed = 31});
    REQUIRE(!gt.rows.empty());
    const GroundTruthRow& row = gt.rows.front();
    const RouterSpec* router = s.router_by_id(row.router);
    auto paths = synth_traceroute(s, router->probe_src, row.prefix.host(9), 50, 420);
    REQUIRE(paths.size() == 50);
    for (const auto& p : paths) {
        REQUIRE(p.hops.size() == paths[0].hops.size());
        for (size_t h = 0; h < p.hops.size(); h++)
            CHECK(p.hops[h].ip == paths[0].hops[h].ip);
    }
    CHECK(paths[1].started_at == 420);
    CHECK(paths.back().started_at == 49 * 420);
}

TEST_CASE("traceroute: sweep observes every installed lane with sane shares") {
    auto [s, gt] = generate_scenario({.routers = 8, .peers = 60, .seed = 41});
    int parallel_checked = 0, divergent_checked = 0;
    for (const auto& row : gt.rows) {
        if (parallel_checked >= 2 && divergent_checked >= 2) break;
        const LinkConfig* link = s.link_of(row.router, row.peer_asn);
        bool divergent = link->wiring == Wiring::Divergent;
        if (divergent ? divergent_checked >= 2 : parallel_checked >= 2) continue;
        (divergent ? divergent_checked : parallel_checked)++;

        const RouterSpec* router = s.router_by_id(row.router);
        std::map<Ipv4, uint64_t> ixp_count;
        std::set<std::pair<Ipv4, Ipv4>> lanes;
        for (uint32_t off = 1; off <= 254; off++) {
            auto paths = synth_traceroute(s, router->probe_src, row.prefix.host(off), 1, 420);
            REQUIRE(paths.size() == 1);
            const auto& hops = paths[0].hops;
            REQUIRE(hops.size() >= 4);
            Ipv4 ixp_ip = *hops[hops.size() - 3].ip;
            Ipv4 far = *hops[hops.size() - 2].ip;
            ixp_count[ixp_ip]++;
            lanes.insert({ixp_ip, far});
        }
        size_t k = row.next_hops.size();
        REQUIRE(ixp_count.size() == k);
        for (Ipv4 hop : row.next_hops) {
            REQUIRE(ixp_count.count(hop) == 1);
            CHECK(std::abs(double(ixp_count[hop]) / 254.0 - 1.0 / double(k)) <= 0.10);
        }
        if (!divergent) {
            CHECK(lanes.size() == k);  // one farside per exchange address
        } else {
            CHECK(lanes.size() > k);
            CHECK(lanes.size() <= k * 3);
        }
    }
    CHECK(parallel_checked >= 1);
    CHECK(divergent_checked >= 1);
}

TEST_CASE("simulator transport answers both commands and rejects others") {
    auto [s, gt] = generate_scenario({.routers = 2, .peers = 6, .seed = 13});
    SimulatorTransport transport(s);
    auto text = transport.query(s.routers[0].id, campaign::summary_command());
    CHECK(text.find("Neighbor") == 0);
    Ipv4 target = s.peers[0].prefixes.front().host(1);
    auto detail = transport.query(s.routers[0].id, campaign::detail_command(target));
    CHECK(detail.find("Prefix:") != std::string::npos);
    CHECK_THROWS_AS(transport.query(s.routers[0].id, "show clock"), campaign::TransportError);
    CHECK_THROWS_AS(transport.query("nosuchrouter", campaign::summary_command()),
                    campaign::TransportError);
}

TEST_CASE("companion datasets are internally consistent") {
    auto [s, gt] = generate_scenario({.routers = 4, .peers = 20, .seed = 19});
    auto ixp = make_ixp_dataset(s);
    for (const auto& link : s.links)
        for (Ipv4 a : link.neighbor_addresses) {
            const IxpRecord* rec = ixp.member_by_ip(a);
            REQUIRE(rec);
            CHECK(rec->member_asn == link.peer_asn);
        }

    auto prefixes = make_prefix_table(s);
    for (const auto& p : s.peers) {
        auto targets = campaign::select_probe_targets(p.asn, prefixes);
        CHECK(targets.size() == p.prefixes.size());
    }

    auto primary = make_primary_oracle(s);
    auto secondary = make_secondary_oracle(s);
    for (const auto& r : s.routers) {
        CHECK(trace::map_ip(r.probe_src, primary, secondary).asn == s.source_asn);
        CHECK(trace::map_ip(r.nearside_ip, primary, secondary).asn == s.source_asn);
    }
    // exchange addresses resolve through the one-sided IXP verdict
    auto m = trace::map_ip(s.links[0].neighbor_addresses[0], primary, secondary);
    CHECK(m.kind == trace::MappingKind::Ixp);

    auto ranks = make_as_rank(s);
    CHECK(ranks.by_asn.size() < s.peers.size());  // some deliberately unranked
    CHECK(ranks.by_asn.size() > 0);
}

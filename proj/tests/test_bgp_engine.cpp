#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "mbgp/bgp_engine.hpp"
#include "support/oracles.hpp"

using namespace mbgp;
using namespace mbgp::bgp;

namespace {

RouteCandidate mk(const char* next_hop, uint32_t asn, const char* router_id) {
    RouteCandidate c;
    c.next_hop = *Ipv4::parse(next_hop);
    c.neighbor_as = asn;
    c.as_path = {asn};
    c.router_id = *Ipv4::parse(router_id);
    return c;
}

Ordering to_ordering(int o) {
    return o < 0 ? Ordering::APreferred : o > 0 ? Ordering::BPreferred : Ordering::Tie;
}

}  // namespace

TEST_CASE("single differing attribute decides") {
    auto a = mk("10.0.0.1", 64500, "1.1.1.1");
    auto b = mk("10.0.0.2", 64500, "2.2.2.2");
    a.loc_pref = 200;
    b.loc_pref = 100;
    CHECK(compare_routes(a, b) == Ordering::APreferred);
    CHECK(compare_routes(b, a) == Ordering::BPreferred);
}

TEST_CASE("identical metrics tie regardless of next hop and router id") {
    auto a = mk("198.32.181.46", 19752, "1.1.1.1");
    auto b = mk("206.108.34.48", 19752, "2.2.2.2");
    CHECK(compare_routes(a, b) == Ordering::Tie);
}

TEST_CASE("MED skipped across different neighbor ASes") {
    auto a = mk("10.0.0.1", 64500, "1.1.1.1");
    auto b = mk("10.0.0.2", 64501, "2.2.2.2");
    a.med = 10;
    b.med = 5;
    CHECK(compare_routes(a, b) == Ordering::Tie);
    CHECK(to_ordering(oracle::compare(a, b)) == Ordering::Tie);
    // same neighbor: lower MED wins
    b.neighbor_as = 64500;
    b.as_path = {64500};
    CHECK(compare_routes(a, b) == Ordering::BPreferred);
}

TEST_CASE("guarded MED admits a preference cycle across neighbors") {
    // Vendor-faithful anomaly: a beats b on MED, b beats c on IGP metric,
    // c beats a on IGP metric. select_installed must still give one
    // deterministic, permutation-invariant answer.
    auto a = mk("10.0.0.1", 64500, "1.1.1.1");
    auto b = mk("10.0.0.2", 64500, "2.2.2.2");
    auto c = mk("10.0.0.3", 64501, "3.3.3.3");
    a.med = 10, a.igp_metric = 100;
    b.med = 20, b.igp_metric = 1;
    c.med = 0, c.igp_metric = 50;
    CHECK(compare_routes(a, b) == Ordering::APreferred);
    CHECK(compare_routes(b, c) == Ordering::APreferred);
    CHECK(compare_routes(c, a) == Ordering::APreferred);

    Prefix p = *Prefix::parse("192.0.2.0/24");
    std::vector<RouteCandidate> cands{a, b, c};
    auto first = select_installed(cands, p, 4);
    CHECK(first.routes.size() == 1);
    std::sort(cands.begin(), cands.end(),
              [](auto& x, auto& y) { return x.next_hop > y.next_hop; });
    auto second = select_installed(cands, p, 4);
    CHECK(first.routes[0].next_hop == second.routes[0].next_hop);
}

TEST_CASE("antisymmetry and oracle agreement over random vectors") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20000; t++) {
        auto cands = oracle::random_candidates(rng, 2 + oracle::draw(rng, 4));
        for (const auto& x : cands)
            for (const auto& y : cands) {
                auto xy = compare_routes(x, y);
                auto yx = compare_routes(y, x);
                if (xy == Ordering::APreferred) CHECK(yx == Ordering::BPreferred);
                if (xy == Ordering::Tie) CHECK(yx == Ordering::Tie);
                CHECK(xy == to_ordering(oracle::compare(x, y)));
            }
    }
}

TEST_CASE("transitivity within a single neighbor AS") {
    // With one neighbor AS the MED rung always applies and the ladder is a
    // strict weak order; check both strict and tie transitivity.
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20000; t++) {
        auto cands = oracle::random_candidates(rng, 3, {.single_neighbor = true});
        const auto &a = cands[0], &b = cands[1], &c = cands[2];
        auto ab = compare_routes(a, b), bc = compare_routes(b, c), ac = compare_routes(a, c);
        if (ab == Ordering::APreferred && bc == Ordering::APreferred)
            CHECK(ac == Ordering::APreferred);
        if (ab == Ordering::Tie && bc == Ordering::Tie) CHECK(ac == Ordering::Tie);
    }
}

TEST_CASE("two tied eBGP routes from one peer install as multipath") {
    Prefix p = *Prefix::parse("142.46.150.0/24");
    auto a = mk("198.32.181.46", 19752, "1.1.1.1");
    auto b = mk("206.108.34.48", 19752, "2.2.2.2");
    auto set = select_installed({a, b}, p, 4);
    REQUIRE(set.routes.size() == 2);
    CHECK(set.multipath);
    CHECK(set.routes[0].next_hop == a.next_hop);
    CHECK(set.routes[1].next_hop == b.next_hop);
    CHECK(set.best().router_id == a.router_id);
}

TEST_CASE("max_paths 1 disables multipath and picks lowest router id") {
    Prefix p = *Prefix::parse("142.46.150.0/24");
    auto a = mk("206.108.34.48", 19752, "9.9.9.9");
    auto b = mk("198.32.181.46", 19752, "2.2.2.2");
    auto set = select_installed({a, b}, p, 1);
    REQUIRE(set.routes.size() == 1);
    CHECK_FALSE(set.multipath);
    CHECK(set.routes[0].router_id == b.router_id);
}

TEST_CASE("five tied candidates truncate to max_paths") {
    Prefix p = *Prefix::parse("10.1.0.0/24");
    std::vector<RouteCandidate> cands;
    for (int i = 0; i < 5; i++) {
        auto c = mk(("10.9.0." + std::to_string(i + 1)).c_str(), 64500,
                    ("10.8.0." + std::to_string(5 - i)).c_str());
        cands.push_back(c);
    }
    auto set = select_installed(cands, p, 4);
    auto expect = oracle::select(cands, 4);
    REQUIRE_FALSE(expect.cycle);
    REQUIRE(set.routes.size() == 4);
    REQUIRE(expect.routes.size() == 4);
    for (size_t i = 0; i < 4; i++) CHECK(set.routes[i].next_hop == expect.routes[i].next_hop);
    // router id 10.8.0.1 belongs to next hop 10.9.0.5: the four lowest
    // router ids exclude next hop 10.9.0.1
    for (const auto& r : set.routes) CHECK(r.next_hop != *Ipv4::parse("10.9.0.1"));
}

TEST_CASE("empty candidate set is an error") {
    Prefix p = *Prefix::parse("10.1.0.0/24");
    CHECK_THROWS_WITH_AS(select_installed({}, p, 4), "no routes", Error);
}

TEST_CASE("select_installed equals brute-force oracle on random sets") {
    std::mt19937_64 rng(3);
    Prefix p = *Prefix::parse("203.0.113.0/24");
    int cycles = 0;
    for (int t = 0; t < 20000; t++) {
        auto cands = oracle::random_candidates(rng, 1 + oracle::draw(rng, 6));
        uint32_t max_paths = 1 + uint32_t(oracle::draw(rng, 4));
        auto got = select_installed(cands, p, max_paths);
        auto expect = oracle::select(cands, max_paths);
        if (expect.cycle) {
            cycles++;
            CHECK(got.routes.size() == 1);
            continue;
        }
        REQUIRE(got.routes.size() == expect.routes.size());
        for (size_t i = 0; i < got.routes.size(); i++)
            CHECK(got.routes[i].next_hop == expect.routes[i].next_hop);
        CHECK(got.multipath == expect.multipath);
        CHECK(got.best().next_hop == expect.best_next_hop);
    }
    INFO("cycle sets: ", cycles);
}

TEST_CASE("multipath members never differ in any compared attribute") {
    std::mt19937_64 rng(4);
    Prefix p = *Prefix::parse("203.0.113.0/24");
    for (int t = 0; t < 20000; t++) {
        auto cands = oracle::random_candidates(rng, 2 + oracle::draw(rng, 5));
        auto got = select_installed(cands, p, 4);
        if (!got.multipath) continue;
        const auto& r0 = got.routes[0];
        for (const auto& r : got.routes) {
            CHECK(r.weight == r0.weight);
            CHECK(r.loc_pref == r0.loc_pref);
            CHECK(r.as_path.size() == r0.as_path.size());
            CHECK(r.origin == r0.origin);
            CHECK(r.med == r0.med);
            CHECK(r.protocol == Protocol::Ebgp);
            CHECK(r.igp_metric == r0.igp_metric);
            CHECK(r.neighbor_as == r0.neighbor_as);
        }
    }
}

TEST_CASE("selection is invariant under input permutation") {
    std::mt19937_64 rng(5);
    Prefix p = *Prefix::parse("203.0.113.0/24");
    for (int t = 0; t < 2000; t++) {
        auto cands = oracle::random_candidates(rng, 2 + oracle::draw(rng, 5));
        auto a = select_installed(cands, p, 3);
        std::shuffle(cands.begin(), cands.end(), rng);
        auto b = select_installed(cands, p, 3);
        REQUIRE(a.routes.size() == b.routes.size());
        for (size_t i = 0; i < a.routes.size(); i++)
            CHECK(a.routes[i].next_hop == b.routes[i].next_hop);
        CHECK(a.best().next_hop == b.best().next_hop);
    }
}

TEST_CASE("egress next hop: single route, stability, purity") {
    Prefix p = *Prefix::parse("142.46.150.0/24");
    auto a = mk("198.32.181.46", 19752, "1.1.1.1");
    auto single = select_installed({a}, p, 4);
    Ipv4 src = *Ipv4::parse("65.49.77.70");
    CHECK(egress_next_hop({src, p.host(7)}, single) == a.next_hop);

    auto b = mk("206.108.34.48", 19752, "2.2.2.2");
    auto multi = select_installed({a, b}, p, 4);
    Ipv4 first = egress_next_hop({src, p.host(1)}, multi);
    for (int i = 0; i < 10000; i++)
        CHECK(egress_next_hop({src, p.host(1)}, multi) == first);
}

TEST_CASE("expected shares: frozen sweep counts for the Fig.1-style set") {
    // Independent enumeration of flow_hash over 142.46.150.0/24 from
    // 65.49.77.70 gives counts 127/127 for k=2 (see the sweep below).
    Prefix p = *Prefix::parse("142.46.150.0/24");
    Ipv4 src = *Ipv4::parse("65.49.77.70");
    auto a = mk("198.32.181.46", 19752, "1.1.1.1");
    auto b = mk("206.108.34.48", 19752, "2.2.2.2");
    auto installed = select_installed({a, b}, p, 4);

    uint64_t counts[2] = {0, 0};
    for (uint32_t off = 1; off <= 254; off++)
        counts[flow_hash(src, p.host(off)) % 2]++;
    CHECK(counts[0] == 127);
    CHECK(counts[1] == 127);

    auto shares = expected_shares(p, src, installed);
    REQUIRE(shares.size() == 2);
    CHECK(shares[a.next_hop] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(shares[b.next_hop] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("expected shares: single route gets everything") {
    Prefix p = *Prefix::parse("10.1.0.0/24");
    auto a = mk("10.9.0.1", 64500, "1.1.1.1");
    auto installed = select_installed({a}, p, 4);
    auto shares = expected_shares(p, *Ipv4::parse("198.18.0.1"), installed);
    REQUIRE(shares.size() == 1);
    CHECK(shares[a.next_hop] == doctest::Approx(1.0));
}

TEST_CASE("expected shares stay near 1/k and match the serial reference") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 40; t++) {
        int k = 2 + int(oracle::draw(rng, 3));
        std::vector<RouteCandidate> cands;
        for (int i = 0; i < k; i++) {
            auto c = mk(("172.20.0." + std::to_string(i + 1)).c_str(), 64500,
                        ("10.8.1." + std::to_string(i + 1)).c_str());
            cands.push_back(c);
        }
        Prefix p{Ipv4{uint32_t(rng()) & 0xffffff00u}, 24};
        Ipv4 src{uint32_t(rng())};
        auto installed = select_installed(cands, p, 4);
        REQUIRE(installed.routes.size() == size_t(k));
        auto par = expected_shares(p, src, installed);
        auto ser = expected_shares_serial(p, src, installed);
        REQUIRE(par.size() == ser.size());
        double sum = 0;
        for (auto& [nh, f] : par) {
            CHECK(f == doctest::Approx(ser[nh]).epsilon(1e-15));
            CHECK(std::abs(f - 1.0 / k) <= 0.10);
            sum += f;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

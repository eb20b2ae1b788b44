// Benchmarks the OpenMP kernels against their serial references and checks
// they produce identical results.
//
//   mbgp-bench [--prefix-len N] [--paths N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "mbgp/bgp_engine.hpp"
#include "mbgp/simulator.hpp"
#include "mbgp/trace_analysis.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace mbgp;

namespace {

// best of three, the box is noisy
template <typename F>
double timed(F&& f) {
    double best = 1e9;
    for (int rep = 0; rep < 3; rep++) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int prefix_len = 12;
    int n_paths = 400000;
    for (int i = 1; i < argc; i++) {
        if (!std::strcmp(argv[i], "--prefix-len") && i + 1 < argc)
            prefix_len = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--paths") && i + 1 < argc)
            n_paths = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: mbgp-bench [--prefix-len N] [--paths N]\n");
            return 1;
        }
    }
    if (prefix_len < 2 || prefix_len > 30 || n_paths < 1) {
        std::fprintf(stderr, "bad arguments\n");
        return 1;
    }

#if defined(_OPENMP)
    std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif

    // hash-share sweep
    {
        std::vector<bgp::RouteCandidate> cands;
        for (int i = 0; i < 4; i++) {
            bgp::RouteCandidate c;
            c.next_hop = Ipv4{0xAC140001u + uint32_t(i)};
            c.neighbor_as = 64512;
            c.as_path = {64512};
            c.router_id = c.next_hop;
            cands.push_back(c);
        }
        Prefix p{Ipv4{0x0A000000u}, prefix_len};
        Ipv4 src = *Ipv4::parse("198.19.0.1");
        auto installed = bgp::select_installed(cands, p, 4);

        std::map<Ipv4, double> serial_out, parallel_out;
        double ts = timed([&] { serial_out = bgp::expected_shares_serial(p, src, installed); });
        double tp = timed([&] { parallel_out = bgp::expected_shares(p, src, installed); });
        bool same = serial_out == parallel_out;
        std::printf("expected_shares /%d (%llu hosts): serial %.3fs, openmp %.3fs, "
                    "speedup %.2fx, identical=%s\n",
                    prefix_len, (unsigned long long)(p.size() - 2), ts, tp, ts / tp,
                    same ? "yes" : "NO");
        if (!same) return 2;
    }

    // traceroute batch analysis
    {
        auto [scenario, truth] = sim::generate_scenario({.routers = 8, .peers = 64, .seed = 1});
        auto primary = sim::make_primary_oracle(scenario);
        auto secondary = sim::make_secondary_oracle(scenario);
        auto ixp = sim::make_ixp_dataset(scenario);

        std::vector<trace::TraceroutePath> paths;
        paths.reserve(size_t(n_paths));
        size_t row_i = 0;
        while (paths.size() < size_t(n_paths) && !truth.rows.empty()) {
            const auto& row = truth.rows[row_i++ % truth.rows.size()];
            const sim::RouterSpec* router = scenario.router_by_id(row.router);
            for (uint32_t off = 1; off <= 254 && paths.size() < size_t(n_paths); off++) {
                auto batch = sim::synth_traceroute(scenario, router->probe_src,
                                                   row.prefix.host(off), 1, 420);
                paths.push_back(std::move(batch[0]));
            }
        }

        std::vector<trace::PathAnalysis> serial_out, parallel_out;
        double ts = timed(
            [&] { serial_out = trace::analyze_paths_serial(paths, primary, secondary, ixp); });
        double tp =
            timed([&] { parallel_out = trace::analyze_paths(paths, primary, secondary, ixp); });
        bool same = serial_out.size() == parallel_out.size();
        for (size_t i = 0; same && i < serial_out.size(); i++) {
            same = serial_out[i].crossing.has_value() == parallel_out[i].crossing.has_value();
            if (same && serial_out[i].crossing)
                same = serial_out[i].crossing->ixp_ip == parallel_out[i].crossing->ixp_ip &&
                       serial_out[i].crossing->farside_ip == parallel_out[i].crossing->farside_ip;
        }
        std::printf("analyze_paths %zu paths: serial %.3fs, openmp %.3fs, speedup %.2fx, "
                    "identical=%s\n",
                    paths.size(), ts, tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 2;
    }
    return 0;
}

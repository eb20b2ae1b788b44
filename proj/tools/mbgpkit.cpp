// mbgpkit: multipath-BGP detection toolkit.
//
// Subcommands:
//   simulate  generate a synthetic deployment (LG fixtures, traceroutes,
//             oracle tables, ground truth)
//   detect    run the looking-glass campaign over fixtures or a scenario
//   analyze   turn traceroute measurements into deployment profiles
//   report    aggregate evidence into per-router / per-AS / link-count tables
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 partial failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "mbgp/campaign.hpp"
#include "mbgp/simulator.hpp"
#include "mbgp/tables.hpp"
#include "mbgp/trace_analysis.hpp"

namespace fs = std::filesystem;
using namespace mbgp;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kPartial = 3;

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
    return buf;
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw Error(Errc::Io, "cannot create directory " + path);
}

std::vector<uint32_t> parse_bounds(const std::string& spec) {
    std::vector<uint32_t> out;
    std::string cur;
    for (char c : spec + ",") {
        if (c == ',') {
            if (cur.empty()) continue;
            out.push_back(uint32_t(std::stoul(cur)));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    for (size_t i = 1; i < out.size(); i++)
        if (out[i] <= out[i - 1]) throw Error(Errc::BadInput, "group bounds must ascend");
    return out;
}

struct SimulateArgs {
    std::string out = "simout";
    uint64_t seed = 7;
    uint32_t routers = 4;
    uint32_t peers = 16;
    uint32_t max_paths = 4;
    uint32_t probes = 3;
    uint32_t interval = 420;
    std::string mix = "82.8,8.7,8.4";
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.probes < 1) throw Error(Errc::BadInput, "--probes must be >= 1");
    sim::ScenarioConfig cfg;
    cfg.routers = args.routers;
    cfg.peers = args.peers;
    cfg.max_paths = args.max_paths;
    cfg.seed = args.seed;
    {
        double m2 = 82.8, m3 = 8.7, m4 = 8.4;
        if (std::sscanf(args.mix.c_str(), "%lf,%lf,%lf", &m2, &m3, &m4) != 3)
            throw Error(Errc::BadInput, "mix must be three comma-separated numbers");
        cfg.mix2 = m2;
        cfg.mix3 = m3;
        cfg.mix4 = m4;
    }

    auto [scenario, truth] = sim::generate_scenario(cfg);

    ensure_dir(args.out);
    ensure_dir(args.out + "/lg");
    ensure_dir(args.out + "/oracles");

    write_text_file(args.out + "/scenario.txt", sim::scenario_to_text(scenario));
    write_text_file(args.out + "/ground_truth.csv", sim::ground_truth_to_csv(truth));
    write_text_file(args.out + "/prefixes.csv", sim::make_prefix_table(scenario).to_csv());
    write_text_file(args.out + "/ixp.csv", sim::make_ixp_dataset(scenario).to_csv());
    write_text_file(args.out + "/asrank.csv", sim::make_as_rank(scenario).to_csv());
    write_text_file(args.out + "/oracles/primary.csv",
                    sim::make_primary_oracle(scenario).to_csv());
    write_text_file(args.out + "/oracles/secondary.csv",
                    sim::make_secondary_oracle(scenario).to_csv());

    // LG fixtures: every router's summary plus a detail body per local target
    for (const auto& router : scenario.routers) {
        write_text_file(args.out + "/lg/" + router.id + ".summary.txt",
                        sim::synth_summary(scenario, router.id));
        for (const auto& link : scenario.links) {
            if (link.router != router.id) continue;
            const sim::PeerSpec* peer = scenario.peer_by_asn(link.peer_asn);
            for (const auto& prefix : peer->prefixes) {
                Ipv4 target = prefix.host(1);
                write_text_file(
                    args.out + "/lg/" + router.id + ".detail." + target.str() + ".txt",
                    sim::synth_route_detail(scenario, router.id, target));
            }
        }
    }

    // Traceroute sweep per deployed pair: the full /24 behind each detection
    std::string traces;
    for (const auto& row : truth.rows) {
        const sim::RouterSpec* router = scenario.router_by_id(row.router);
        for (uint32_t off = 1; off <= 254; off++) {
            auto paths = sim::synth_traceroute(scenario, router->probe_src,
                                               row.prefix.host(off), args.probes,
                                               args.interval);
            for (const auto& p : paths) traces += trace::to_line(p) + "\n";
        }
    }
    write_text_file(args.out + "/traceroutes.txt", traces);

    std::fprintf(stderr,
                 "simulate: %zu routers, %zu peers, %zu deployments -> %s (seed %llu)\n",
                 scenario.routers.size(), scenario.peers.size(), truth.rows.size(),
                 args.out.c_str(), (unsigned long long)args.seed);
    return kOk;
}

struct DetectArgs {
    std::string fixtures;
    std::string scenario;
    std::string prefixes;
    std::string ixp;
    std::string out = "detectout";
    uint32_t rate_limit = 6;
    uint32_t threads = 1;
};

int cmd_detect(const DetectArgs& args) {
    if (args.fixtures.empty() == args.scenario.empty())
        throw Error(Errc::BadInput, "pass exactly one of --fixtures or --in scenario");

    std::unique_ptr<campaign::LgTransport> transport;
    std::vector<std::string> routers;
    PrefixTable prefixes;
    IxpDataset ixp;
    sim::Scenario scenario;

    if (!args.scenario.empty()) {
        scenario = sim::scenario_from_text(read_text_file(args.scenario));
        transport = std::make_unique<sim::SimulatorTransport>(scenario);
        for (const auto& r : scenario.routers) routers.push_back(r.id);
        prefixes = sim::make_prefix_table(scenario);
        ixp = sim::make_ixp_dataset(scenario);
    } else {
        if (args.prefixes.empty() || args.ixp.empty())
            throw Error(Errc::BadInput, "--fixtures needs --prefixes and --ixp");
        transport = std::make_unique<campaign::FixtureTransport>(args.fixtures);
        for (const auto& entry : fs::directory_iterator(args.fixtures)) {
            std::string name = entry.path().filename().string();
            auto pos = name.find(".summary.txt");
            if (pos != std::string::npos && pos + 12 == name.size())
                routers.push_back(name.substr(0, pos));
        }
        std::sort(routers.begin(), routers.end());
        prefixes = PrefixTable::from_csv(read_text_file(args.prefixes));
        size_t bad_ixp = 0;
        ixp = IxpDataset::from_csv(read_text_file(args.ixp), &bad_ixp);
        if (bad_ixp) std::fprintf(stderr, "detect: skipped %zu bad ixp rows\n", bad_ixp);
    }
    if (routers.empty()) throw Error(Errc::BadInput, "no routers found");

    std::map<std::string, std::vector<lg::BgpSummaryEntry>> summaries;
    size_t unparseable = 0;
    for (const auto& id : routers) {
        try {
            auto body = transport->query(id, campaign::summary_command());
            summaries[id] = lg::parse_bgp_summary(body).entries;
        } catch (const campaign::TransportError&) {
            unparseable++;
        } catch (const Error&) {
            unparseable++;
        }
    }
    if (summaries.empty()) throw Error(Errc::BadInput, "no parseable summaries");

    auto candidates = campaign::find_multipath_candidates(summaries, ixp);

    // Fixture and scenario replays pace against a simulated clock, so the
    // audit log shows the schedule without the process sleeping through it.
    campaign::SimClock clock;
    campaign::CampaignOptions opts;
    opts.rate_limit_per_min = args.rate_limit;
    opts.threads = args.threads;
    opts.clock = &clock;
    auto result = campaign::run_campaign(*transport, candidates, prefixes, opts);

    ensure_dir(args.out);
    write_text_file(args.out + "/evidence.csv",
                    campaign::evidences_to_text(result.evidences));

    std::string log;
    for (const auto& q : result.query_log)
        log += std::to_string(q.at_ms) + "ms " + q.router + " \"" + q.command +
               "\" attempt=" + std::to_string(q.attempt) +
               (q.delivered ? "" : " FAILED") + "\n";
    write_text_file(args.out + "/campaign_log.txt", log);

    if (!result.failures.empty()) {
        std::string rows = "# router,peering_as,failed_targets\n";
        for (const auto& f : result.failures) {
            rows += f.router + "," + std::to_string(f.peering_as) + ",";
            for (size_t i = 0; i < f.failed_targets.size(); i++)
                rows += (i ? ";" : "") + f.failed_targets[i];
            rows += "\n";
        }
        write_text_file(args.out + "/failures.csv", rows);
    }

    std::fprintf(stderr, "detect: %zu candidates, %zu deployments, %zu queries -> %s\n",
                 candidates.size(), result.evidences.size(), result.query_log.size(),
                 args.out.c_str());
    if (unparseable)
        std::fprintf(stderr, "detect: %zu router summaries unavailable\n", unparseable);
    return result.failures.empty() ? kOk : kPartial;
}

struct AnalyzeArgs {
    std::string in;
    std::string primary;
    std::string secondary;
    std::string ixp;
    std::string out = "analyzeout";
    std::string format = "text";
};

int cmd_analyze(const AnalyzeArgs& args) {
    auto primary = trace::IpOracle::from_csv(read_text_file(args.primary));
    auto secondary = trace::IpOracle::from_csv(read_text_file(args.secondary));
    size_t bad_ixp = 0;
    auto ixp = IxpDataset::from_csv(read_text_file(args.ixp), &bad_ixp);

    std::vector<trace::TraceroutePath> paths;
    size_t malformed = 0;
    {
        std::istringstream in(read_text_file(args.in));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            if (auto p = trace::parse_line(line))
                paths.push_back(std::move(*p));
            else
                malformed++;
        }
    }
    if (paths.empty()) throw Error(Errc::BadInput, "no paths");

    auto outcomes = trace::analyze_paths(paths, primary, secondary, ixp);

    // one deployment per (vantage, destination /24)
    std::map<std::pair<Ipv4, Prefix>, std::vector<trace::PathAnalysis>> groups;
    for (auto& o : outcomes) {
        Prefix dst24{Ipv4{o.path.dst.v & 0xffffff00u}, 24};
        groups[{o.path.src, dst24}].push_back(std::move(o));
    }

    std::string text;
    std::string csv =
        "# src,dst_prefix,peer_as,shape,ixp_ip,ixp_name,ixp_share,farside_ip,"
        "farside_share_of_total\n";
    size_t profiled = 0, skipped_groups = 0;
    for (const auto& [key, list] : groups) {
        const auto& [src, dst24] = key;
        uint64_t discarded = 0;
        for (const auto& o : list)
            if (!o.crossing) discarded++;
        if (discarded == list.size()) {
            skipped_groups++;
            text += "deployment " + src.str() + " -> " + dst24.str() +
                    ": all " + std::to_string(list.size()) + " paths discarded\n\n";
            continue;
        }
        auto prof = trace::compute_profile(list);
        profiled++;

        auto peer = primary.lookup(dst24.host(1));
        std::string peer_label =
            peer.kind == trace::VerdictKind::As ? "AS" + std::to_string(peer.asn) : "AS?";

        text += "deployment " + src.str() + " -> " + dst24.str() + " (" + peer_label + ")\n";
        text += "  shape: ";
        text += prof.shape == trace::DeploymentShape::Divergent ? "divergent" : "parallel";
        text += "\n  paths: " + std::to_string(prof.accepted) + " accepted, " +
                std::to_string(prof.discarded) + " discarded\n";
        text += "  nearside:";
        for (Ipv4 ip : prof.nearside_ips) text += " " + ip.str();
        text += "\n";
        uint64_t stable = 0;
        for (const auto& [dst, ok] : prof.stability) stable += ok ? 1 : 0;
        text += "  stability: " + std::to_string(stable) + "/" +
                std::to_string(prof.stability.size()) + " destinations stable\n";
        for (const auto& [ixp_ip, share] : prof.ixp_shares) {
            text += "  ixp " + ixp_ip.str() + " (" + prof.ixp_names.at(ixp_ip) +
                    "): " + pct(share) + "\n";
            for (const auto& [lane, n] : prof.farside_counts) {
                if (lane.first != ixp_ip) continue;
                double of_total = double(n) / double(prof.accepted);
                text += "      farside " + lane.second.str() + ": " + pct(of_total) + "\n";
                csv += src.str() + "," + dst24.str() + "," + peer_label.substr(2) + "," +
                       (prof.shape == trace::DeploymentShape::Divergent ? "divergent"
                                                                        : "parallel") +
                       "," + ixp_ip.str() + "," + prof.ixp_names.at(ixp_ip) + "," +
                       std::to_string(share) + "," + lane.second.str() + "," +
                       std::to_string(of_total) + "\n";
            }
        }
        text += "\n";
    }
    if (profiled == 0) throw Error(Errc::BadInput, "no accepted paths in any deployment");

    std::string summary = std::to_string(profiled) + " deployments profiled, " +
                          std::to_string(skipped_groups) + " skipped, " +
                          std::to_string(malformed) + " malformed lines\n";
    text += summary;

    ensure_dir(args.out);
    write_text_file(args.out + "/profiles.txt", text);
    write_text_file(args.out + "/profiles.csv", csv);
    std::fputs((args.format == "csv" ? csv : text).c_str(), stdout);
    std::fprintf(stderr, "analyze: %s", summary.c_str());
    if (bad_ixp) std::fprintf(stderr, "analyze: skipped %zu bad ixp rows\n", bad_ixp);
    return kOk;
}

struct ReportArgs {
    std::string in;
    std::string asrank;
    std::string out = "reportout";
    std::string bounds = "100,1000,10000";
    std::string format = "text";
};

int cmd_report(const ReportArgs& args) {
    size_t skipped = 0;
    auto evidences = campaign::evidences_from_text(read_text_file(args.in), &skipped);
    AsRankTable ranks;
    if (!args.asrank.empty()) ranks = AsRankTable::from_csv(read_text_file(args.asrank));
    auto bounds = parse_bounds(args.bounds);

    auto report = campaign::aggregate(evidences, ranks, bounds);

    std::string text = "M-BGP deployment report\n";
    text += std::to_string(report.per_router_counts.size()) + " routers, " +
            std::to_string(report.per_as_router_counts.size()) + " ASes, " +
            std::to_string(report.cases) + " cases\n\n";

    text += "link-count histogram\n";
    std::string hist_csv = "# links,cases,share\n";
    for (const auto& [links, n] : report.link_count_histogram) {
        double share = report.cases ? double(n) / double(report.cases) : 0.0;
        text += "  " + std::to_string(links) + " links: " + std::to_string(n) + " (" +
                pct(share) + ")\n";
        hist_csv += std::to_string(links) + "," + std::to_string(n) + "," +
                    std::to_string(share) + "\n";
    }

    text += "\nrank groups\n";
    std::string rank_csv = "# group,ases\n";
    for (const auto& [label, n] : report.rank_groups) {
        text += "  " + label + ": " + std::to_string(n) + "\n";
        rank_csv += label + "," + std::to_string(n) + "\n";
    }

    // routers by AS count, then per-AS router counts
    std::vector<std::pair<std::string, uint32_t>> routers(report.per_router_counts.begin(),
                                                          report.per_router_counts.end());
    std::sort(routers.begin(), routers.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    text += "\ntop routers by peering ASes\n";
    std::string router_csv = "# router,ases\n";
    for (size_t i = 0; i < routers.size(); i++) {
        if (i < 10)
            text += "  " + routers[i].first + ": " + std::to_string(routers[i].second) + "\n";
        router_csv += routers[i].first + "," + std::to_string(routers[i].second) + "\n";
    }

    std::vector<std::pair<uint32_t, uint32_t>> ases(report.per_as_router_counts.begin(),
                                                    report.per_as_router_counts.end());
    std::sort(ases.begin(), ases.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    text += "\ntop ASes by router count\n";
    std::string as_csv = "# asn,routers,rank,cone_size,name\n";
    for (size_t i = 0; i < ases.size(); i++) {
        auto it = ranks.by_asn.find(ases[i].first);
        std::string name = it == ranks.by_asn.end() ? "" : it->second.name;
        if (i < 10)
            text += "  AS" + std::to_string(ases[i].first) + ": " +
                    std::to_string(ases[i].second) + (name.empty() ? "" : " (" + name + ")") +
                    "\n";
        as_csv += std::to_string(ases[i].first) + "," + std::to_string(ases[i].second) + ",";
        if (it != ranks.by_asn.end())
            as_csv += std::to_string(it->second.rank) + "," +
                      std::to_string(it->second.cone_size) + "," + name;
        else
            as_csv += ",,";
        as_csv += "\n";
    }
    if (skipped) text += "\n" + std::to_string(skipped) + " malformed evidence lines skipped\n";

    ensure_dir(args.out);
    write_text_file(args.out + "/report.txt", text);
    write_text_file(args.out + "/link_histogram.csv", hist_csv);
    write_text_file(args.out + "/rank_groups.csv", rank_csv);
    write_text_file(args.out + "/per_router.csv", router_csv);
    write_text_file(args.out + "/per_as.csv", as_csv);

    if (args.format == "csv")
        std::fputs((hist_csv + rank_csv + router_csv + as_csv).c_str(), stdout);
    else
        std::fputs(text.c_str(), stdout);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multipath-BGP detection toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic deployment");
    sim_cmd->add_option("--out", sim_args.out, "output directory");
    sim_cmd->add_option("--seed", sim_args.seed, "scenario seed");
    sim_cmd->add_option("--routers", sim_args.routers, "router count");
    sim_cmd->add_option("--peers", sim_args.peers, "peer count");
    sim_cmd->add_option("--max-paths", sim_args.max_paths, "maximum-paths setting");
    sim_cmd->add_option("--probes", sim_args.probes, "probes per destination");
    sim_cmd->add_option("--interval", sim_args.interval, "seconds between probes");
    sim_cmd->add_option("--mix", sim_args.mix, "2/3/4-link percentage mix (a,b,c)");

    DetectArgs det_args;
    auto* det_cmd = app.add_subcommand("detect", "run the LG campaign");
    det_cmd->add_option("--fixtures", det_args.fixtures, "LG fixture directory");
    det_cmd->add_option("--in", det_args.scenario, "scenario file (simulated transport)");
    det_cmd->add_option("--prefixes", det_args.prefixes, "prefix,origin_asn CSV");
    det_cmd->add_option("--ixp", det_args.ixp, "IXP membership CSV");
    det_cmd->add_option("--out", det_args.out, "output directory");
    det_cmd->add_option("--rate-limit", det_args.rate_limit, "max queries per minute");
    det_cmd->add_option("--threads", det_args.threads, "parallel query workers");

    AnalyzeArgs ana_args;
    auto* ana_cmd = app.add_subcommand("analyze", "profile traceroute measurements");
    ana_cmd->add_option("--in", ana_args.in, "traceroute file")->required();
    ana_cmd->add_option("--oracle-primary", ana_args.primary, "primary IP oracle CSV")
        ->required();
    ana_cmd->add_option("--oracle-secondary", ana_args.secondary, "secondary IP oracle CSV")
        ->required();
    ana_cmd->add_option("--ixp", ana_args.ixp, "IXP membership CSV")->required();
    ana_cmd->add_option("--out", ana_args.out, "output directory");
    ana_cmd->add_option("--format", ana_args.format, "stdout format: text or csv")
        ->check(CLI::IsMember({"text", "csv"}));

    ReportArgs rep_args;
    auto* rep_cmd = app.add_subcommand("report", "aggregate evidence");
    rep_cmd->add_option("--in", rep_args.in, "evidence CSV")->required();
    rep_cmd->add_option("--asrank", rep_args.asrank, "asn,rank,cone,name CSV");
    rep_cmd->add_option("--out", rep_args.out, "output directory");
    rep_cmd->add_option("--group-bounds", rep_args.bounds, "rank group bounds a,b,c");
    rep_cmd->add_option("--format", rep_args.format, "stdout format: text or csv")
        ->check(CLI::IsMember({"text", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim_args);
        if (det_cmd->parsed()) return cmd_detect(det_args);
        if (ana_cmd->parsed()) return cmd_analyze(ana_args);
        if (rep_cmd->parsed()) return cmd_report(rep_args);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    }
    return kUsage;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "mbgp/campaign.hpp"
#include "mbgp/simulator.hpp"
#include "mbgp/tables.hpp"

namespace fs = std::filesystem;
using namespace mbgp;

namespace {

const std::string kBin = MBGPKIT_BIN;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    fs::path out_file = fs::temp_directory_path() / "mbgpkit_cli_stdout.txt";
    std::string cmd = kBin + " " + args + " > " + out_file.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = fs::exists(out_file) ? read_text_file(out_file.string()) : "";
    return r;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            files[fs::relative(entry.path(), dir).string()] =
                read_text_file(entry.path().string());
    return files;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("cli: no subcommand is a usage error") {
    CHECK(run("").exit_code == 1);
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("cli: simulate is deterministic per seed and emits all artifacts") {
    TempDir a("mbgpkit_sim_a"), b("mbgpkit_sim_b"), c("mbgpkit_sim_c");
    CHECK(run("simulate --seed 7 --routers 3 --peers 10 --out " + a.str()).exit_code == 0);
    CHECK(run("simulate --seed 7 --routers 3 --peers 10 --out " + b.str()).exit_code == 0);
    CHECK(run("simulate --seed 8 --routers 3 --peers 10 --out " + c.str()).exit_code == 0);

    auto fa = snapshot(a.path), fb = snapshot(b.path), fc = snapshot(c.path);
    CHECK(fa == fb);  // byte-identical trees
    CHECK(fa != fc);

    for (const char* want : {"scenario.txt", "ground_truth.csv", "traceroutes.txt",
                             "prefixes.csv", "ixp.csv", "asrank.csv", "oracles/primary.csv",
                             "oracles/secondary.csv"})
        CHECK(fa.count(want) == 1);
    bool has_summary = false, has_detail = false;
    for (const auto& [name, body] : fa) {
        if (name.find("lg/") == 0 && name.find(".summary.txt") != std::string::npos)
            has_summary = true;
        if (name.find("lg/") == 0 && name.find(".detail.") != std::string::npos)
            has_detail = true;
    }
    CHECK(has_summary);
    CHECK(has_detail);

    // link-count mix echoed in the scenario header
    CHECK(fa["scenario.txt"].find("mix 82.8 8.7 8.4") != std::string::npos);
    TempDir d("mbgpkit_sim_mix");
    CHECK(run("simulate --seed 7 --routers 3 --peers 10 --mix 70,20,10 --out " + d.str())
              .exit_code == 0);
    CHECK(read_text_file(d.path / "scenario.txt").find("mix 70 20 10") != std::string::npos);

    // ground truth rows equal the configured deployments
    auto truth = sim::ground_truth_from_csv(fa["ground_truth.csv"]);
    auto scenario = sim::scenario_from_text(fa["scenario.txt"]);
    size_t mbgp_links = 0;
    for (const auto& l : scenario.links)
        if (l.mbgp()) mbgp_links++;
    CHECK(truth.rows.size() == mbgp_links);
}

TEST_CASE("cli: detect over scenario and over fixtures give the ground truth") {
    TempDir simdir("mbgpkit_cli_sim"), det1("mbgpkit_cli_det1"), det2("mbgpkit_cli_det2");
    REQUIRE(run("simulate --seed 21 --routers 4 --peers 14 --out " + simdir.str())
                .exit_code == 0);

    auto r1 = run("detect --in " + simdir.str() + "/scenario.txt --out " + det1.str());
    CHECK(r1.exit_code == 0);
    auto r2 = run("detect --fixtures " + simdir.str() + "/lg --prefixes " + simdir.str() +
                  "/prefixes.csv --ixp " + simdir.str() + "/ixp.csv --out " + det2.str());
    CHECK(r2.exit_code == 0);

    auto ev1 = campaign::evidences_from_text(
        read_text_file(det1.path / "evidence.csv"));
    auto ev2 = campaign::evidences_from_text(
        read_text_file(det2.path / "evidence.csv"));
    CHECK(campaign::evidences_to_text(ev1) == campaign::evidences_to_text(ev2));

    auto truth = sim::ground_truth_from_csv(
        read_text_file(simdir.path / "ground_truth.csv"));
    std::set<std::pair<std::string, uint32_t>> detected, expected;
    for (const auto& e : ev1) detected.emplace(e.router, e.peering_as);
    for (const auto& row : truth.rows) expected.emplace(row.router, row.peer_asn);
    CHECK(detected == expected);

    CHECK(fs::exists(det1.path / "campaign_log.txt"));

    // idempotence: re-running produces byte-identical evidence
    TempDir det3("mbgpkit_cli_det3");
    REQUIRE(run("detect --in " + simdir.str() + "/scenario.txt --out " + det3.str())
                .exit_code == 0);
    CHECK(read_text_file(det1.path / "evidence.csv") ==
          read_text_file(det3.path / "evidence.csv"));
}

TEST_CASE("cli: analyze profiles the simulated traceroutes") {
    TempDir simdir("mbgpkit_cli_sim2"), ana("mbgpkit_cli_ana");
    REQUIRE(run("simulate --seed 33 --routers 4 --peers 12 --probes 2 --out " +
                simdir.str()).exit_code == 0);
    auto r = run("analyze --in " + simdir.str() + "/traceroutes.txt --oracle-primary " +
                 simdir.str() + "/oracles/primary.csv --oracle-secondary " + simdir.str() +
                 "/oracles/secondary.csv --ixp " + simdir.str() + "/ixp.csv --out " +
                 ana.str());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("deployment ") != std::string::npos);
    CHECK(r.out.find("shape:") != std::string::npos);
    CHECK(fs::exists(ana.path / "profiles.txt"));
    CHECK(fs::exists(ana.path / "profiles.csv"));

    auto truth = sim::ground_truth_from_csv(
        read_text_file(simdir.path / "ground_truth.csv"));
    size_t deployments = 0;
    size_t pos = 0;
    while ((pos = r.out.find("deployment ", pos)) != std::string::npos) {
        deployments++;
        pos += 11;
    }
    CHECK(deployments == truth.rows.size());

    // csv format goes to stdout on request
    auto rc = run("analyze --in " + simdir.str() + "/traceroutes.txt --oracle-primary " +
                  simdir.str() + "/oracles/primary.csv --oracle-secondary " + simdir.str() +
                  "/oracles/secondary.csv --ixp " + simdir.str() + "/ixp.csv --out " +
                  ana.str() + " --format csv");
    CHECK(rc.exit_code == 0);
    CHECK(rc.out.find("# src,dst_prefix") == 0);
}

TEST_CASE("cli: analyze rejects empty input with exit 2") {
    TempDir dir("mbgpkit_cli_empty");
    write_text_file((dir.path / "empty.txt").string(), "");
    write_text_file((dir.path / "o.csv").string(), "10.0.0.0/8,64500\n");
    write_text_file((dir.path / "ixp.csv").string(), "");
    auto r = run("analyze --in " + (dir.path / "empty.txt").string() + " --oracle-primary " +
                 (dir.path / "o.csv").string() + " --oracle-secondary " +
                 (dir.path / "o.csv").string() + " --ixp " + (dir.path / "ixp.csv").string() +
                 " --out " + dir.str());
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: report aggregates evidence with the summary line") {
    TempDir dir("mbgpkit_cli_report");
    lg::MbgpEvidence e;
    e.router = "tor1";
    e.peering_as = 19752;
    e.prefix = *Prefix::parse("142.46.150.0/24");
    e.next_hops = {*Ipv4::parse("198.32.181.46"), *Ipv4::parse("206.108.34.48")};
    e.link_count = 2;
    write_text_file((dir.path / "evidence.csv").string(),
                    campaign::evidences_to_text({e}));

    auto r = run("report --in " + (dir.path / "evidence.csv").string() + " --out " + dir.str());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("1 routers, 1 ASes, 1 cases") != std::string::npos);
    CHECK(r.out.find("2 links: 1 (100.0%)") != std::string::npos);
    CHECK(fs::exists(dir.path / "report.txt"));
    CHECK(fs::exists(dir.path / "link_histogram.csv"));
    CHECK(fs::exists(dir.path / "per_router.csv"));
    CHECK(fs::exists(dir.path / "per_as.csv"));
    CHECK(fs::exists(dir.path / "rank_groups.csv"));

    CHECK(run("report --in /nonexistent/evidence.csv").exit_code == 2);
}

TEST_CASE("cli: detect exits 3 when targets stay unreachable") {
    TempDir simdir("mbgpkit_cli_partial");
    REQUIRE(run("simulate --seed 21 --routers 4 --peers 14 --out " + simdir.str())
                .exit_code == 0);
    // drop the fixture behind a deployment's first target so every delivery
    // attempt for it fails
    auto truth = sim::ground_truth_from_csv(
        read_text_file(simdir.path / "ground_truth.csv"));
    REQUIRE(!truth.rows.empty());
    const auto& row = truth.rows.front();
    fs::path victim = simdir.path / "lg" /
                      (row.router + ".detail." + row.prefix.host(1).str() + ".txt");
    REQUIRE(fs::exists(victim));
    fs::remove(victim);
    TempDir det("mbgpkit_cli_partial_out");
    auto r = run("detect --fixtures " + simdir.str() + "/lg --prefixes " + simdir.str() +
                 "/prefixes.csv --ixp " + simdir.str() + "/ixp.csv --out " + det.str());
    CHECK(r.exit_code == 3);
    CHECK(fs::exists(det.path / "failures.csv"));
    CHECK(fs::exists(det.path / "evidence.csv"));  // partial results, not silence
}

TEST_CASE("cli: detect exits 2 when no summary parses") {
    TempDir dir("mbgpkit_cli_nosummaries");
    fs::create_directories(dir.path / "lg");
    write_text_file((dir.path / "lg" / "tor1.summary.txt").string(), "no bgp here\n");
    write_text_file((dir.path / "prefixes.csv").string(), "10.1.0.0/24,64601\n");
    write_text_file((dir.path / "ixp.csv").string(),
                    "IX-a,172.20.0.0/24,64601,172.20.0.1\n");
    auto r = run("detect --fixtures " + (dir.path / "lg").string() + " --prefixes " +
                 (dir.path / "prefixes.csv").string() + " --ixp " +
                 (dir.path / "ixp.csv").string() + " --out " + dir.str() + "/out");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: detect replays the published single-response fixture") {
    TempDir dir("mbgpkit_cli_fig1");
    fs::create_directories(dir.path / "lg");
    write_text_file((dir.path / "lg" / "tor1.summary.txt").string(),
                    "Neighbor          AS        State/PfxRcd  Up/Down\n"
                    "198.32.181.46     19752     12            10w4d\n"
                    "206.108.34.48     19752     12            10w4d\n");
    write_text_file(
        (dir.path / "lg" / "tor1.detail.142.46.150.1.txt").string(),
        "Prefix: 142.46.150.0/24\n"
        "Status: M,E  NextHop: 198.32.181.46  LocPrf: 100  Weight: 0  MED: 0\n"
        "Path: 19752\n"
        "\n"
        "Prefix: 142.46.150.0/24\n"
        "Status: M,E  NextHop: 206.108.34.48  LocPrf: 100  Weight: 0  MED: 0\n"
        "Path: 19752\n");
    write_text_file((dir.path / "prefixes.csv").string(), "142.46.150.0/24,19752\n");
    write_text_file((dir.path / "ixp.csv").string(),
                    "Equinix Toronto,198.32.181.0/24,19752,198.32.181.46\n"
                    "TorIX,206.108.34.0/24,19752,206.108.34.48\n");
    auto r = run("detect --fixtures " + (dir.path / "lg").string() + " --prefixes " +
                 (dir.path / "prefixes.csv").string() + " --ixp " +
                 (dir.path / "ixp.csv").string() + " --out " + dir.str() + "/out");
    CHECK(r.exit_code == 0);
    auto evidence = read_text_file(dir.path / "out" / "evidence.csv");
    CHECK(evidence.find("tor1,19752,142.46.150.0/24,2,198.32.181.46;206.108.34.48") !=
          std::string::npos);
}

TEST_CASE("cli: analyze skips malformed lines but keeps going") {
    TempDir simdir("mbgpkit_cli_sim3"), ana("mbgpkit_cli_ana2");
    REQUIRE(run("simulate --seed 5 --routers 2 --peers 8 --probes 1 --out " +
                simdir.str()).exit_code == 0);
    auto traces = read_text_file(simdir.path / "traceroutes.txt");
    write_text_file((simdir.path / "traceroutes.txt").string(),
                    "this line is garbage\n" + traces + "another bad line\n");
    auto r = run("analyze --in " + simdir.str() + "/traceroutes.txt --oracle-primary " +
                 simdir.str() + "/oracles/primary.csv --oracle-secondary " + simdir.str() +
                 "/oracles/secondary.csv --ixp " + simdir.str() + "/ixp.csv --out " +
                 ana.str());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("2 malformed lines") != std::string::npos);
}

TEST_CASE("cli: config file supplies defaults, flags win") {
    TempDir dir("mbgpkit_cli_cfg");
    write_text_file((dir.path / "run.conf").string(),
                    "simulate.seed=99\nsimulate.routers=3\nsimulate.peers=8\n"
                    "simulate.out=" + (dir.path / "from_config").string() + "\n");
    auto r = run("--config " + (dir.path / "run.conf").string() + " simulate");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir.path / "from_config" / "scenario.txt"));
    auto scenario = sim::scenario_from_text(
        read_text_file(dir.path / "from_config" / "scenario.txt"));
    CHECK(scenario.seed == 99);
    CHECK(scenario.routers.size() == 3);

    // flag overrides the config value
    auto r2 = run("--config " + (dir.path / "run.conf").string() +
                  " simulate --seed 123 --out " + (dir.path / "flag_wins").string());
    CHECK(r2.exit_code == 0);
    auto s2 = sim::scenario_from_text(
        read_text_file(dir.path / "flag_wins" / "scenario.txt"));
    CHECK(s2.seed == 123);
}

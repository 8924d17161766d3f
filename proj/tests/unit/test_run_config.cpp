#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "conespec/run_config.hpp"
#include "test_support.hpp"

using namespace conespec;
using Catch::Matchers::ContainsSubstring;

namespace {

run::RunConfig parse(const std::string& text, const std::string& name = "cfg.cfg") {
    return run::parse_run_config(config::parse(text, name));
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return "no error";
}

}  // namespace

TEST_CASE("geometry section: caps, overrides and explicit channels", "[run_config]") {
    const auto rc = parse(R"(
        cmd = limit-spectrum
        [geometry]
        channels = [(1/2, 2), (0, 1), (3/4, 1)]
        r0 = 1/4
        cap_m2 = robin(-1/2)
        cap_m1 = neumann
        cap_m2_overrides = [(0, dirichlet), (3/4, robin(-3/4))]
    )");
    REQUIRE(rc.geometry);
    const auto& g = *rc.geometry;
    CHECK(g.r0 == 0.25);
    REQUIRE(g.channels.size() == 3);
    CHECK(g.channels[0].gamma == 0.0);
    CHECK(g.channels[1].mult == 2);
    CHECK(g.m2_cap(0.5) == CapCondition::robin(-0.5));
    CHECK(g.m2_cap(0.0) == CapCondition::dirichlet());
    CHECK(g.m2_cap(0.75) == CapCondition::robin(-0.75));
    CHECK(g.m1_cap(0.5) == CapCondition::neumann());
    CHECK(rc.cmd == "limit-spectrum");
    CHECK(rc.stem == "cfg");
}

TEST_CASE("geometry channels can come from a catalog cross-section", "[run_config]") {
    const auto rc = parse(R"(
        [cross_section]
        catalog = round_sphere
        params = [2]
        cutoff = 3
        [geometry]
        channel_cutoff = 1
    )");
    REQUIRE(rc.geometry);
    for (const auto& ch : rc.geometry->channels) CHECK(std::abs(ch.gamma) <= 1.0);
    CHECK(rc.geometry->channels.size() == 2);   // gamma = -1, 1
}

TEST_CASE("sweep section defaults and validation", "[run_config]") {
    const auto rc = parse("[sweep]\n");
    REQUIRE(rc.sweep);
    CHECK(rc.sweep->eps == default_eps_list());
    CHECK(rc.sweep->count == 5);
    CHECK(rc.sweep->solver == SolverTag::Shooting);
    CHECK(error_of("[sweep]\neps = [1e-2, 1e-1]\n") == "cfg.cfg:2: field 'eps': values must be strictly decreasing");
    CHECK(error_of("[sweep]\nsolver = magic\n") ==
          "cfg.cfg:2: field 'solver': unknown solver 'magic' (expected shooting or fd)");
    CHECK(error_of("[sweep]\ncount = 0\n") == "cfg.cfg:2: field 'count': must be positive");
}

TEST_CASE("schema violations name line and field", "[run_config]") {
    CHECK(error_of("[geometry]\nchannels = [(0, 1)]\ncap_m3 = neumann\n") ==
          "cfg.cfg:3: field 'cap_m3': unknown key in [geometry]");
    CHECK(error_of("[geometry]\nchannels = [(0, 1)]\ncap_m2 = robin()\n") ==
          "cfg.cfg:3: field 'cap_m2': robin takes exactly one argument kappa");
    CHECK(error_of("[geometry]\nchannels = [(0, 1)]\ncap_m2 = sticky\n") ==
          "cfg.cfg:3: field 'cap_m2': expected dirichlet, neumann or robin(kappa)");
    CHECK(error_of("[geometry]\nr0 = 1/2\n") ==
          "cfg.cfg:1: field 'channels': no channels: add a [cross_section] section or geometry.channels");
    CHECK(error_of("[plots]\n") == "cfg.cfg:1: unknown section [plots]");
    CHECK(error_of("cmd = dance\n") == "cfg.cfg:1: field 'cmd': unknown command 'dance'");
    CHECK_THAT(error_of("[geometry]\nchannels = [(0, 1)]\ncap_m2_overrides = [(1, neumann)]\n"),
               ContainsSubstring("matches no channel"));
    CHECK_THAT(error_of("[cross_section]\ncatalog = round_sphere\nparams = [3]\ncutoff = 2\n"),
               ContainsSubstring("only n = 2 is shipped"));
}

TEST_CASE("commands require their sections", "[run_config]") {
    const auto rc = parse("cmd = sweep\n[sweep]\n");
    std::ostringstream log;
    CHECK_THROWS_WITH(run::execute(rc, {}, log), "cfg.cfg: missing section [geometry] required by cmd=sweep");
    const auto none = parse("[sweep]\n");
    CHECK_THROWS_WITH(run::execute(none, {}, log), ContainsSubstring("no command"));
}

TEST_CASE("a-spectrum command writes the table", "[run_config]") {
    const auto dir = test::scratch_dir("run_a");
    const auto rc = parse("[cross_section]\nn = 2\nbetti = [1, 0, 1]\ncoexact_modes = [(0, 2, 3)]\ncutoff = 10\n",
                          "s2.cfg");
    run::ExecOptions ex;
    ex.cmd = "a-spectrum";
    ex.out_dir = dir.string();
    std::ostringstream log;
    const auto out = run::execute(rc, ex, log);
    CHECK(out.exit_code == 0);
    CHECK(log.str() == "gamma=-2 mult=3\ngamma=-1 mult=5\ngamma=1 mult=5\ngamma=2 mult=3\n");
    CHECK(test::read_file(dir / "s2_a_spectrum.csv") == "gamma,mult\n-2,3\n-1,5\n1,5\n2,3\n");
}

TEST_CASE("sweep artifacts are byte-identical across runs and thread counts", "[run_config]") {
    const std::string cfg = R"(
        cmd = sweep
        [geometry]
        channels = [(0, 1)]
        cap_m2 = neumann
        [sweep]
        eps = [1e-1, 1e-2, 1e-3, 1e-4]
        count = 2
        [outputs]
        stem = det
    )";
    const auto rc = parse(cfg);
    const auto a = test::scratch_dir("run_det_a"), b = test::scratch_dir("run_det_b");
    std::ostringstream log;
    run::ExecOptions ea, eb;
    ea.out_dir = a.string();
    ea.threads = 1;
    eb.out_dir = b.string();
    eb.threads = 4;
    const auto oa = run::execute(rc, ea, log);
    const auto ob = run::execute(rc, eb, log);
    REQUIRE(oa.artifacts.size() == 4);   // sweep CSV, fit summary, one gnuplot file per N
    for (const auto& name : {"det_sweep.csv", "det_fit_summary.json", "det_N1.dat", "det_N2.dat"}) {
        INFO(name);
        CHECK(test::read_file(a / name) == test::read_file(b / name));
        CHECK_FALSE(test::read_file(a / name).empty());
    }
    const auto fits = nlohmann::json::parse(test::read_file(a / "det_fit_summary.json"));
    CHECK(fits["fits"][0]["best"]["family"] == "eps^alpha");
}

TEST_CASE("limit-spectrum command reports the W decision", "[run_config]") {
    const auto dir = test::scratch_dir("run_limit");
    const auto rc = parse(R"(
        cmd = limit-spectrum
        [geometry]
        channels = [(1/2, 2), (0, 1)]
        cap_m2 = robin(-1/2)
        cap_m2_overrides = [(0, neumann)]
        [sweep]
        count = 4
        [outputs]
        stem = lim
    )");
    run::ExecOptions ex;
    ex.out_dir = dir.string();
    std::ostringstream log;
    run::execute(rc, ex, log);
    const auto w = nlohmann::json::parse(test::read_file(dir / "lim_w_decision.json"));
    CHECK(w["i_half"] == 2);
    CHECK(w["zero_mult"] == 2);
    CHECK(w["w"] == nlohmann::json::array({0.0}));
    const auto rep = io::from_csv(test::read_file(dir / "lim_limit_spectrum.csv"));
    CHECK(rep.zero_mult == 2);
}

TEST_CASE("topology command flags inconsistent input files", "[run_config]") {
    const auto dir = test::scratch_dir("run_topo");
    std::ofstream(dir / "bad.cfg") << "name = bad\nm = 3\nbetti_M = [1, 0, 0, 1]\nbetti_M1 = [1, 1, 0, 0]\n"
                                      "betti_M2 = [1, 1, 0, 0]\nbetti_Sigma = [1, 2, 1]\n"
                                      "relative_betti_M2 = [0, 0, 2, 1]\n";
    std::ofstream(dir / "run.cfg") << "cmd = topology\n[topology]\nfile = \"bad.cfg\"\n";
    const auto rc = run::load_run_config((dir / "run.cfg").string());
    run::ExecOptions ex;
    ex.out_dir = (dir / "out").string();
    std::ostringstream log;
    const auto out = run::execute(rc, ex, log);
    CHECK(out.exit_code == 2);
    CHECK_THAT(log.str(), ContainsSubstring("bad: INCONSISTENT"));
}

TEST_CASE("every shipped run config parses", "[run_config]") {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(CONESPEC_CONFIG_DIR)) {
        if (e.path().extension() != ".cfg") continue;
        INFO(e.path().string());
        const auto rc = run::load_run_config(e.path().string());
        CHECK(rc.cmd.has_value());
        ++n;
    }
    CHECK(n >= 8);
}

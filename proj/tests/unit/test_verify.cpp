#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <string>

#include <json.hpp>

#include "conespec/verify.hpp"
#include "test_support.hpp"

using namespace conespec;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("criteria are numbered 1..10 with stable keys", "[verify]") {
    const auto keys = verify::criterion_keys();
    CHECK(keys == std::vector<std::string>{"a-spectrum", "dual-solver", "analytic", "theorem-a", "theorem-b",
                                           "pseudomode", "trace-decay", "hardy", "topology", "determinism"});
}

TEST_CASE("only-filter accepts keys and numbers", "[verify]") {
    verify::Options opt;
    opt.only = {"theorem-b", "1"};
    const auto rep = verify::run(opt);
    REQUIRE(rep.results.size() == 2);
    CHECK(rep.results[0].id == 1);
    CHECK(rep.results[1].key == "theorem-b");
    CHECK(rep.all_passed());
    opt.only = {"nonsense"};
    CHECK_THROWS_AS(verify::run(opt), InputError);
}

TEST_CASE("report lines and JSON", "[verify]") {
    verify::CriterionResult r{3, "analytic", "closed-form eigenvalues", true, "ok", 0.25};
    CHECK(verify::format_line(r) == "PASS [3] analytic: closed-form eigenvalues -- ok (0.25 s)");
    verify::Report rep;
    rep.results = {r};
    const auto j = nlohmann::json::parse(verify::to_json(rep));
    CHECK(j["passed"] == true);
    CHECK(j["criteria"][0]["key"] == "analytic");
    CHECK_FALSE(j["criteria"][0].contains("seconds"));   // artifacts stay byte-identical
}

TEST_CASE("a tampered Bessel evaluator fails the dual-solver criterion", "[verify]") {
    verify::Options opt;
    opt.only = {"dual-solver"};
    opt.bessel = &verify::tampered_bessel();
    const auto rep = verify::run(opt);
    REQUIRE(rep.results.size() == 1);
    CHECK_FALSE(rep.results[0].passed);
    CHECK_THAT(rep.results[0].detail, ContainsSubstring("channel gamma="));
}

TEST_CASE("the topology criterion needs the decomposition catalog", "[verify]") {
    verify::Options opt;
    opt.only = {"topology"};
    opt.topology_dir = CONESPEC_DATA_DIR;
    CHECK(verify::run(opt).all_passed());
    opt.topology_dir = "/nonexistent";
    CHECK_FALSE(verify::run(opt).all_passed());
}

TEST_CASE("seed comes from CONESPEC_SEED", "[verify]") {
    const char* old = std::getenv("CONESPEC_SEED");
    const std::string saved = old ? old : "";
    ::setenv("CONESPEC_SEED", "12345", 1);
    CHECK(verify::seed_from_env() == 12345u);
    ::setenv("CONESPEC_SEED", "12x", 1);
    CHECK_THROWS_AS(verify::seed_from_env(), InputError);
    ::unsetenv("CONESPEC_SEED");
    CHECK(verify::seed_from_env() == verify::kDefaultSeed);
    if (old) ::setenv("CONESPEC_SEED", saved.c_str(), 1);
}

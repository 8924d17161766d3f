#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "conespec/report_io.hpp"
#include "conespec/spectra.hpp"
#include "conespec/verify.hpp"
#include "test_support.hpp"

using namespace conespec;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

Geometry single(double gamma, CapCondition m2, CapCondition m1 = CapCondition::dirichlet(), long mult = 1) {
    Geometry g;
    g.channels = {make_channel(gamma, mult)};
    g.cap_m2 = m2;
    g.cap_m1 = m1;
    return g;
}

}  // namespace

TEST_CASE("gamma = 0 limit depends on W", "[spectra]") {
    const double pi = std::numbers::pi;
    const auto neu = single(0.0, CapCondition::neumann());
    const auto dir = single(0.0, CapCondition::dirichlet());
    const auto ln = limit_spectrum(neu, compute_w_decision(neu), 5).expanded();
    const auto ld = limit_spectrum(dir, compute_w_decision(dir), 5).expanded();
    for (int k = 1; k <= 5; ++k) {
        CHECK_THAT(ln[k - 1], WithinRel(std::pow((k - 0.5) * pi, 2), 1e-10));
        CHECK_THAT(ld[k - 1], WithinRel(std::pow(k * pi, 2), 1e-10));
    }
    const auto en = eps_spectrum(neu, 1e-6, 5).expanded();
    const auto ed = eps_spectrum(dir, 1e-6, 5).expanded();
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(en[k] - ln[k]) <= 1e-3 * ln[k]);
        CHECK(std::abs(ed[k] - ld[k]) <= 1e-3 * ld[k]);
    }
}

TEST_CASE("mixed geometry: frozen eps and limit spectra", "[spectra]") {
    const auto g = verify::detail::theorem_b_geometry();
    const auto w = compute_w_decision(g);
    const auto lim = limit_spectrum(g, w, 6);
    CHECK(lim.is_limit);
    CHECK(lim.zero_mult == 4);
    CHECK(io::to_csv(lim) ==
          "eps,lambda,gamma,mult,solver\n"
          "limit,0,,4,kernel\n"
          "limit,5.783185962946783,-0.5,1,shooting\n"
          "limit,9.86960440108936,-1,1,shooting\n"
          "limit,9.86960440108936,0,1,shooting\n"
          "limit,14.681970642123892,0.5,2,shooting\n"
          "limit,17.350776131369486,0.75,1,shooting\n");
    const auto rep = eps_spectrum(g, 1e-4, 6);
    const std::vector<double> want = {0.0, 0.008926467500270043, 0.21811224678597377, 0.21811224678597377,
                                      6.622178779421471, 9.870591435556438};
    const auto got = rep.expanded();
    REQUIRE(got.size() == want.size());
    CHECK(got[0] == Catch::Approx(0.0).margin(1e-12));
    for (std::size_t i = 1; i < want.size(); ++i) CHECK_THAT(got[i], WithinRel(want[i], 1e-9));
}

TEST_CASE("truncation keeps whole entries until the count is reached", "[spectra]") {
    std::vector<SpectrumEntry> e = {{3.0, 0.0, 1, "shooting"}, {1.0, 0.5, 2, "shooting"}, {1.0, -0.5, 2, "shooting"},
                                    {2.0, 1.0, 1, "shooting"}};
    detail::sort_and_truncate(e, 3);
    REQUIRE(e.size() == 2);
    CHECK(e[0].gamma == -0.5);   // ties broken by gamma
    CHECK(e[1].gamma == 0.5);
}

TEST_CASE("finite-difference spectra carry the fd tag", "[spectra]") {
    const auto g = single(1.0, CapCondition::robin(0.3), CapCondition::neumann(), 3);
    SpectrumOptions fd;
    fd.solver = SolverTag::FiniteDifference;
    const auto a = eps_spectrum(g, 0.2, 3);
    const auto b = eps_spectrum(g, 0.2, 3, fd);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(b.entries[i].solver == "fd");
        CHECK(b.entries[i].mult == 3);
        CHECK(std::abs(a.entries[i].lambda - b.entries[i].lambda) <= 1e-6 * std::max(1.0, a.entries[i].lambda));
    }
}

TEST_CASE("negative limit eigenvalues are rejected as non-physical", "[spectra]") {
    const auto g = single(0.0, CapCondition::neumann(), CapCondition::robin(3.0));
    CHECK_THROWS_WITH(limit_spectrum(g, compute_w_decision(g), 3),
                      ContainsSubstring("channel gamma=0: negative limit eigenvalue"));
}

TEST_CASE("eps spectra require eps in (0, 1)", "[spectra]") {
    const auto g = single(0.0, CapCondition::neumann());
    CHECK_THROWS_AS(eps_spectrum(g, 0.0, 3), InputError);
    CHECK_THROWS_AS(eps_spectrum(g, 1.0, 3), InputError);
    CHECK_THROWS_AS(eps_spectrum(g, 0.1, 0), InputError);
}

TEST_CASE("pseudomode quotient: frozen values and 1/|log eps| decay", "[spectra][pseudomode]") {
    const auto g = single(0.5, CapCondition::robin(-0.5), CapCondition::dirichlet(), 2);
    const auto a = pseudomode_quotient(g, 1e-2);
    const auto b = pseudomode_quotient(g, 1e-4);
    const auto c = pseudomode_quotient(g, 1e-8);
    CHECK_THAT(a.rayleigh, WithinRel(1.5187665168142024, 1e-6));
    CHECK_THAT(b.rayleigh, WithinRel(0.78838730371248156, 1e-6));
    CHECK_THAT(c.rayleigh, WithinRel(0.40186817095320249, 1e-6));
    CHECK_THAT(c.l2_norm, WithinRel(1.0098789383557925, 1e-6));
    // rayleigh * |log eps| stays bounded while eps^2 shrinks by 10^12.
    const double ra = a.rayleigh * std::abs(std::log(1e-2)), rc = c.rayleigh * std::abs(std::log(1e-8));
    CHECK(rc / ra < 1.2);
    CHECK(rc / ra > 0.8);
}

TEST_CASE("pseudomode preconditions", "[spectra][pseudomode]") {
    const auto zero = single(0.0, CapCondition::neumann());
    CHECK_THROWS_WITH(pseudomode_quotient(zero, 1e-4, 0.5), ContainsSubstring("needs this channel"));
    const auto dir = single(0.5, CapCondition::dirichlet());
    CHECK_THROWS_WITH(pseudomode_quotient(dir, 1e-4, 0.5), ContainsSubstring("needs t = 0"));
    // Control: the gamma = 0 quotient does not decay.
    CHECK_THAT(pseudomode_quotient(zero, 1e-4, 0.0).rayleigh, WithinRel(7.825778147026405, 1e-6));
}

TEST_CASE("CSV and JSON round-trips are lossless", "[report_io][property]") {
    std::mt19937_64 rng(test::seed());
    std::uniform_real_distribution<double> u(-50.0, 1e4), ue(1e-9, 0.9);
    for (int trial = 0; trial < 100; ++trial) {
        SpectrumReport r;
        r.is_limit = trial % 3 == 0;
        if (r.is_limit) r.zero_mult = trial;
        else r.eps = ue(rng);
        for (int i = 0; i < 1 + trial % 7; ++i) r.entries.push_back({u(rng), u(rng) / 1e3, 1 + i, i % 2 ? "fd" : "shooting"});
        const auto csv = io::to_csv(r);
        CHECK(io::from_csv(csv) == r);
        CHECK(io::to_csv(io::from_csv(csv)) == csv);
        const auto js = io::to_json(r);
        CHECK(io::from_json(js) == r);
        CHECK(io::to_json(io::from_json(js)) == js);
    }
}

TEST_CASE("malformed reports are input errors", "[report_io]") {
    CHECK_THROWS_AS(io::from_csv("eps,lambda\n"), InputError);
    CHECK_THROWS_WITH(io::from_csv("eps,lambda,gamma,mult,solver\n0.1,x,0,1,shooting\n"),
                      ContainsSubstring("csv line 2"));
    CHECK_THROWS_AS(io::from_csv("eps,lambda,gamma,mult,solver\n0.1,0,,3,kernel\n"), InputError);
    CHECK_THROWS_AS(io::from_json("{\"eps\": \"soon\", \"entries\": []}"), InputError);
    CHECK_THROWS_AS(io::from_json("not json"), InputError);
}

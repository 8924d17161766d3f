#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "conespec/channel_model.hpp"
#include "conespec/verify.hpp"
#include "test_support.hpp"

using namespace conespec;

TEST_CASE("channels carry the potential and both branch exponents", "[channel_model]") {
    const auto ch = make_channel(0.75, 2);
    CHECK(ch.potential_coeff == 0.75 * 1.75);
    CHECK(ch.branch_exponents.first == 1.75);
    CHECK(ch.branch_exponents.second == -0.75);
    CHECK_THROWS_AS(make_channel(0.0, 0), InputError);
}

TEST_CASE("make_channels merges equal gammas and sorts", "[channel_model]") {
    const std::vector<ASpectrumEntry> s = {{1.0, 2, {}}, {-1.0, 1, {}}, {1.0 + 1e-14, 3, {}}};
    const auto ch = make_channels(s);
    REQUIRE(ch.size() == 2);
    CHECK(ch[0].gamma == -1.0);
    CHECK(ch[1].mult == 5);
}

TEST_CASE("T-scalar closed forms", "[channel_model]") {
    const double r0 = 0.5;
    // Dirichlet: u = (r/r0)^{g+1} - (r/r0)^{-g}, t = (2g+1) / (1 - r0^{2g+1}).
    const auto ch = make_channel(0.25, 1);
    const double want = 1.5 / (1.0 - std::pow(r0, 1.5));
    CHECK_THAT(t_scalar(ch, r0, CapCondition::dirichlet()).value, Catch::Matchers::WithinRel(want, 1e-14));
    // Robin(gamma + 1) keeps only r^{gamma+1}: t = 2 gamma + 1.
    CHECK_THAT(t_scalar(ch, r0, CapCondition::robin(1.25)).value, Catch::Matchers::WithinRel(1.5, 1e-14));
    // gamma = -1/2 uses the log basis r^{1/2}(A + B log r); Neumann fixes B/A = -1/2 / (1 + log(r0)/2).
    const auto half = make_channel(-0.5, 1);
    const auto t = t_scalar(half, r0, CapCondition::neumann());
    CHECK(t.kind == TScalar::Kind::Finite);
    CHECK_THAT(t.value, Catch::Matchers::WithinRel(-0.5 / (1.0 + 0.5 * std::log(r0)), 1e-14));
}

TEST_CASE("Robin(-gamma) realizes t = 0 and other Robin caps do not", "[channel_model][property]") {
    std::mt19937_64 rng(test::seed());
    std::uniform_real_distribution<double> gam(-3.0, 3.0), kap(-4.0, 4.0), rad(0.05, 0.95);
    for (int trial = 0; trial < 500; ++trial) {
        const double g = gam(rng), r0 = rad(rng);
        if (std::abs(g + 0.5) < 1e-3) continue;
        const auto ch = make_channel(g, 1);
        INFO("gamma=" << g << " r0=" << r0);
        CHECK(t_scalar(ch, r0, CapCondition::robin(-g)).is_zero());
        const double k = kap(rng);
        if (std::abs(k + g) > 1e-3 && std::abs(k - g - 1.0) > 1e-3) {
            CHECK_FALSE(t_scalar(ch, r0, CapCondition::robin(k)).is_zero());
        }
    }
}

TEST_CASE("W decision of the mixed geometry", "[channel_model]") {
    const auto g = verify::detail::theorem_b_geometry();
    const auto w = compute_w_decision(g);
    CHECK(w.i_half == 2);
    CHECK(w.dim_ker_D2 == 1);
    CHECK(w.dim_ker_limit == 1);
    CHECK(w.zero_mult() == 4);
    CHECK(w.w_members == std::vector<double>{0.0});
    CHECK(w.in_w(0.0));
    CHECK_FALSE(w.in_w(0.5));
}

TEST_CASE("limit branch rule", "[channel_model]") {
    CHECK(limit_branch_exponent(0.25, true) == -0.25);
    CHECK(limit_branch_exponent(0.25, false) == 1.25);
    CHECK(limit_branch_exponent(-2.0, false) == 2.0);
    CHECK(limit_branch_exponent(0.5, false) == 1.5);
    CHECK(limit_branch_exponent(-0.5, false) == 0.5);
}

TEST_CASE("geometry validation", "[channel_model]") {
    Geometry g;
    CHECK_THROWS_AS(g.validate(), InputError);
    g.channels = {make_channel(0.0, 1)};
    g.r0 = 1.5;
    CHECK_THROWS_AS(g.validate(), InputError);
    g.r0 = 0.5;
    g.cap_m2_overrides = {{0.3, CapCondition::neumann()}};
    CHECK_THROWS_WITH(g.validate(), Catch::Matchers::ContainsSubstring("matches no channel"));
}

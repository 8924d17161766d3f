#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "conespec/convergence_lab.hpp"
#include "test_support.hpp"

using namespace conespec;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Geometry neumann_channel() {
    Geometry g;
    g.channels = {make_channel(0.0, 1)};
    g.cap_m2 = CapCondition::neumann();
    return g;
}

const RateFit& family(const std::vector<RateFit>& fits, RateFamily f) {
    return *std::find_if(fits.begin(), fits.end(), [&](const RateFit& r) { return r.family == f; });
}

}  // namespace

TEST_CASE("default eps list spans 10^-1 .. 10^-8 in half decades", "[convergence_lab]") {
    const auto e = default_eps_list();
    REQUIRE(e.size() == 15);
    CHECK_THAT(e.front(), WithinRel(0.1, 1e-15));
    CHECK_THAT(e.back(), WithinRel(1e-8, 1e-15));
    CHECK(std::is_sorted(e.rbegin(), e.rend()));
}

TEST_CASE("rate families recover synthetic laws exactly", "[convergence_lab]") {
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> pw, il, pl;
    for (double e : eps) {
        const double L = std::abs(std::log(e));
        pw.push_back(3.0 * std::pow(e, 0.7));
        il.push_back(2.0 / L);
        pl.push_back(0.5 * std::pow(e, 0.4) * std::pow(L, 1.5));
    }
    const auto a = family(fit_families(eps, pw), RateFamily::Power);
    CHECK_THAT(a.alpha, WithinRel(0.7, 1e-12));
    CHECK_THAT(a.coefficient, WithinRel(3.0, 1e-12));
    CHECK_THAT(a.r_squared, WithinAbs(1.0, 1e-12));
    const auto b = family(fit_families(eps, il), RateFamily::InverseLog);
    CHECK_THAT(b.coefficient, WithinRel(2.0, 1e-12));
    const auto c = family(fit_families(eps, pl), RateFamily::PowerLog);
    CHECK_THAT(c.alpha, WithinRel(0.4, 1e-10));
    CHECK_THAT(c.beta, WithinRel(1.5, 1e-10));
    CHECK(fit_families({1e-1, 1e-2, 1e-3}, {1.0, 0.5, 0.25}).size() == 2);   // no 3-parameter fit below 4 points
}

TEST_CASE("Neumann sweep converges like eps^alpha to ((k - 1/2) pi)^2", "[convergence_lab]") {
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    const auto t = sweep(neumann_channel(), eps, 3);
    const auto fits = match_and_fit(t);
    REQUIRE(fits.size() == 3);
    for (const auto& f : fits) {
        INFO("N=" << f.n);
        CHECK_THAT(f.limit_lambda, WithinRel(std::pow((f.n - 0.5) * std::numbers::pi, 2), 1e-10));
        CHECK(f.best.family == RateFamily::Power);
        CHECK_THAT(f.best.alpha, WithinRel(1.0050819741602262, 1e-6));
        CHECK(f.best.r_squared > 0.9999);
    }
    CHECK_THAT(fits[0].best.coefficient, WithinRel(2.6075001993699378, 1e-6));
}

TEST_CASE("match_and_fit is invariant under eps permutations", "[convergence_lab][property]") {
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    const auto t = sweep(neumann_channel(), eps, 2);
    const auto base = fit_summary_json(match_and_fit(t));
    std::mt19937_64 rng(test::seed());
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::size_t> perm = {0, 1, 2, 3, 4};
        std::shuffle(perm.begin(), perm.end(), rng);
        SweepTable p = t;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            p.eps[i] = t.eps[perm[i]];
            p.reports[i] = t.reports[perm[i]];
        }
        CHECK(fit_summary_json(match_and_fit(p)) == base);
    }
}

TEST_CASE("constant and non-monotone columns", "[convergence_lab]") {
    SweepTable t;
    t.eps = {1e-1, 1e-2, 1e-3, 1e-4};
    t.count = 2;
    t.limit.is_limit = true;
    t.limit.entries = {{1.0, 0.0, 1, "shooting"}, {4.0, 1.0, 1, "shooting"}};
    const double second[] = {4.5, 4.1, 4.3, 4.01};
    for (std::size_t i = 0; i < 4; ++i) {
        SpectrumReport r;
        r.eps = t.eps[i];
        r.entries = {{1.0, 0.0, 1, "shooting"}, {second[i], 1.0, 1, "shooting"}};
        t.reports.push_back(r);
    }
    const auto fits = match_and_fit(t);
    CHECK(fits[0].best.family == RateFamily::Constant);
    CHECK(fits[0].converged);
    CHECK(fits[1].flagged);
    CHECK(fits[1].note == "non-monotone error sequence");
    t.eps.resize(3);
    t.reports.resize(3);
    CHECK_THROWS_AS(match_and_fit(t), InputError);
}

TEST_CASE("sweep output: CSV is deterministic across thread counts", "[convergence_lab]") {
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
    SpectrumOptions one, many;
    many.threads = 4;
    const auto a = sweep_csv(sweep(neumann_channel(), eps, 3, one));
    const auto b = sweep_csv(sweep(neumann_channel(), eps, 3, many));
    CHECK(a == b);
    CHECK(a.rfind("eps,lambda,gamma,mult,solver\n0.1,", 0) == 0);
    CHECK_THROWS_AS(sweep(neumann_channel(), {1e-2, 1e-1}, 3), InputError);
    CHECK_THROWS_AS(sweep(neumann_channel(), {1.5}, 3), InputError);
}

TEST_CASE("gnuplot columns hold eps and lambda_N", "[convergence_lab]") {
    const auto t = sweep(neumann_channel(), {1e-1, 1e-2}, 2);
    const auto text = gnuplot_column(t, 1);
    CHECK_THAT(text, ContainsSubstring("0.1 "));
    CHECK_THAT(text, ContainsSubstring("0.01 "));
    CHECK(text[0] == '#');
}

TEST_CASE("trace decay exponents per band", "[convergence_lab][trace]") {
    Geometry g;
    g.channels = {make_channel(-2.0, 1), make_channel(-1.0, 1), make_channel(-0.25, 1), make_channel(0.0, 1),
                  make_channel(0.5, 2)};
    g.cap_m2_overrides = {{0.5, CapCondition::robin(-0.5)}};
    const auto r = trace_decay_check(g, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}, 1);
    REQUIRE(r.fits.size() == 4);
    CHECK(r.notes.empty());
    const double want[] = {1.9999713146502709, 1.0006816393187064, 0.76101022205462932, 0.49798544294779307};
    for (std::size_t i = 0; i < 4; ++i) {
        INFO("gamma=" << r.fits[i].gamma);
        CHECK(r.fits[i].holds);
        CHECK_THAT(r.fits[i].exponent, WithinRel(want[i], 1e-6));
    }
    CHECK(r.fits[0].exponent >= 0.4);
    CHECK(std::abs(r.fits[3].exponent - 0.5) <= 0.05);
}

TEST_CASE("trace decay: modes entirely in the gamma = 0 band give no fits", "[convergence_lab][trace]") {
    const auto r = trace_decay_check(neumann_channel(), {1e-2, 1e-3, 1e-4}, 1);
    CHECK(r.fits.empty());
    CHECK(r.notes.size() == 3);
    Geometry h;
    h.channels = {make_channel(0.5, 1)};   // Dirichlet: t != 0
    const auto s = trace_decay_check(h, {1e-2, 1e-3, 1e-4}, 1);
    CHECK(s.fits.empty());
    CHECK_THAT(s.notes.front(), ContainsSubstring("t != 0"));
}

TEST_CASE("Hardy inequality on a centered bump", "[convergence_lab][hardy]") {
    const Bump b{4.0, 1.0, 1.0};
    const auto h0 = hardy_check(0.0, b);
    CHECK(h0.holds);
    CHECK_THAT(h0.lhs, WithinRel(0.01570567385460301, 1e-8));
    CHECK_THAT(h0.rhs, WithinRel(3.0264617692983364, 1e-8));
    const auto hl = hardy_check(-0.5, b);
    CHECK(hl.holds);
    CHECK_THAT(hl.lhs, WithinRel(0.11763170897984099, 1e-8));
    const auto zero = hardy_check(0.0, [](double) { return 0.0; }, [](double) { return 0.0; }, 3.0, 5.0);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.holds);
}

TEST_CASE("Hardy inequality holds for random bumps", "[convergence_lab][hardy][property]") {
    std::mt19937_64 rng(test::seed());
    std::uniform_real_distribution<double> centre(3.5, 40.0), frac(0.05, 0.9), amp(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        Bump b;
        b.center = centre(rng);
        b.half_width = frac(rng) * (b.center - std::numbers::e);
        b.amplitude = amp(rng);
        for (double lam : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) CHECK(hardy_check(lam, b).holds);
    }
}

TEST_CASE("Hardy support must lie beyond e", "[convergence_lab][hardy]") {
    CHECK_THROWS_AS(hardy_check(0.0, Bump{2.5, 0.5, 1.0}), InputError);
}

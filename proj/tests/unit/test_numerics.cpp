#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "conespec/parallel.hpp"
#include "conespec/quadrature.hpp"
#include "conespec/tridiagonal.hpp"
#include "test_support.hpp"

using namespace conespec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bisection recovers the discrete Dirichlet Laplacian spectrum", "[tridiagonal]") {
    const std::size_t n = 50;
    tridiag::SymTridiag t;
    t.diag.assign(n, 2.0);
    t.off.assign(n - 1, -1.0);
    const auto ev = tridiag::lowest_eigenvalues(t, 6);
    REQUIRE(ev.size() == 6);
    for (std::size_t k = 0; k < ev.size(); ++k) {
        const double want = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
        CHECK_THAT(ev[k], WithinAbs(want, 1e-14));
    }
    CHECK(tridiag::count_below(t, 0.0) == 0);
    CHECK(tridiag::count_below(t, 4.0) == n);
}

TEST_CASE("ladder pencil with masses matches the equivalent symmetric matrix", "[tridiagonal]") {
    // Links c_i, shunts s_i and masses m_i give the pencil (K, M); compare with
    // the symmetric form M^{-1/2} K M^{-1/2}.
    tridiag::LadderPencil p;
    p.link = {1.0, 2.0, 0.5, 3.0};
    p.shunt = {0.3, 0.0, -0.2, 0.1, 1.0};
    p.mass = {1.0, 2.0, 0.5, 1.5, 1.0};
    tridiag::SymTridiag s;
    for (std::size_t i = 0; i < p.size(); ++i) s.diag.push_back(p.d(i) / p.m(i));
    for (std::size_t i = 0; i + 1 < p.size(); ++i) s.off.push_back(p.e(i) / std::sqrt(p.m(i) * p.m(i + 1)));
    const auto a = tridiag::lowest_eigenvalues(p, 5);
    const auto b = tridiag::lowest_eigenvalues(s, 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK_THAT(a[k], WithinAbs(b[k], 1e-13));
}

TEST_CASE("inverse iteration returns mass-normalized eigenvectors", "[tridiagonal]") {
    const std::size_t n = 40;
    tridiag::SymTridiag t;
    t.diag.assign(n, 2.0);
    t.off.assign(n - 1, -1.0);
    const double lam = tridiag::eigenvalue(t, 2);
    const auto v = tridiag::eigenvector(t, lam);
    double norm = 0.0, resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        norm += v[i] * v[i];
        double tv = 2.0 * v[i];
        if (i > 0) tv -= v[i - 1];
        if (i + 1 < n) tv -= v[i + 1];
        resid = std::max(resid, std::abs(tv - lam * v[i]));
    }
    CHECK_THAT(norm, WithinRel(1.0, 1e-12));
    CHECK(resid < 1e-12);
}

TEST_CASE("malformed tridiagonal input is rejected", "[tridiagonal]") {
    tridiag::SymTridiag t;
    CHECK_THROWS_AS(t.check(), InputError);
    t.diag = {1.0, 2.0};
    t.off = {1.0, 1.0};
    CHECK_THROWS_AS(t.check(), InputError);
    tridiag::LadderPencil p;
    p.shunt = {0.0, 0.0};
    p.mass = {1.0, 1.0};
    p.link = {-1.0};
    CHECK_THROWS_AS(p.check(), InputError);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly", "[quadrature]") {
    const auto rule = quad::gauss_legendre(12);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK_THAT(wsum, WithinRel(2.0, 1e-15));
    for (int deg = 0; deg <= 23; ++deg) {
        const double got = quad::integrate(rule, 0.0, 2.0, [&](double x) { return std::pow(x, deg); });
        CHECK_THAT(got, WithinRel(std::pow(2.0, deg + 1) / (deg + 1), 1e-13));
    }
}

TEST_CASE("composite Gauss-Legendre converges on smooth integrands", "[quadrature]") {
    const auto rule = quad::gauss_legendre(12);
    std::vector<double> edges;
    for (int i = 0; i <= 10; ++i) edges.push_back(i * std::numbers::pi / 10);
    CHECK_THAT(quad::integrate_panels(rule, edges, [](double x) { return std::sin(x); }), WithinRel(2.0, 1e-15));
    CHECK_THAT(quad::integrate(rule, 1.0, 3.0, [](double x) { return 1.0 / x; }), WithinRel(std::log(3.0), 1e-13));
}

TEST_CASE("parallel_for visits every index exactly once", "[parallel]") {
    for (unsigned threads : {0u, 1u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(257);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("parallel_for propagates exceptions", "[parallel]") {
    CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) {
                        if (i == 7) throw SolverError("boom");
                    }),
                    SolverError);
}

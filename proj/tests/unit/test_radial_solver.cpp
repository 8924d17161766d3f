#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "conespec/finite_difference.hpp"
#include "conespec/quadrature.hpp"
#include "conespec/radial_solver.hpp"

using namespace conespec;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

RadialProblem problem(double gamma, double a, LeftCondition left, CapCondition right, int count) {
    RadialProblem p;
    p.gamma = gamma;
    p.a = a;
    p.b = 1.0;
    p.left = left;
    p.right = right;
    p.count = count;
    return p;
}

}  // namespace

TEST_CASE("gamma = 0 Dirichlet-Dirichlet eigenvalues are (k pi / L)^2", "[radial_solver]") {
    for (double eps : {1e-2, 1e-4}) {
        const double a = eps / 2;
        const auto ev = shoot_eigenvalues(problem(0.0, a, CapCondition::dirichlet(), CapCondition::dirichlet(), 5));
        REQUIRE(ev.size() == 5);
        for (int k = 1; k <= 5; ++k) {
            const double want = std::pow(k * std::numbers::pi / (1.0 - a), 2);
            CHECK_THAT(ev[k - 1], WithinRel(want, 1e-10));
        }
    }
}

TEST_CASE("gamma = 1 minimal branch gives x1^2 with tan x1 = x1", "[radial_solver]") {
    const auto ev = shoot_eigenvalues(problem(1.0, 0.0, BranchSelection::minimal(), CapCondition::dirichlet(), 2));
    CHECK_THAT(ev[0], WithinRel(20.19072855642663, 1e-10));
    // Second root of tan x = x.
    CHECK_THAT(ev[1], WithinRel(7.725251836937707 * 7.725251836937707, 1e-10));
}

TEST_CASE("gamma = 1/2 Dirichlet eigenvalues on [0.1, 1]", "[radial_solver]") {
    // Roots of J_1(k a) Y_1(k) - J_1(k) Y_1(k a), 30-digit reference.
    const auto ev = shoot_eigenvalues(problem(0.5, 0.1, CapCondition::dirichlet(), CapCondition::dirichlet(), 3));
    CHECK_THAT(ev[0], WithinRel(15.531020775105108, 1e-10));
    CHECK_THAT(ev[1], WithinRel(53.737236872243764, 1e-10));
    CHECK_THAT(ev[2], WithinRel(115.52764738912546, 1e-10));
}

TEST_CASE("Neumann-Dirichlet and the r^{-gamma} branch", "[radial_solver]") {
    const double a = 0.25;
    const auto nd = shoot_eigenvalues(problem(0.0, a, CapCondition::neumann(), CapCondition::dirichlet(), 3));
    for (int k = 1; k <= 3; ++k) {
        CHECK_THAT(nd[k - 1], WithinRel(std::pow((k - 0.5) * std::numbers::pi / (1.0 - a), 2), 1e-10));
    }
    // gamma = 0, branch r^0 on [0, 1]: sqrt(r) J_{-1/2}(k r) ~ cos(k r).
    const auto br = shoot_eigenvalues(problem(0.0, 0.0, BranchSelection::r_minus_gamma(), CapCondition::dirichlet(), 3));
    for (int k = 1; k <= 3; ++k) CHECK_THAT(br[k - 1], WithinRel(std::pow((k - 0.5) * std::numbers::pi, 2), 1e-10));
}

TEST_CASE("Robin caps produce negative and zero eigenvalues", "[radial_solver]") {
    // u'(1/2) = -4 u(1/2), u(1) = 0: lambda = -k^2 with k coth(k/2) = 4.
    const auto neg = shoot_eigenvalues(problem(0.0, 0.5, CapCondition::robin(-2.0), CapCondition::dirichlet(), 2));
    CHECK_THAT(neg[0], WithinRel(-14.669023297986605, 1e-10));
    CHECK(neg[1] > 0.0);
    const auto zero = shoot_eigenvalues(problem(0.0, 0.5, CapCondition::neumann(), CapCondition::neumann(), 2));
    CHECK_THAT(zero[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(zero[1], WithinRel(4.0 * std::numbers::pi * std::numbers::pi, 1e-10));
}

TEST_CASE("eigenmodes are normalized and have k-1 interior zeros", "[radial_solver]") {
    const auto p = problem(-2.0, 0.1, CapCondition::robin(0.3), CapCondition::neumann(), 4);
    const auto modes = shoot_modes(p);
    REQUIRE(modes.size() == 4);
    const auto rule = quad::gauss_legendre(12);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        std::vector<double> edges;
        for (int i = 0; i <= 200; ++i) edges.push_back(0.1 + 0.9 * i / 200.0);
        const double norm = quad::integrate_panels(rule, edges, [&](double r) { return modes[k].value(r) * modes[k].value(r); });
        CHECK_THAT(norm, WithinRel(1.0, 1e-9));
        int changes = 0;
        double prev = modes[k].value(0.1 + 1e-9);
        for (int i = 1; i <= 4000; ++i) {
            const double v = modes[k].value(0.1 + 0.9 * i / 4000.0);
            if (v * prev < 0.0) ++changes;
            if (v != 0.0) prev = v;
        }
        CHECK(changes == static_cast<int>(k));
    }
}

TEST_CASE("finite differences agree with shooting", "[radial_solver][fd]") {
    for (double g : {-1.0, -0.5, 0.5, 2.0}) {
        for (const auto& cap : {CapCondition::dirichlet(), CapCondition::robin(-g), CapCondition::robin(0.3)}) {
            const auto p = problem(g, 0.1, cap, CapCondition::neumann(), 4);
            const auto s = shoot_eigenvalues(p);
            const auto f = fd_eigenvalues(p);
            INFO(p.describe());
            REQUIRE(f.size() == s.size());
            for (std::size_t k = 0; k < s.size(); ++k) {
                CHECK(std::abs(f[k].lambda - s[k]) <= 1e-6 * std::max(1.0, std::abs(s[k])));
            }
        }
    }
    // Singular endpoint: delta extrapolation for the minimal branch.
    const auto p = problem(0.25, 0.0, BranchSelection::minimal(), CapCondition::dirichlet(), 3);
    const auto s = shoot_eigenvalues(p);
    const auto f = fd_eigenvalues(p);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(f[k].lambda - s[k]) <= 1e-6 * s[k]);
}

TEST_CASE("radial problems are validated", "[radial_solver]") {
    CHECK_THROWS_AS(shoot_eigenvalues(problem(0.0, 0.0, CapCondition::dirichlet(), CapCondition::dirichlet(), 1)),
                    InputError);
    CHECK_THROWS_AS(shoot_eigenvalues(problem(1.0, 0.0, BranchSelection::r_minus_gamma(), CapCondition::dirichlet(), 1)),
                    InputError);
    CHECK_THROWS_AS(shoot_eigenvalues(problem(0.0, 0.5, BranchSelection::minimal(), CapCondition::dirichlet(), 1)),
                    InputError);
    CHECK_THROWS_AS(shoot_eigenvalues(problem(0.0, 0.5, CapCondition::dirichlet(), CapCondition::dirichlet(), 0)),
                    InputError);
}

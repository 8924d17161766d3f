#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "conespec/topology.hpp"
#include "test_support.hpp"

using namespace conespec;
using namespace conespec::topology;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("Kunneth and Lefschetz helpers", "[topology]") {
    CHECK(sphere(3) == Betti{1, 0, 0, 1});
    CHECK(sphere(0) == Betti{2});
    CHECK(product(sphere(1), sphere(1)) == Betti{1, 2, 1});
    CHECK(copies(sphere(2), 3) == Betti{3, 0, 3});
    // H^k(D^3, S^2) = H_{3-k}(D^3): only degree 3.
    CHECK(lefschetz_relative(point(), 3) == Betti{0, 0, 0, 1});
}

TEST_CASE("S^4 = (D^3 x S^1) u (S^2 x D^2)", "[topology]") {
    const auto in = sphere_decomposition(2, 1);
    CHECK(in.name == "sphere_2_1");
    CHECK(in.m == 4);
    CHECK(in.betti_M == Betti{1, 0, 0, 0, 1});
    CHECK(in.betti_M1 == Betti{1, 1, 0, 0, 0});
    CHECK(in.betti_M2 == Betti{1, 0, 1, 0, 0});
    CHECK(in.betti_Sigma == Betti{1, 1, 1, 1});
    CHECK(in.relative_betti_M2 == Betti{0, 0, 1, 0, 1});
    const auto mv = mv_check(in);
    CHECK(mv.consistent);
    CHECK(mv.euler_M == 2);
    CHECK(mv.euler_Sigma == 0);
    REQUIRE(mv.derived_image_rank_mid);
    CHECK(*mv.derived_image_rank_mid == 0);
}

TEST_CASE("L2 cohomology of the connected-sum model", "[topology]") {
    const auto in = connected_sum_decomposition(2, 3, 3);
    CHECK(in.betti_M == Betti{1, 0, 3, 3, 0, 1});
    const Betti want = {0, 0, 4, 4, 0, 0};
    for (int k = 0; k <= in.m; ++k) CHECK(l2_cohomology(in, k) == want[static_cast<std::size_t>(k)]);
}

TEST_CASE("L2 cohomology is Hodge-symmetric on catalog inputs", "[topology][property]") {
    for (const auto& in : {sphere_decomposition(2, 1), sphere_decomposition(3, 2), product_sphere_decomposition(2, 2),
                           connected_sum_decomposition(2, 3, 3), connected_sum_decomposition(3, 2, 2)}) {
        for (int k = 0; k <= in.m; ++k) CHECK(l2_cohomology(in, k) == l2_cohomology(in, in.m - k));
    }
}

TEST_CASE("intersection cohomology identification and its limits", "[topology]") {
    const auto cs = connected_sum_decomposition(2, 3, 3);
    const Betti want = {1, 1, 0, 0, 1, 1};
    for (int p = 0; p <= cs.m; ++p) {
        const auto v = intersection_cohomology(cs, p);
        REQUIRE(v.value);
        CHECK(*v.value == want[static_cast<std::size_t>(p)]);
    }
    // n even with H^{n/2}(Sigma) != 0.
    const auto t = intersection_cohomology(sphere_decomposition(1, 1), 1);
    CHECK_FALSE(t.value);
    CHECK_THAT(t.note, ContainsSubstring("H^{n/2}(Sigma) != 0"));
    // n odd: the middle degree (n+1)/2 is not covered.
    const auto u = intersection_cohomology(sphere_decomposition(2, 1), 2);
    CHECK_FALSE(u.value);
    CHECK_THAT(u.note, ContainsSubstring("not covered"));
}

TEST_CASE("Mayer-Vietoris flags perturbed Betti numbers", "[topology][property]") {
    std::mt19937_64 rng(test::seed());
    const auto base = connected_sum_decomposition(2, 4, 1);
    REQUIRE(mv_check(base).consistent);
    std::uniform_int_distribution<int> which(0, 3);
    int flagged = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto in = base;
        Betti* b = nullptr;
        switch (which(rng)) {
            case 0: b = &in.betti_M; break;
            case 1: b = &in.betti_M1; break;
            case 2: b = &in.betti_M2; break;
            default: b = &in.relative_betti_M2; break;
        }
        std::uniform_int_distribution<std::size_t> pos(0, b->size() - 1);
        (*b)[pos(rng)] += 1;
        const auto r = mv_check(in);
        if (!r.consistent) ++flagged;
        CHECK_FALSE(r.consistent);
        CHECK_FALSE(r.issues.empty());
    }
    CHECK(flagged == 100);
}

TEST_CASE("small-eigenvalue predictions for product-sphere gluings", "[topology]") {
    const auto p = predict_small_eigenvalues(2, 1);
    CHECK(p.m == 4);
    CHECK(p.gamma == -0.5);
    CHECK(p.boundary_case);
    CHECK(p.domain == "minimal");
    REQUIRE(p.targets.size() == 2);
    CHECK(p.targets[0].manifold == "S^4");
    CHECK(p.targets[1].manifold == "S^2xS^2");
    for (const auto& t : p.targets) {
        CHECK(t.predicted);
        CHECK(t.coexact_degrees == std::vector<int>{1, 2});
        CHECK(t.exact_degrees == std::vector<int>{2, 3});
    }
    const auto q = predict_small_eigenvalues(2, 2);
    CHECK(q.gamma == 0.0);
    CHECK(q.domain == "w");
    REQUIRE(q.targets.size() == 1);   // S^2 x S^3 needs n2 < n1
    CHECK(q.targets[0].coexact_degrees == std::vector<int>{2});
    CHECK_THROWS_AS(predict_small_eigenvalues(1, 2), InputError);
    CHECK_THROWS_AS(predict_small_eigenvalues(1, 0), InputError);
}

TEST_CASE("predicted degrees are closed under k -> m - k", "[topology][property]") {
    for (int n1 = 1; n1 <= 6; ++n1) {
        for (int n2 = 0; n2 <= n1; ++n2) {
            if (n1 + n2 < 2) continue;
            const auto p = predict_small_eigenvalues(n1, n2);
            for (const auto& t : p.targets) {
                for (int k : t.coexact_degrees) {
                    // coexact k-forms pair with exact (m - k)-forms
                    CHECK(std::count(t.exact_degrees.begin(), t.exact_degrees.end(), p.m - k) == 1);
                }
            }
        }
    }
}

TEST_CASE("shipped decomposition files are all consistent", "[topology]") {
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(CONESPEC_DATA_DIR)) {
        if (e.path().extension() != ".cfg") continue;
        ++files;
        const auto in = load_cohomology_file(e.path().string());
        INFO(e.path().string());
        CHECK(in.name == e.path().stem().string());
        CHECK(mv_check(in).consistent);
    }
    CHECK(files == 16);
}

TEST_CASE("decomposition files are parsed strictly", "[topology]") {
    const auto dir = test::scratch_dir("topology");
    std::ofstream(dir / "bad.cfg") << "name = x\nm = 3\nbetti_M = [1, 0, 0, 1]\ncolour = 2\n";
    CHECK_THROWS_WITH(load_cohomology_file((dir / "bad.cfg").string()), ContainsSubstring("unknown key"));
    std::ofstream(dir / "short.cfg") << "name = x\nm = 3\nbetti_M = [1, 0, 1]\nbetti_M1 = [1, 0, 0, 0]\n"
                                        "betti_M2 = [1, 0, 0, 0]\nbetti_Sigma = [1, 0, 1]\n"
                                        "relative_betti_M2 = [0, 0, 0, 1]\n";
    CHECK_THROWS_AS(load_cohomology_file((dir / "short.cfg").string()), InputError);
}

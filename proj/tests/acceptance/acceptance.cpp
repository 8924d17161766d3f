// Acceptance suite: runs every criterion at desk scale and prints one
// PASS/FAIL line per criterion. Exit status 0 iff all criteria pass.
//
//   acceptance [criterion...]     keys (e.g. theorem-b) or numbers (e.g. 5)

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "conespec/verify.hpp"

#ifndef CONESPEC_DATA_DIR
#define CONESPEC_DATA_DIR ""
#endif

int main(int argc, char** argv) {
    conespec::verify::Options opt;
    opt.topology_dir = CONESPEC_DATA_DIR;
    for (int i = 1; i < argc; ++i) opt.only.emplace_back(argv[i]);
    try {
        opt.seed = conespec::verify::seed_from_env();
        std::cout << "seed " << opt.seed << std::endl;
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = conespec::verify::run(opt, [](const conespec::verify::CriterionResult& r) {
            std::cout << conespec::verify::format_line(r) << std::endl;
        });
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::size_t passed = 0;
        for (const auto& r : rep.results) passed += r.passed ? 1 : 0;
        std::printf("%zu/%zu criteria passed in %.2f s\n", passed, rep.results.size(), total);
        return rep.all_passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << '\n';
        return 1;
    }
}

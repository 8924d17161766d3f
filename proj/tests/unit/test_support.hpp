// Shared helpers for the unit tests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "conespec/verify.hpp"

#ifndef CONESPEC_DATA_DIR
#define CONESPEC_DATA_DIR ""
#endif
#ifndef CONESPEC_CONFIG_DIR
#define CONESPEC_CONFIG_DIR ""
#endif

namespace test {

/// Seed for randomized property tests (CONESPEC_SEED, default fixed).
inline std::uint64_t seed() { return conespec::verify::seed_from_env(); }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("conespec_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace test

/**
 * @file report_io.hpp
 * @brief Lossless CSV and JSON serialization of spectrum reports.
 *
 * CSV columns: eps,lambda,gamma,mult,solver. Limit reports write "limit" in
 * the eps column and carry one extra row with solver "kernel", an empty
 * gamma and mult = zero_mult. Numbers use the shortest representation that
 * reads back to the same double, so write -> read -> write is byte-identical.
 */
#pragma once

#include <array>
#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "conespec/errors.hpp"
#include "conespec/spectra.hpp"

namespace conespec::io {

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc()) throw Error("format_double: conversion failed");
    return {buf.data(), res.ptr};
}

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError(std::string(what) + ": not a number: '" + std::string(s) + "'");
    }
    return v;
}

inline long parse_long(std::string_view s, std::string_view what) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError(std::string(what) + ": not an integer: '" + std::string(s) + "'");
    }
    return v;
}

inline constexpr std::string_view kCsvHeader = "eps,lambda,gamma,mult,solver";

/// CSV rows for one report (no header).
inline std::string csv_rows(const SpectrumReport& rep) {
    std::ostringstream os;
    const std::string eps = rep.is_limit ? "limit" : format_double(rep.eps);
    if (rep.is_limit) os << eps << ",0,," << rep.zero_mult << ",kernel\n";
    for (const auto& e : rep.entries) {
        os << eps << ',' << format_double(e.lambda) << ',' << format_double(e.gamma) << ',' << e.mult << ','
           << e.solver << '\n';
    }
    return os.str();
}

inline std::string to_csv(const SpectrumReport& rep) { return std::string(kCsvHeader) + "\n" + csv_rows(rep); }

inline std::string to_csv(const std::vector<SpectrumReport>& reps) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : reps) out += csv_rows(r);
    return out;
}

/// Reads reports back from CSV; consecutive rows with the same eps column form one report.
inline std::vector<SpectrumReport> reports_from_csv(std::string_view text) {
    std::vector<SpectrumReport> out;
    std::string last_eps;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != kCsvHeader) throw InputError("csv: unexpected header '" + line + "'");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        const std::string where = "csv line " + std::to_string(lineno);
        if (f.size() != 5) throw InputError(where + ": expected 5 columns");
        if (out.empty() || f[0] != last_eps) {
            SpectrumReport r;
            r.is_limit = f[0] == "limit";
            if (!r.is_limit) r.eps = parse_double(f[0], where);
            out.push_back(r);
            last_eps = f[0];
        }
        auto& r = out.back();
        if (f[4] == "kernel") {
            if (!r.is_limit) throw InputError(where + ": kernel row outside a limit report");
            r.zero_mult = parse_long(f[3], where);
            continue;
        }
        SpectrumEntry e;
        e.lambda = parse_double(f[1], where);
        e.gamma = parse_double(f[2], where);
        e.mult = parse_long(f[3], where);
        e.solver = f[4];
        if (e.mult < 1) throw InputError(where + ": multiplicity must be positive");
        r.entries.push_back(e);
    }
    return out;
}

inline SpectrumReport from_csv(std::string_view text) {
    auto reps = reports_from_csv(text);
    if (reps.size() != 1) throw InputError("csv: expected exactly one report, found " + std::to_string(reps.size()));
    return reps.front();
}

inline nlohmann::json to_json_value(const SpectrumReport& rep) {
    nlohmann::json j;
    if (rep.is_limit) {
        j["eps"] = "limit";
        j["zero_mult"] = rep.zero_mult;
    } else {
        j["eps"] = rep.eps;
    }
    j["entries"] = nlohmann::json::array();
    for (const auto& e : rep.entries) {
        j["entries"].push_back({{"lambda", e.lambda}, {"gamma", e.gamma}, {"mult", e.mult}, {"solver", e.solver}});
    }
    return j;
}

inline SpectrumReport from_json_value(const nlohmann::json& j) {
    try {
        SpectrumReport r;
        const auto& eps = j.at("eps");
        r.is_limit = eps.is_string();
        if (r.is_limit) {
            if (eps.get<std::string>() != "limit") throw InputError("json: eps must be a number or \"limit\"");
            r.zero_mult = j.at("zero_mult").get<long>();
        } else {
            r.eps = eps.get<double>();
        }
        for (const auto& e : j.at("entries")) {
            r.entries.push_back({e.at("lambda").get<double>(), e.at("gamma").get<double>(), e.at("mult").get<long>(),
                                 e.at("solver").get<std::string>()});
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("json: ") + e.what());
    }
}

inline std::string to_json(const SpectrumReport& rep) { return to_json_value(rep).dump(2) + "\n"; }

inline SpectrumReport from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("json: ") + e.what());
    }
    return from_json_value(j);
}

}  // namespace conespec::io

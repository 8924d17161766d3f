/**
 * @file run_config.hpp
 * @brief Run-config schema and the pipelines behind each command.
 *
 * A run config is one sectioned text file (see config.hpp for the grammar):
 *
 *     cmd = sweep                          # optional; --cmd overrides it
 *
 *     [cross_section]                      # one of three forms:
 *     catalog = round_sphere               #   catalog entry + params + cutoff
 *     params  = [2]
 *     cutoff  = 3
 *     # file = "torus.cfg"                 #   custom file, relative to this config
 *     # n = 2  betti = [1, 0, 1]  coexact_modes = [(0, 2, 3)]  cutoff = 10
 *
 *     [geometry]
 *     r0 = 1/2
 *     cap_m1 = dirichlet                   # dirichlet | neumann | robin(kappa)
 *     cap_m2 = robin(-1/2)
 *     cap_m2_overrides = [(3/4, robin(-3/4))]
 *     cap_m1_overrides = [(1/2, neumann)]
 *     channel_cutoff = 2                   # keep channels with |gamma| <= cutoff
 *     channels = [(0, 1), (1/2, 2)]        # explicit (gamma, mult) list instead of [cross_section]
 *
 *     [sweep]
 *     eps = [1e-1, 1e-2, 1e-3]             # strictly decreasing; default 10^{-k/2}, k = 2..16
 *     count = 5
 *     solver = shooting                    # shooting | fd
 *     trace_index = 1                      # optional: also run the trace-decay check for mode N
 *     pseudomode_gamma = 1/2
 *
 *     [topology]
 *     decomposition = sphere(2, 1)         # sphere(n1, n2) | product(n1, n2) | connected_sum(k, l, L)
 *     # file = "my_decomposition.cfg"
 *     predict = [(2, 1), (3, 2)]
 *
 *     [verify]
 *     only = [theorem-b, 9]
 *
 *     [outputs]
 *     dir = "out"                          # --out-dir overrides it
 *     stem = gamma0                        # default: the config file name without extension
 *
 * Only the sections a command needs are required; unknown sections and keys
 * are rejected.
 */
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conespec/channel_model.hpp"
#include "conespec/config.hpp"
#include "conespec/convergence_lab.hpp"
#include "conespec/cross_section.hpp"
#include "conespec/errors.hpp"
#include "conespec/parallel.hpp"
#include "conespec/report_io.hpp"
#include "conespec/spectra.hpp"
#include "conespec/topology.hpp"
#include "conespec/verify.hpp"

namespace conespec::run {

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"a-spectrum", "eps-spectrum", "limit-spectrum", "sweep",
                                                   "pseudomode", "topology",     "verify"};
    return names;
}

struct SweepSettings {
    std::vector<double> eps = default_eps_list();
    int count = 5;
    SolverTag solver = SolverTag::Shooting;
    int trace_index = 0;   // 0 = no trace-decay check
    double pseudomode_gamma = 0.5;
};

struct TopologySettings {
    std::optional<topology::CohomologyInput> decomposition;
    std::vector<std::pair<int, int>> predict;
};

struct RunConfig {
    std::string source;
    std::optional<std::string> cmd;
    std::optional<CrossSectionSpectrum> cross_section;
    std::optional<Geometry> geometry;
    std::optional<SweepSettings> sweep;
    std::optional<TopologySettings> topology;
    std::vector<std::string> verify_only;
    std::string out_dir = "out";
    std::string stem = "run";
};

namespace detail {

inline CapCondition parse_cap(const config::Reader& rd, const config::Value& v, std::string_view key) {
    if (v.kind == config::Value::Kind::Word) {
        if (v.text == "dirichlet") return CapCondition::dirichlet();
        if (v.text == "neumann") return CapCondition::neumann();
    } else if (v.kind == config::Value::Kind::Call && v.text == "robin") {
        if (v.items.size() != 1) rd.fail(v, key, "robin takes exactly one argument kappa");
        return CapCondition::robin(rd.as_number(v.items[0], key));
    }
    rd.fail(v, key, "expected dirichlet, neumann or robin(kappa)");
}

inline std::vector<CapOverride> parse_overrides(const config::Reader& rd, std::string_view key) {
    std::vector<CapOverride> out;
    if (!rd.has(key)) return out;
    const auto& v = rd.entry(key).value;
    if (!v.is_sequence()) rd.fail(v, key, "expected a list of (gamma, cap)");
    for (const auto& item : v.items) {
        if (!item.is_sequence() || item.items.size() != 2) rd.fail(item, key, "each override is a pair (gamma, cap)");
        out.push_back({rd.as_number(item.items[0], key), parse_cap(rd, item.items[1], key)});
    }
    return out;
}

inline CrossSectionSpectrum parse_cross_section_section(const config::Document& doc, const config::Section& sec,
                                                        const std::filesystem::path& base) {
    config::Reader rd(doc, sec);
    if (rd.has("file")) {
        config::require_known_keys(doc, sec, {"file"});
        std::filesystem::path p = rd.word("file");
        if (p.is_relative()) p = base / p;
        return load_cross_section_file(p.string());
    }
    if (rd.has("catalog")) {
        config::require_known_keys(doc, sec, {"catalog", "params", "cutoff"});
        const auto params = rd.has("params") ? rd.numbers("params") : std::vector<double>{};
        try {
            return catalog_lookup(rd.word("catalog"), params, rd.number("cutoff"));
        } catch (const InputError& e) {
            throw InputError(config::where(doc.source, sec.line, "catalog", e.what()));
        }
    }
    return parse_cross_section(doc, sec);
}

inline Geometry parse_geometry(const config::Document& doc, const config::Section& sec,
                               const std::optional<CrossSectionSpectrum>& cs) {
    config::require_known_keys(doc, sec, {"r0", "cap_m1", "cap_m2", "cap_m1_overrides", "cap_m2_overrides",
                                          "channel_cutoff", "channels"});
    config::Reader rd(doc, sec);
    Geometry g;
    g.r0 = rd.number_or("r0", 0.5);
    if (rd.has("cap_m1")) g.cap_m1 = parse_cap(rd, rd.entry("cap_m1").value, "cap_m1");
    if (rd.has("cap_m2")) g.cap_m2 = parse_cap(rd, rd.entry("cap_m2").value, "cap_m2");
    g.cap_m1_overrides = parse_overrides(rd, "cap_m1_overrides");
    g.cap_m2_overrides = parse_overrides(rd, "cap_m2_overrides");
    std::vector<ASpectrumEntry> spectrum;
    if (rd.has("channels")) {
        if (cs) throw InputError(config::where(doc.source, rd.entry("channels").line, "channels",
                                               "give either explicit channels or a [cross_section], not both"));
        const auto& v = rd.entry("channels").value;
        if (!v.is_sequence() || v.items.empty()) rd.fail(v, "channels", "expected a non-empty list of (gamma, mult)");
        for (const auto& item : v.items) {
            if (!item.is_sequence() || item.items.size() != 2) rd.fail(item, "channels", "each channel is (gamma, mult)");
            const long mult = rd.as_integer(item.items[1], "channels");
            if (mult < 1) rd.fail(item, "channels", "multiplicity must be positive");
            spectrum.push_back({rd.as_number(item.items[0], "channels"), mult, {}});
        }
    } else if (cs) {
        spectrum = build_a_spectrum(*cs);
    } else {
        throw InputError(config::where(doc.source, sec.line, "channels",
                                       "no channels: add a [cross_section] section or geometry.channels"));
    }
    if (rd.has("channel_cutoff")) {
        const double cut = rd.number("channel_cutoff");
        if (!(cut >= 0.0)) rd.fail(rd.entry("channel_cutoff").value, "channel_cutoff", "must be non-negative");
        std::erase_if(spectrum, [&](const ASpectrumEntry& e) { return std::abs(e.gamma) > cut * (1 + 1e-12); });
    }
    if (spectrum.empty()) throw InputError(config::where(doc.source, sec.line, "", "geometry has no channels"));
    g.channels = make_channels(spectrum);
    try {
        g.validate();
    } catch (const InputError& e) {
        throw InputError(config::where(doc.source, sec.line, "", e.what()));
    }
    return g;
}

inline SweepSettings parse_sweep(const config::Document& doc, const config::Section& sec) {
    config::require_known_keys(doc, sec, {"eps", "count", "solver", "trace_index", "pseudomode_gamma"});
    config::Reader rd(doc, sec);
    SweepSettings s;
    if (rd.has("eps")) s.eps = rd.numbers("eps");
    const auto& eps_line = rd.has("eps") ? rd.entry("eps").line : sec.line;
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
        if (!(s.eps[i] > 0.0 && s.eps[i] < 1.0)) {
            throw InputError(config::where(doc.source, eps_line, "eps", "values must lie in (0, 1)"));
        }
        if (i > 0 && !(s.eps[i] < s.eps[i - 1])) {
            throw InputError(config::where(doc.source, eps_line, "eps", "values must be strictly decreasing"));
        }
    }
    if (s.eps.empty()) throw InputError(config::where(doc.source, eps_line, "eps", "empty list"));
    s.count = static_cast<int>(rd.integer_or("count", 5));
    if (s.count < 1) rd.fail(rd.entry("count").value, "count", "must be positive");
    if (rd.has("solver")) {
        try {
            s.solver = parse_solver(rd.word("solver"));
        } catch (const InputError& e) {
            rd.fail(rd.entry("solver").value, "solver", e.what());
        }
    }
    s.trace_index = static_cast<int>(rd.integer_or("trace_index", 0));
    if (s.trace_index < 0) rd.fail(rd.entry("trace_index").value, "trace_index", "must be non-negative");
    s.pseudomode_gamma = rd.number_or("pseudomode_gamma", 0.5);
    return s;
}

inline TopologySettings parse_topology(const config::Document& doc, const config::Section& sec,
                                       const std::filesystem::path& base) {
    config::require_known_keys(doc, sec, {"decomposition", "file", "predict"});
    config::Reader rd(doc, sec);
    TopologySettings t;
    if (rd.has("decomposition") && rd.has("file")) {
        throw InputError(config::where(doc.source, sec.line, "", "give either decomposition or file, not both"));
    }
    if (rd.has("file")) {
        std::filesystem::path p = rd.word("file");
        if (p.is_relative()) p = base / p;
        t.decomposition = topology::load_cohomology_file(p.string());
    } else if (rd.has("decomposition")) {
        const auto& v = rd.entry("decomposition").value;
        if (v.kind != config::Value::Kind::Call) {
            rd.fail(v, "decomposition", "expected sphere(n1, n2), product(n1, n2) or connected_sum(k, l, L)");
        }
        std::vector<long> a;
        for (const auto& item : v.items) a.push_back(rd.as_integer(item, "decomposition"));
        try {
            if (v.text == "sphere" && a.size() == 2) {
                t.decomposition = topology::sphere_decomposition(static_cast<int>(a[0]), static_cast<int>(a[1]));
            } else if (v.text == "product" && a.size() == 2) {
                t.decomposition =
                    topology::product_sphere_decomposition(static_cast<int>(a[0]), static_cast<int>(a[1]));
            } else if (v.text == "connected_sum" && a.size() == 3) {
                t.decomposition =
                    topology::connected_sum_decomposition(static_cast<int>(a[0]), static_cast<int>(a[1]), a[2]);
            } else {
                rd.fail(v, "decomposition", "expected sphere(n1, n2), product(n1, n2) or connected_sum(k, l, L)");
            }
        } catch (const InputError& e) {
            if (std::string_view(e.what()).find(doc.source) == 0) throw;
            rd.fail(v, "decomposition", e.what());
        }
    }
    if (rd.has("predict")) {
        const auto& v = rd.entry("predict").value;
        if (!v.is_sequence()) rd.fail(v, "predict", "expected a list of (n1, n2)");
        for (const auto& item : v.items) {
            if (!item.is_sequence() || item.items.size() != 2) rd.fail(item, "predict", "each entry is (n1, n2)");
            t.predict.emplace_back(static_cast<int>(rd.as_integer(item.items[0], "predict")),
                                   static_cast<int>(rd.as_integer(item.items[1], "predict")));
        }
    }
    if (!t.decomposition && t.predict.empty()) {
        throw InputError(config::where(doc.source, sec.line, "", "[topology] needs decomposition, file or predict"));
    }
    return t;
}

}  // namespace detail

/// Parses every section present; commands check for the sections they need.
inline RunConfig parse_run_config(const config::Document& doc) {
    static const std::vector<std::string> known = {"", "cross_section", "geometry", "sweep",
                                                   "topology", "verify", "outputs"};
    for (const auto& s : doc.sections) {
        if (std::find(known.begin(), known.end(), s.name) == known.end()) {
            throw InputError(config::where(doc.source, s.line, "", "unknown section [" + s.name + "]"));
        }
    }
    const std::filesystem::path base = std::filesystem::path(doc.source).parent_path();
    RunConfig rc;
    rc.source = doc.source;
    rc.stem = std::filesystem::path(doc.source).stem().string();
    if (rc.stem.empty()) rc.stem = "run";
    if (const auto* root = doc.find("")) {
        config::require_known_keys(doc, *root, {"cmd"});
        config::Reader rd(doc, *root);
        if (rd.has("cmd")) {
            rc.cmd = rd.word("cmd");
            const auto& names = command_names();
            if (std::find(names.begin(), names.end(), *rc.cmd) == names.end()) {
                rd.fail(rd.entry("cmd").value, "cmd", "unknown command '" + *rc.cmd + "'");
            }
        }
    }
    if (const auto* s = doc.find("cross_section")) rc.cross_section = detail::parse_cross_section_section(doc, *s, base);
    if (const auto* s = doc.find("geometry")) rc.geometry = detail::parse_geometry(doc, *s, rc.cross_section);
    if (const auto* s = doc.find("sweep")) rc.sweep = detail::parse_sweep(doc, *s);
    if (const auto* s = doc.find("topology")) rc.topology = detail::parse_topology(doc, *s, base);
    if (const auto* s = doc.find("verify")) {
        config::require_known_keys(doc, *s, {"only"});
        config::Reader rd(doc, *s);
        if (rd.has("only")) {
            const auto& v = rd.entry("only").value;
            if (!v.is_sequence()) rd.fail(v, "only", "expected a list of criterion keys or numbers");
            for (const auto& item : v.items) {
                if (item.is_number()) rc.verify_only.push_back(std::to_string(rd.as_integer(item, "only")));
                else if (item.is_word() || item.kind == config::Value::Kind::String) rc.verify_only.push_back(item.text);
                else rd.fail(item, "only", "expected a criterion key or number");
            }
        }
    }
    if (const auto* s = doc.find("outputs")) {
        config::require_known_keys(doc, *s, {"dir", "stem"});
        config::Reader rd(doc, *s);
        rc.out_dir = rd.word_or("dir", rc.out_dir);
        rc.stem = rd.word_or("stem", rc.stem);
    }
    return rc;
}

inline RunConfig load_run_config(const std::string& path) { return parse_run_config(config::parse_file(path)); }

// ---------------------------------------------------------------------------
// Execution

struct ExecOptions {
    std::optional<std::string> cmd;       // overrides the config's cmd
    std::optional<std::string> out_dir;   // overrides [outputs] dir
    unsigned threads = 0;                 // 0 = hardware concurrency
    std::vector<std::string> only;        // overrides [verify] only
    std::string topology_dir;             // catalog used by the topology criterion
    const BesselEvaluator* bessel = nullptr;
};

struct Outcome {
    int exit_code = 0;                    // 0 ok, 2 verification failure
    std::vector<std::string> artifacts;   // paths written, in order
};

namespace detail {

inline const std::string& need_cmd(const RunConfig& rc, const ExecOptions& ex) {
    if (ex.cmd) return *ex.cmd;
    if (rc.cmd) return *rc.cmd;
    throw InputError(rc.source + ": no command: set cmd in the config or pass --cmd");
}

template <typename T>
const T& need(const std::optional<T>& v, const RunConfig& rc, const std::string& section, const std::string& cmd) {
    if (!v) throw InputError(rc.source + ": missing section [" + section + "] required by cmd=" + cmd);
    return *v;
}

class Writer {
public:
    Writer(std::filesystem::path dir, std::string stem, Outcome& out)
        : dir_(std::move(dir)), stem_(std::move(stem)), out_(out) {}

    void write(const std::string& suffix, const std::string& text) {
        std::filesystem::create_directories(dir_);
        const auto path = dir_ / (stem_ + suffix);
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InputError("cannot write " + path.string());
        f << text;
        out_.artifacts.push_back(path.string());
    }

private:
    std::filesystem::path dir_;
    std::string stem_;
    Outcome& out_;
};

inline SpectrumOptions spectrum_options(const SweepSettings& s, const ExecOptions& ex) {
    SpectrumOptions o;
    o.solver = s.solver;
    o.threads = ex.threads;
    o.bessel = ex.bessel;
    return o;
}

inline void log_entries(std::ostream& log, const SpectrumReport& rep) {
    for (const auto& e : rep.entries) {
        log << "  lambda=" << io::format_double(e.lambda) << " gamma=" << io::format_double(e.gamma)
            << " mult=" << e.mult << '\n';
    }
}

inline nlohmann::json w_decision_json(const WDecision& w) {
    nlohmann::json ch = nlohmann::json::array();
    for (const auto& d : w.channels) {
        ch.push_back({{"gamma", d.gamma},
                      {"mult", d.mult},
                      {"t_scalar", d.t.label()},
                      {"in_w", d.in_w},
                      {"limit_exponent", d.limit_exponent},
                      {"limit_kernel", d.limit_kernel}});
    }
    return {{"channels", ch},
            {"w", w.w_members},
            {"dim_ker_limit", w.dim_ker_limit},
            {"dim_ker_D2", w.dim_ker_D2},
            {"i_half", w.i_half},
            {"zero_mult", w.zero_mult()}};
}

inline nlohmann::json topology_json(const topology::CohomologyInput& in) {
    const auto mv = topology::mv_check(in);
    nlohmann::json issues = nlohmann::json::array();
    for (const auto& i : mv.issues) issues.push_back({{"sequence", i.sequence}, {"term", i.term}, {"message", i.message}});
    nlohmann::json l2 = nlohmann::json::array(), ih = nlohmann::json::array();
    for (int k = 0; k <= in.m; ++k) {
        l2.push_back(topology::l2_cohomology(in, k));
        const auto v = topology::intersection_cohomology(in, k);
        ih.push_back(v.value ? nlohmann::json(*v.value) : nlohmann::json(v.note));
    }
    nlohmann::json j{{"name", in.name},
                     {"m", in.m},
                     {"consistent", mv.consistent},
                     {"euler", {{"M", mv.euler_M}, {"M1", mv.euler_M1}, {"M2", mv.euler_M2}, {"Sigma", mv.euler_Sigma}}},
                     {"issues", issues},
                     {"l2_cohomology_M2", l2},
                     {"intersection_cohomology_M1", ih}};
    if (mv.derived_image_rank_mid) j["derived_image_rank_mid"] = *mv.derived_image_rank_mid;
    return j;
}

inline nlohmann::json prediction_json(const topology::Prediction& p) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : p.targets) {
        targets.push_back({{"manifold", t.manifold},
                           {"predicted", t.predicted},
                           {"coexact_degrees", t.coexact_degrees},
                           {"exact_degrees", t.exact_degrees}});
    }
    return {{"n1", p.n1},         {"n2", p.n2},           {"m", p.m},
            {"gamma", p.gamma},   {"domain", p.domain},   {"boundary_case", p.boundary_case},
            {"in_open_band", p.in_open_band}, {"targets", targets}};
}

}  // namespace detail

/**
 * Runs the selected command, writes its artifacts under the output directory
 * and prints a short human-readable summary to @p log. Throws InputError on
 * schema problems; verification failures are reported as exit code 2.
 */
inline Outcome execute(const RunConfig& rc, const ExecOptions& ex, std::ostream& log) {
    const std::string cmd = detail::need_cmd(rc, ex);
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), cmd) == names.end()) throw InputError("unknown command '" + cmd + "'");
    Outcome out;
    detail::Writer w(ex.out_dir.value_or(rc.out_dir), rc.stem, out);

    if (cmd == "a-spectrum") {
        const auto& cs = detail::need(rc.cross_section, rc, "cross_section", cmd);
        std::ostringstream csv;
        csv << "gamma,mult\n";
        for (const auto& e : build_a_spectrum(cs)) {
            csv << io::format_double(e.gamma) << ',' << e.mult << '\n';
            log << "gamma=" << io::format_double(e.gamma) << " mult=" << e.mult << '\n';
        }
        w.write("_a_spectrum.csv", csv.str());
    } else if (cmd == "eps-spectrum") {
        const auto& g = detail::need(rc.geometry, rc, "geometry", cmd);
        const auto& s = detail::need(rc.sweep, rc, "sweep", cmd);
        std::vector<SpectrumReport> reps(s.eps.size());
        auto inner = detail::spectrum_options(s, ex);
        inner.threads = 1;
        parallel_for(s.eps.size(), ex.threads, [&](std::size_t i) { reps[i] = eps_spectrum(g, s.eps[i], s.count, inner); });
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reps) arr.push_back(io::to_json_value(r));
        w.write("_eps_spectrum.csv", io::to_csv(reps));
        w.write("_eps_spectrum.json", arr.dump(2) + "\n");
        for (const auto& r : reps) {
            log << "eps=" << io::format_double(r.eps) << '\n';
            detail::log_entries(log, r);
        }
    } else if (cmd == "limit-spectrum") {
        const auto& g = detail::need(rc.geometry, rc, "geometry", cmd);
        const SweepSettings s = rc.sweep.value_or(SweepSettings{});
        const WDecision wd = compute_w_decision(g);
        const auto rep = limit_spectrum(g, wd, s.count, detail::spectrum_options(s, ex));
        w.write("_limit_spectrum.csv", io::to_csv(rep));
        w.write("_limit_spectrum.json", io::to_json(rep));
        w.write("_w_decision.json", detail::w_decision_json(wd).dump(2) + "\n");
        log << "zero_mult=" << wd.zero_mult() << " (kernel " << wd.dim_ker_limit << " + D2 " << wd.dim_ker_D2
            << " + half " << wd.i_half << ")\n";
        detail::log_entries(log, rep);
    } else if (cmd == "sweep") {
        const auto& g = detail::need(rc.geometry, rc, "geometry", cmd);
        const auto& s = detail::need(rc.sweep, rc, "sweep", cmd);
        const auto opt = detail::spectrum_options(s, ex);
        const SweepTable table = sweep(g, s.eps, s.count, opt);
        const auto fits = match_and_fit(table);
        w.write("_sweep.csv", sweep_csv(table));
        w.write("_fit_summary.json", fit_summary_json(fits));
        for (int n = 1; n <= s.count; ++n) w.write("_N" + std::to_string(n) + ".dat", gnuplot_column(table, n));
        for (const auto& f : fits) {
            log << "N=" << f.n << " limit=" << io::format_double(f.limit_lambda) << " rate=" << family_name(f.best.family);
            if (!f.note.empty()) log << " (" << f.note << ')';
            log << '\n';
        }
        if (s.trace_index > 0) {
            const auto tr = trace_decay_check(g, s.eps, s.trace_index, opt);
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& t : tr.fits) {
                arr.push_back({{"band", band_name(t.band)},
                               {"gamma", t.gamma},
                               {"exponent", t.exponent},
                               {"expected", t.expected},
                               {"r_squared", t.r_squared},
                               {"holds", t.holds}});
            }
            w.write("_trace_decay.json",
                    nlohmann::json{{"n", s.trace_index}, {"fits", arr}, {"notes", tr.notes}}.dump(2) + "\n");
        }
    } else if (cmd == "pseudomode") {
        const auto& g = detail::need(rc.geometry, rc, "geometry", cmd);
        const auto& s = detail::need(rc.sweep, rc, "sweep", cmd);
        std::vector<PseudomodeResult> res(s.eps.size());
        parallel_for(s.eps.size(), ex.threads,
                     [&](std::size_t i) { res[i] = pseudomode_quotient(g, s.eps[i], s.pseudomode_gamma); });
        std::ostringstream csv;
        csv << "eps,rayleigh,l2_norm,panels\n";
        std::vector<double> q;
        for (std::size_t i = 0; i < res.size(); ++i) {
            csv << io::format_double(s.eps[i]) << ',' << io::format_double(res[i].rayleigh) << ','
                << io::format_double(res[i].l2_norm) << ',' << res[i].panels << '\n';
            q.push_back(res[i].rayleigh);
        }
        w.write("_pseudomode.csv", csv.str());
        nlohmann::json fits = nlohmann::json::array();
        if (s.eps.size() >= 4) {
            for (const auto& f : fit_families(s.eps, q)) fits.push_back(fit_json(f));
        }
        w.write("_pseudomode_fit.json", nlohmann::json{{"gamma", s.pseudomode_gamma}, {"fits", fits}}.dump(2) + "\n");
        log << csv.str();
    } else if (cmd == "topology") {
        const auto& t = detail::need(rc.topology, rc, "topology", cmd);
        nlohmann::json j;
        bool consistent = true;
        if (t.decomposition) {
            j["decomposition"] = detail::topology_json(*t.decomposition);
            consistent = j["decomposition"]["consistent"].get<bool>();
            log << t.decomposition->name << ": " << (consistent ? "consistent" : "INCONSISTENT") << '\n';
        }
        j["predictions"] = nlohmann::json::array();
        for (const auto& [n1, n2] : t.predict) {
            const auto p = topology::predict_small_eigenvalues(n1, n2);
            j["predictions"].push_back(detail::prediction_json(p));
            for (const auto& tg : p.targets) {
                log << "n1=" << n1 << " n2=" << n2 << " " << tg.manifold << ": "
                    << (tg.predicted ? "small eigenvalues predicted" : "no prediction") << '\n';
            }
        }
        w.write("_topology.json", j.dump(2) + "\n");
        if (!consistent) out.exit_code = 2;
    } else {   // verify
        verify::Options vo;
        vo.only = ex.only.empty() ? rc.verify_only : ex.only;
        vo.threads = ex.threads;
        vo.seed = verify::seed_from_env();
        vo.topology_dir = ex.topology_dir;
        vo.bessel = ex.bessel;
        const auto rep = verify::run(vo, [&](const verify::CriterionResult& r) { log << verify::format_line(r) << std::endl; });
        w.write("_verify.json", verify::to_json(rep));
        if (!rep.all_passed()) out.exit_code = 2;
    }
    return out;
}

}  // namespace conespec::run

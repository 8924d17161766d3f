/**
 * @file verify.hpp
 * @brief Built-in verification suite: ten acceptance criteria at desk scale,
 *        each reported as one machine-readable pass/fail record.
 *
 * Criteria (key, number):
 *   a-spectrum 1, dual-solver 2, analytic 3, theorem-a 4, theorem-b 5,
 *   pseudomode 6, trace-decay 7, hardy 8, topology 9, determinism 10.
 * Randomized checks draw from a seeded generator (CONESPEC_SEED), so a run is
 * reproducible.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conespec/channel_model.hpp"
#include "conespec/convergence_lab.hpp"
#include "conespec/cross_section.hpp"
#include "conespec/errors.hpp"
#include "conespec/finite_difference.hpp"
#include "conespec/radial_solver.hpp"
#include "conespec/report_io.hpp"
#include "conespec/spectra.hpp"
#include "conespec/topology.hpp"

namespace conespec::verify {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Seed from CONESPEC_SEED when set and numeric, otherwise the default.
inline std::uint64_t seed_from_env() {
    const char* s = std::getenv("CONESPEC_SEED");
    if (s == nullptr || *s == '\0') return kDefaultSeed;
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (end == nullptr || *end != '\0') throw InputError("CONESPEC_SEED must be a non-negative integer");
    return v;
}

struct Options {
    std::vector<std::string> only;          // keys or numbers; empty = all
    unsigned threads = 0;                   // 0 = hardware concurrency
    std::uint64_t seed = kDefaultSeed;
    std::string topology_dir;               // directory of *.cfg decompositions
    const BesselEvaluator* bessel = nullptr;   // replaced evaluator (fault injection)
};

struct CriterionResult {
    int id = 0;
    std::string key;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Report {
    std::vector<CriterionResult> results;

    [[nodiscard]] bool all_passed() const {
        return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
    }
};

/// One line per criterion: "PASS [2] dual-solver: <title> -- <detail> (1.23 s)".
inline std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.key << ": " << r.title << " -- " << r.detail
       << " (" << r.seconds << " s)";
    return os.str();
}

inline std::string to_json(const Report& rep) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rep.results) {
        arr.push_back({{"id", r.id}, {"key", r.key}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
    }
    return nlohmann::json{{"passed", rep.all_passed()}, {"criteria", arr}}.dump(2) + "\n";
}

namespace detail {

/// Collects failures of one criterion; the first few are kept for the report.
class Check {
public:
    void fail(const std::string& what) {
        if (failures_ < 3) msgs_.push_back(what);
        ++failures_;
    }
    void expect(bool ok, const std::string& what) {
        if (!ok) fail(what);
    }
    void note(const std::string& s) { notes_.push_back(s); }
    [[nodiscard]] bool ok() const { return failures_ == 0; }
    [[nodiscard]] std::string detail() const {
        std::ostringstream os;
        if (failures_ > 0) {
            os << failures_ << " failure(s): ";
            for (std::size_t i = 0; i < msgs_.size(); ++i) os << (i ? "; " : "") << msgs_[i];
        } else {
            for (std::size_t i = 0; i < notes_.size(); ++i) os << (i ? "; " : "") << notes_[i];
        }
        return os.str();
    }

private:
    int failures_ = 0;
    std::vector<std::string> msgs_;
    std::vector<std::string> notes_;
};

inline std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---- 1 -------------------------------------------------------------------

inline void a_spectrum(const Options& opt, Check& c) {
    CrossSectionSpectrum cs;
    cs.n = 2;
    cs.betti = {1, 0, 1};
    cs.coexact_modes = {{0, 2.0, 3}};
    cs.cutoff = 10.0;
    const auto spec = build_a_spectrum(cs);
    const std::vector<std::pair<double, long>> want = {{-2.0, 3}, {-1.0, 5}, {1.0, 5}, {2.0, 3}};
    bool exact = spec.size() == want.size();
    for (std::size_t i = 0; exact && i < want.size(); ++i) {
        exact = spec[i].gamma == want[i].first && spec[i].mult == want[i].second;
    }
    c.expect(exact, "S^2 example does not give {-2:3, -1:5, 1:5, 2:3}");

    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> dim(2, 6), betti(0, 3), modes(0, 8), mult(1, 4);
    std::uniform_real_distribution<double> mu(0.01, 30.0), cut(0.5, 8.0);
    int symmetric = 0;
    for (int trial = 0; trial < 200; ++trial) {
        CrossSectionSpectrum r;
        r.n = dim(rng);
        r.betti.assign(static_cast<std::size_t>(r.n) + 1, 0);
        for (int p = 0; 2 * p <= r.n; ++p) r.betti[p] = r.betti[r.n - p] = betti(rng);
        const int k = modes(rng);
        for (int i = 0; i < k; ++i) {
            std::uniform_int_distribution<int> deg(0, r.n - 1);
            r.coexact_modes.push_back({deg(rng), mu(rng), mult(rng)});
        }
        r.cutoff = cut(rng);
        const auto s = build_a_spectrum(r);
        bool ok = true;
        for (const auto& e : s) {
            const auto it = std::find_if(s.begin(), s.end(), [&](const ASpectrumEntry& f) {
                return same_gamma(f.gamma, -e.gamma) || (e.gamma == 0.0 && f.gamma == 0.0);
            });
            ok = ok && it != s.end() && it->mult == e.mult;
        }
        if (ok) ++symmetric;
        else c.fail("asymmetric spectrum in random trial " + std::to_string(trial));
    }
    c.note("example exact; " + std::to_string(symmetric) + "/200 random spectra symmetric");
}

// ---- 2 -------------------------------------------------------------------

inline void dual_solver(const Options& opt, Check& c) {
    const std::vector<double> gammas = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    struct Job {
        RadialProblem p;
    };
    std::vector<Job> jobs;
    for (double g : gammas) {
        const std::vector<CapCondition> caps = {CapCondition::dirichlet(), CapCondition::neumann(),
                                                CapCondition::robin(-g), CapCondition::robin(g + 1.0),
                                                CapCondition::robin(0.3)};
        for (const auto& l : caps) {
            for (const auto& r : caps) {
                RadialProblem p;
                p.gamma = g;
                p.a = 0.1;
                p.b = 1.0;
                p.left = l;
                p.right = r;
                p.count = 5;
                jobs.push_back({p});
            }
        }
    }
    std::vector<double> worst(jobs.size(), 0.0);
    std::vector<std::string> err(jobs.size());
    parallel_for(jobs.size(), opt.threads, [&](std::size_t i) {
        const auto& p = jobs[i].p;
        try {
            const auto s = shoot_eigenvalues(p, ShootOptions{opt.bessel});
            const auto f = fd_eigenvalues(p);
            for (std::size_t k = 0; k < 5; ++k) worst[i] = std::max(worst[i], rel(s[k], f[k].lambda));
        } catch (const Error& e) {
            err[i] = e.what();
        }
    });
    double overall = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!err[i].empty()) {
            c.fail(jobs[i].p.describe() + ": " + err[i]);
        } else if (!(worst[i] <= 1e-6)) {
            c.fail("channel " + jobs[i].p.describe() + ": shooting and finite differences differ by " +
                   fmt(worst[i], 3));
        }
        overall = std::max(overall, worst[i]);
    }
    c.note(std::to_string(jobs.size()) + " problems x 5 eigenvalues, worst relative gap " + fmt(overall, 3));
}

// ---- 3 -------------------------------------------------------------------

inline void analytic(const Options& opt, Check& c) {
    double worst = 0.0;
    for (double eps : {1e-2, 1e-4}) {
        RadialProblem p;
        p.gamma = 0.0;
        p.a = 0.5 * eps;
        p.left = CapCondition::dirichlet();
        p.right = CapCondition::dirichlet();
        p.count = 5;
        const auto s = shoot_eigenvalues(p, ShootOptions{opt.bessel});
        for (int k = 1; k <= 5; ++k) {
            const double want = std::pow(k * std::numbers::pi / (1.0 - 0.5 * eps), 2);
            const double e = std::abs(s[static_cast<std::size_t>(k) - 1] - want) / want;
            worst = std::max(worst, e);
            c.expect(e <= 1e-10, "gamma=0 DD eps=" + fmt(eps) + " k=" + std::to_string(k) + " relative error " +
                                     fmt(e, 3));
        }
    }
    // first positive root of tan x = x, i.e. of sin x - x cos x on (pi, 3 pi / 2)
    double lo = std::numbers::pi, hi = 1.5 * std::numbers::pi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::sin(mid) - mid * std::cos(mid) < 0.0) hi = mid;
        else lo = mid;
    }
    const double x1 = 0.5 * (lo + hi);
    RadialProblem p;
    p.gamma = 1.0;
    p.a = 0.0;
    p.left = BranchSelection::minimal();
    p.right = CapCondition::dirichlet();
    p.count = 1;
    const double l1 = shoot_eigenvalues(p, ShootOptions{opt.bessel}).at(0);
    const double e1 = std::abs(l1 - x1 * x1) / (x1 * x1);
    c.expect(e1 <= 1e-8, "gamma=1 limit eigenvalue " + fmt(l1, 15) + " vs x1^2 = " + fmt(x1 * x1, 15));
    c.note("interval eigenvalues within " + fmt(worst, 3) + ", x1^2 = " + fmt(x1 * x1, 12) + " within " + fmt(e1, 3));
}

// ---- 4 -------------------------------------------------------------------

inline Geometry single_channel(double gamma, CapCondition m2, CapCondition m1 = CapCondition::dirichlet()) {
    Geometry g;
    g.channels = {make_channel(gamma, 1)};
    g.cap_m2 = m2;
    g.cap_m1 = m1;
    return g;
}

inline void theorem_a(const Options& opt, Check& c) {
    const std::vector<double> eps_list = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    SpectrumOptions so{SolverTag::Shooting, opt.threads, opt.bessel};
    std::vector<double> first_limits;
    for (bool neumann : {false, true}) {
        const Geometry g = single_channel(0.0, neumann ? CapCondition::neumann() : CapCondition::dirichlet());
        const auto t = sweep(g, eps_list, 5, so);
        const auto lim = t.limit_values();
        const auto last = t.reports.back().expanded();
        const std::string name = neumann ? "Neumann (0 in W)" : "Dirichlet (0 not in W)";
        c.expect(compute_w_decision(g).in_w(0.0) == neumann, name + ": wrong W membership");
        for (int k = 1; k <= 5; ++k) {
            const double closed = neumann ? std::pow((k - 0.5) * std::numbers::pi, 2) : std::pow(k * std::numbers::pi, 2);
            const double l = lim.at(static_cast<std::size_t>(k) - 1);
            const double e = last.at(static_cast<std::size_t>(k) - 1);
            c.expect(std::abs(l - closed) <= 1e-10 * closed, name + " limit k=" + std::to_string(k) + " is " + fmt(l, 12));
            c.expect(std::abs(e - l) <= 1e-3 * l, name + " eps=1e-6 k=" + std::to_string(k) + " is " + fmt(e, 12) +
                                                      " vs limit " + fmt(l, 12));
        }
        first_limits.push_back(lim.at(0));
    }
    c.expect(std::abs(first_limits[0] - first_limits[1]) > 1.0, "limits do not depend on W");
    c.note("lambda_1 limits " + fmt(first_limits[0], 10) + " (D) vs " + fmt(first_limits[1], 10) + " (N)");
}

// ---- 5 -------------------------------------------------------------------

/// Channels -2 .. 2 with gamma = 1/2 (mult 2) under robin(-1/2), gamma = 3/4
/// under robin(-3/4), and gamma = 0 carrying robin(0) at both caps (its limit
/// branch r^0 satisfies the M1 cap); every other cap is Dirichlet.
inline Geometry theorem_b_geometry() {
    Geometry g;
    for (double gm : {-2.0, -1.0, -0.5, 0.0, 0.5, 0.75, 1.0, 2.0}) g.channels.push_back(make_channel(gm, gm == 0.5 ? 2 : 1));
    g.cap_m2 = CapCondition::dirichlet();
    g.cap_m1 = CapCondition::dirichlet();
    g.cap_m2_overrides = {{0.5, CapCondition::robin(-0.5)}, {0.75, CapCondition::robin(-0.75)}, {0.0, CapCondition::robin(0.0)}};
    g.cap_m1_overrides = {{0.0, CapCondition::robin(0.0)}};
    return g;
}

inline void theorem_b(const Options& opt, Check& c) {
    const Geometry g = theorem_b_geometry();
    const WDecision w = compute_w_decision(g);
    c.expect(w.i_half == 2 && w.dim_ker_D2 == 1 && w.dim_ker_limit == 1,
             "W decision gives i_half=" + std::to_string(w.i_half) + " dim_ker_D2=" + std::to_string(w.dim_ker_D2) +
                 " dim_ker_limit=" + std::to_string(w.dim_ker_limit) + " (expected 2, 1, 1)");
    SpectrumOptions so{SolverTag::Shooting, opt.threads, opt.bessel};
    const auto lim = limit_spectrum(g, w, 5, so);
    c.expect(lim.zero_mult == w.zero_mult(), "limit report zero_mult differs from the W decision");
    std::ostringstream counts;
    for (double eps : {1e-6, 1e-8}) {
        const auto rep = eps_spectrum(g, eps, static_cast<int>(w.zero_mult()) + 6, so);
        const double threshold = 10.0 / std::abs(std::log(eps));
        const long n = rep.count_below(threshold);
        c.expect(n == w.zero_mult(), "eps=" + fmt(eps) + ": " + std::to_string(n) + " eigenvalues below " +
                                         fmt(threshold) + ", expected " + std::to_string(w.zero_mult()));
        counts << " eps=" << eps << ":" << n;
    }
    c.note("zero_mult = " + std::to_string(w.zero_mult()) + " = 2 + 1 + 1; counts" + counts.str());
}

// ---- 6 -------------------------------------------------------------------

inline void pseudomode(const Options& opt, Check& c) {
    Geometry g;
    g.channels = {make_channel(0.5, 2)};
    g.cap_m2 = CapCondition::robin(-0.5);
    std::vector<double> eps, ray, lam;
    for (int k = 2; k <= 8; ++k) {
        const double e = std::pow(10.0, -k);
        eps.push_back(e);
        ray.push_back(pseudomode_quotient(g, e).rayleigh);
        lam.push_back(eps_spectrum(g, e, 1, {SolverTag::Shooting, 1, opt.bessel}).entries.at(0).lambda);
    }
    auto inverse_log = [&](const std::vector<double>& v) {
        for (const auto& f : fit_families(eps, v)) {
            if (f.family == RateFamily::InverseLog) return f;
        }
        return RateFit{};
    };
    const RateFit fr = inverse_log(ray), fl = inverse_log(lam);
    c.expect(fr.r_squared >= kFitR2, "pseudomode quotient fits c/|log eps| with R^2 = " + fmt(fr.r_squared));
    c.expect(fl.r_squared >= kFitR2, "lambda_1 fits c/|log eps| with R^2 = " + fmt(fl.r_squared));
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double ratio = ray[i] / lam[i];
        c.expect(ratio >= 0.25 && ratio <= 4.0, "eps=" + fmt(eps[i]) + ": quotient / lambda_1 = " + fmt(ratio));
    }
    // control: gamma = 0 with t = 0, fit q = a + b / |log eps| and require a clearly positive floor
    const Geometry ctl = single_channel(0.0, CapCondition::neumann());
    std::vector<double> x, y, ones;
    for (double e : eps) {
        x.push_back(1.0 / std::abs(std::log(e)));
        y.push_back(pseudomode_quotient(ctl, e, 0.0).rayleigh);
        ones.push_back(1.0);
    }
    const auto b = conespec::detail::least_squares({ones, x}, y);
    const double ymin = *std::min_element(y.begin(), y.end());
    c.expect(b[0] > 0.0 && ymin >= 0.5 * b[0], "control quotient tends to " + fmt(b[0]) + " (min " + fmt(ymin) + ")");
    c.note("q ~ " + fmt(fr.coefficient, 4) + "/|log eps| (R^2 " + fmt(fr.r_squared, 5) + "), lambda_1 ~ " +
           fmt(fl.coefficient, 4) + "/|log eps| (R^2 " + fmt(fl.r_squared, 5) + "), control floor " + fmt(b[0], 4));
}

// ---- 7 -------------------------------------------------------------------

inline void trace_decay(const Options& opt, Check& c) {
    Geometry g;
    g.channels = {make_channel(-2.0, 1), make_channel(-1.0, 1), make_channel(-0.25, 1), make_channel(0.0, 1),
                  make_channel(0.5, 2)};
    g.cap_m2_overrides = {{0.5, CapCondition::robin(-0.5)}};
    const auto rep = trace_decay_check(g, default_eps_list(), 1, {SolverTag::Shooting, opt.threads, opt.bessel});
    bool l1 = false, half = false;
    std::ostringstream os;
    for (const auto& f : rep.fits) {
        c.expect(f.holds, band_name(f.band) + " gamma=" + fmt(f.gamma) + ": exponent " + fmt(f.exponent, 4) +
                              " vs " + fmt(f.expected));
        l1 = l1 || f.band == TraceBand::LeMinusOne;
        half = half || f.band == TraceBand::Half;
        os << (os.tellp() > 0 ? ", " : "") << "gamma=" << f.gamma << ":" << fmt(f.exponent, 4);
    }
    c.expect(l1 && half, "required bands missing from the fit");
    c.note("exponents " + os.str());
}

// ---- 8 -------------------------------------------------------------------

inline void hardy(const Options& opt, Check& c) {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> lo_d(std::numbers::e + 0.01, 40.0), width(0.05, 20.0), amp(-5.0, 5.0);
    const std::vector<double> lambdas = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    int checks = 0;
    for (int i = 0; i < 1000; ++i) {
        const double lo = lo_d(rng), w = width(rng);
        const Bump b{lo + 0.5 * w, 0.5 * w, amp(rng)};
        for (double l : lambdas) {
            const auto r = hardy_check(l, b);
            ++checks;
            c.expect(r.holds, "bump " + std::to_string(i) + " lambda=" + fmt(l) + ": " + fmt(r.lhs, 12) + " > " +
                                  fmt(r.rhs, 12));
        }
    }
    c.note(std::to_string(checks) + " bump/lambda pairs");
}

// ---- 9 -------------------------------------------------------------------

inline void topology_check(const Options& opt, Check& c) {
    namespace tp = conespec::topology;
    std::vector<std::filesystem::path> files;
    if (!opt.topology_dir.empty() && std::filesystem::is_directory(opt.topology_dir)) {
        for (const auto& e : std::filesystem::directory_iterator(opt.topology_dir)) {
            if (e.path().extension() == ".cfg") files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    c.expect(!files.empty(), "no topology catalog found in '" + opt.topology_dir + "'");
    int perturbations = 0, middle = 0;
    for (const auto& f : files) {
        const auto in = tp::load_cohomology_file(f.string());
        const auto rep = tp::mv_check(in);
        c.expect(rep.consistent, in.name + ": Mayer-Vietoris check failed" +
                                     (rep.issues.empty() ? "" : " at " + rep.issues.front().term));
        // three-case formula, checked through L^2 Hodge duality k <-> m - k
        for (int k = 0; k <= in.m; ++k) {
            const long v = tp::l2_cohomology(in, k);
            long want = 0;
            if (2 * k < in.m) {
                want = in.betti_M2[static_cast<std::size_t>(in.m - k)];   // Lefschetz duality
            } else if (2 * k > in.m) {
                want = in.betti_M2[static_cast<std::size_t>(k)];
            } else {
                want = rep.derived_image_rank_mid.value_or(-1);
                ++middle;
            }
            c.expect(v == want, in.name + ": L2 cohomology in degree " + std::to_string(k));
            c.expect(v == tp::l2_cohomology(in, in.m - k), in.name + ": L2 cohomology not self-dual at " + std::to_string(k));
        }
        auto bump_all = [&](tp::Betti tp::CohomologyInput::*field, const char* what) {
            for (std::size_t i = 0; i < (in.*field).size(); ++i) {
                auto p = in;
                (p.*field)[i] += 1;
                ++perturbations;
                c.expect(!tp::mv_check(p).consistent,
                         in.name + ": perturbing " + what + "[" + std::to_string(i) + "] went unnoticed");
            }
        };
        bump_all(&tp::CohomologyInput::betti_M, "betti_M");
        bump_all(&tp::CohomologyInput::betti_M1, "betti_M1");
        bump_all(&tp::CohomologyInput::betti_M2, "betti_M2");
        bump_all(&tp::CohomologyInput::betti_Sigma, "betti_Sigma");
        bump_all(&tp::CohomologyInput::relative_betti_M2, "relative_betti_M2");
        if (in.image_rank_mid) {
            auto p = in;
            *p.image_rank_mid += 1;
            ++perturbations;
            c.expect(!tp::mv_check(p).consistent, in.name + ": perturbing image_rank_mid went unnoticed");
        }
    }
    c.expect(middle > 0, "catalog has no entry with a middle degree");

    // small-eigenvalue table
    struct Row {
        int n1, n2;
        double gamma;
        const char* domain;
        bool boundary;
        std::vector<std::string> manifolds;
        std::vector<int> coexact, exact;   // degrees on the first target
    };
    const std::vector<Row> table = {
        {1, 1, 0.0, "w", false, {"S^3"}, {1}, {2}},
        {2, 0, -1.0, "minimal", false, {"S^3", "S^2xS^1"}, {0, 2}, {1, 3}},
        {2, 1, -0.5, "minimal", true, {"S^4", "S^2xS^2"}, {1, 2}, {2, 3}},
        {2, 2, 0.0, "w", false, {"S^5"}, {2}, {3}},
        {3, 1, -1.0, "minimal", false, {"S^5", "S^3xS^2"}, {1, 3}, {2, 4}},
        {3, 2, -0.5, "minimal", true, {"S^6", "S^3xS^3"}, {2, 3}, {3, 4}},
    };
    for (const auto& row : table) {
        const auto p = tp::predict_small_eigenvalues(row.n1, row.n2);
        const std::string tag = "(" + std::to_string(row.n1) + "," + std::to_string(row.n2) + ")";
        c.expect(p.gamma == row.gamma && p.domain == row.domain && p.boundary_case == row.boundary,
                 tag + ": gamma/domain mismatch");
        std::vector<std::string> names;
        for (const auto& t : p.targets) {
            names.push_back(t.manifold);
            c.expect(t.predicted, tag + ": no small eigenvalue predicted on " + t.manifold);
            std::vector<int> dual;
            for (int d : t.coexact_degrees) dual.push_back(p.m - d);
            std::sort(dual.begin(), dual.end());
            c.expect(dual == t.exact_degrees, tag + ": degrees on " + t.manifold + " are not Hodge-dual");
        }
        c.expect(names == row.manifolds, tag + ": unexpected targets");
        if (!p.targets.empty()) {
            c.expect(p.targets.front().coexact_degrees == row.coexact && p.targets.front().exact_degrees == row.exact,
                     tag + ": degree table mismatch");
        }
    }
    // sphere corollary: every degree of S^m is reached for m = 3..7
    for (int m = 3; m <= 7; ++m) {
        std::vector<bool> hit(static_cast<std::size_t>(m) + 1, false);
        for (int n2 = 0; 2 * n2 <= m - 1; ++n2) {
            const int n1 = m - 1 - n2;
            if (n1 + n2 < 2) continue;
            const auto p = tp::predict_small_eigenvalues(n1, n2);
            for (int d : p.targets.front().coexact_degrees) hit[static_cast<std::size_t>(d)] = true;
            for (int d : p.targets.front().exact_degrees) hit[static_cast<std::size_t>(d)] = true;
        }
        c.expect(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }),
                 "sphere corollary: some degree of S^" + std::to_string(m) + " has no predicted small eigenvalue");
    }
    c.note(std::to_string(files.size()) + " decompositions consistent, " + std::to_string(perturbations) +
           " perturbations flagged, " + std::to_string(table.size()) + " prediction rows");
}

// ---- 10 ------------------------------------------------------------------

inline void determinism(const Options& opt, Check& c) {
    const Geometry g = theorem_b_geometry();
    const std::vector<double> eps_list = {1e-2, 1e-3, 1e-4, 1e-5};
    const auto a = sweep(g, eps_list, 8, {SolverTag::Shooting, 1, opt.bessel});
    const auto b = sweep(g, eps_list, 8, {SolverTag::Shooting, std::max(2u, opt.threads), opt.bessel});
    const std::string csv_a = sweep_csv(a), csv_b = sweep_csv(b);
    c.expect(csv_a == csv_b, "sweep CSV differs between single- and multi-threaded runs");
    c.expect(fit_summary_json(match_and_fit(a)) == fit_summary_json(match_and_fit(b)), "fit summaries differ");
    const auto back = io::reports_from_csv(csv_a);
    c.expect(io::to_csv(back) == csv_a, "CSV write -> read -> write is not byte-identical");
    std::vector<SpectrumReport> all = a.reports;
    all.push_back(a.limit);
    c.expect(back == all, "CSV round-trip changed a report");
    int json_ok = 0;
    for (const auto& r : all) {
        const auto j = io::to_json(r);
        const auto r2 = io::from_json(j);
        if (r2 == r && io::to_json(r2) == j) ++json_ok;
        else c.fail("JSON round-trip changed the report at eps=" + (r.is_limit ? std::string("limit") : fmt(r.eps)));
    }
    c.note("CSV " + std::to_string(csv_a.size()) + " bytes identical; " + std::to_string(json_ok) +
           " JSON round-trips lossless");
}

struct Criterion {
    int id;
    const char* key;
    const char* title;
    std::function<void(const Options&, Check&)> run;
};

inline const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "a-spectrum", "A-spectrum example and +/- symmetry", a_spectrum},
        {2, "dual-solver", "Bessel shooting vs extrapolated finite differences", dual_solver},
        {3, "analytic", "closed-form eigenvalues", analytic},
        {4, "theorem-a", "eps-spectra converge to the W-dependent limit", theorem_a},
        {5, "theorem-b", "small-eigenvalue count equals the zero multiplicity", theorem_b},
        {6, "pseudomode", "pseudomode quotient decays like 1/|log eps|", pseudomode},
        {7, "trace-decay", "eigenmode trace decay exponents", trace_decay},
        {8, "hardy", "Hardy-type inequality on random bumps", hardy},
        {9, "topology", "cohomology formulas and Mayer-Vietoris consistency", topology_check},
        {10, "determinism", "byte-identical reruns and lossless round-trips", determinism},
    };
    return list;
}

}  // namespace detail

/// Keys of all criteria in order.
inline std::vector<std::string> criterion_keys() {
    std::vector<std::string> out;
    for (const auto& c : detail::criteria()) out.emplace_back(c.key);
    return out;
}

/// Runs the selected criteria; `on_result` (optional) is called as each one finishes.
inline Report run(const Options& opt, const std::function<void(const CriterionResult&)>& on_result = {}) {
    for (const auto& o : opt.only) {
        const bool known = std::any_of(detail::criteria().begin(), detail::criteria().end(),
                                       [&](const detail::Criterion& c) { return o == c.key || o == std::to_string(c.id); });
        if (!known) throw InputError("verify: unknown criterion '" + o + "'");
    }
    Report rep;
    for (const auto& crit : detail::criteria()) {
        if (!opt.only.empty() && std::none_of(opt.only.begin(), opt.only.end(), [&](const std::string& o) {
                return o == crit.key || o == std::to_string(crit.id);
            })) {
            continue;
        }
        CriterionResult r;
        r.id = crit.id;
        r.key = crit.key;
        r.title = crit.title;
        const auto t0 = std::chrono::steady_clock::now();
        detail::Check check;
        try {
            crit.run(opt, check);
        } catch (const std::exception& e) {
            check.fail(std::string("exception: ") + e.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.passed = check.ok();
        r.detail = check.detail();
        if (on_result) on_result(r);
        rep.results.push_back(std::move(r));
    }
    return rep;
}

/// Evaluator whose J_nu(x) is computed at a slightly shifted argument, used to
/// confirm that the dual-solver criterion detects a corrupted Bessel routine.
inline const BesselEvaluator& tampered_bessel() {
    static const BesselEvaluator ev = [] {
        BesselEvaluator e;
        e.j = [](double nu, double x) { return bessel::cyl_j(nu, x * (1.0 + 1e-4)); };
        return e;
    }();
    return ev;
}

}  // namespace conespec::verify

/**
 * @file convergence_lab.hpp
 * @brief eps-sweeps, rate fits against the limit spectrum, eigenmode trace
 *        decay per A-band, and the Hardy-type inequality check.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conespec/channel_model.hpp"
#include "conespec/errors.hpp"
#include "conespec/parallel.hpp"
#include "conespec/quadrature.hpp"
#include "conespec/radial_solver.hpp"
#include "conespec/report_io.hpp"
#include "conespec/spectra.hpp"

namespace conespec {

/// Default sweep: eps = 10^{-k/2}, k = 2..16.
inline std::vector<double> default_eps_list() {
    std::vector<double> out;
    for (int k = 2; k <= 16; ++k) out.push_back(std::pow(10.0, -0.5 * k));
    return out;
}

struct SweepTable {
    std::vector<double> eps;              // strictly decreasing
    std::vector<SpectrumReport> reports;  // one per eps
    SpectrumReport limit;
    int count = 0;

    /// lambda_N(eps_i) with N 1-based, kernel-free eps spectra (expanded by multiplicity).
    [[nodiscard]] std::vector<double> column(int n) const {
        std::vector<double> out;
        for (const auto& r : reports) {
            const auto v = r.expanded();
            out.push_back(static_cast<std::size_t>(n) <= v.size() ? v[static_cast<std::size_t>(n) - 1] : NAN);
        }
        return out;
    }

    /// Limit spectrum expanded by multiplicity, with zero_mult zeros in front.
    [[nodiscard]] std::vector<double> limit_values() const {
        std::vector<double> out(static_cast<std::size_t>(limit.zero_mult), 0.0);
        const auto pos = limit.expanded();
        out.insert(out.end(), pos.begin(), pos.end());
        return out;
    }
};

/// eps_spectrum at every eps (parallel over eps points) plus the limit spectrum once.
inline SweepTable sweep(const Geometry& geom, const std::vector<double>& eps_list, int count,
                        const SpectrumOptions& opt = {}) {
    if (geom.channels.empty()) throw InputError("sweep: geometry has no channels");
    if (eps_list.empty()) throw InputError("sweep: empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) throw InputError("sweep: eps values must lie in (0, 1)");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InputError("sweep: eps list must be strictly decreasing");
    }
    SweepTable t;
    t.eps = eps_list;
    t.count = count;
    t.reports.resize(eps_list.size());
    SpectrumOptions inner = opt;
    inner.threads = 1;
    parallel_for(eps_list.size(), opt.threads, [&](std::size_t i) { t.reports[i] = eps_spectrum(geom, eps_list[i], count, inner); });
    const WDecision w = compute_w_decision(geom);
    t.limit = limit_spectrum(geom, w, count, inner);
    return t;
}

inline std::string sweep_csv(const SweepTable& t) {
    std::vector<SpectrumReport> all = t.reports;
    all.push_back(t.limit);
    return io::to_csv(all);
}

/// Two-column (eps, lambda_N) data for plotting; the limit value is given in a comment line.
inline std::string gnuplot_column(const SweepTable& t, int n) {
    std::ostringstream os;
    const auto lim = t.limit_values();
    os << "# N=" << n << " limit="
       << (static_cast<std::size_t>(n) <= lim.size() ? io::format_double(lim[static_cast<std::size_t>(n) - 1]) : "nan")
       << "\n# eps lambda\n";
    const auto col = t.column(n);
    for (std::size_t i = 0; i < t.eps.size(); ++i) {
        os << io::format_double(t.eps[i]) << ' ' << io::format_double(col[i]) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Rate fitting

enum class RateFamily { None, Constant, Power, InverseLog, PowerLog };

inline std::string family_name(RateFamily f) {
    switch (f) {
        case RateFamily::None: return "none";
        case RateFamily::Constant: return "constant";
        case RateFamily::Power: return "eps^alpha";
        case RateFamily::InverseLog: return "1/|log eps|";
        case RateFamily::PowerLog: return "eps^alpha*|log eps|^beta";
    }
    return "?";
}

/// Result of fitting err(eps) = C * eps^alpha * |log eps|^beta within one family.
struct RateFit {
    RateFamily family = RateFamily::None;
    double coefficient = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;   // in log(err)
    double residual = 0.0;    // rms of log(err) residuals
};

struct IndexFit {
    int n = 0;
    double limit_lambda = 0.0;
    RateFit best;
    std::vector<RateFit> candidates;
    bool converged = false;    // errors vanish (constant column) or decrease monotonically
    bool flagged = false;      // non-monotone errors: not fitted
    std::string note;
};

namespace detail {

/// Least squares y ~ X b for up to three columns (normal equations with pivoting).
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
    const std::size_t p = cols.size();
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < y.size(); ++k) a[i][j] += cols[i][k] * cols[j][k];
        }
        for (std::size_t k = 0; k < y.size(); ++k) a[i][p] += cols[i][k] * y[k];
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        if (a[c][c] == 0.0) throw SolverError("least squares: singular design");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> b(p);
    for (std::size_t i = 0; i < p; ++i) b[i] = a[i][p] / a[i][i];
    return b;
}

inline void score(RateFit& f, const std::vector<double>& y, const std::vector<double>& pred) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    f.residual = std::sqrt(ss_res / static_cast<double>(y.size()));
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
}

}  // namespace detail

/**
 * Fits err_i = |value_i| against the rate families on log data
 * (x = log eps, l = log|log eps|):
 *   eps^alpha                 log err = c + alpha x
 *   1/|log eps|               log err = c - l
 *   eps^alpha |log eps|^beta  log err = c + alpha x + beta l
 */
inline std::vector<RateFit> fit_families(const std::vector<double>& eps, const std::vector<double>& err) {
    std::vector<double> x, l, y, ones;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        x.push_back(std::log(eps[i]));
        l.push_back(std::log(std::abs(std::log(eps[i]))));
        y.push_back(std::log(err[i]));
        ones.push_back(1.0);
    }
    std::vector<RateFit> out;
    {
        const auto b = detail::least_squares({ones, x}, y);
        RateFit f{RateFamily::Power, std::exp(b[0]), b[1], 0.0};
        std::vector<double> pred;
        for (std::size_t i = 0; i < y.size(); ++i) pred.push_back(b[0] + b[1] * x[i]);
        detail::score(f, y, pred);
        out.push_back(f);
    }
    {
        std::vector<double> shifted;
        for (std::size_t i = 0; i < y.size(); ++i) shifted.push_back(y[i] + l[i]);
        const auto b = detail::least_squares({ones}, shifted);
        RateFit f{RateFamily::InverseLog, std::exp(b[0]), 0.0, -1.0};
        std::vector<double> pred;
        for (std::size_t i = 0; i < y.size(); ++i) pred.push_back(b[0] - l[i]);
        detail::score(f, y, pred);
        out.push_back(f);
    }
    if (eps.size() >= 4) {
        const auto b = detail::least_squares({ones, x, l}, y);
        RateFit f{RateFamily::PowerLog, std::exp(b[0]), b[1], b[2]};
        std::vector<double> pred;
        for (std::size_t i = 0; i < y.size(); ++i) pred.push_back(b[0] + b[1] * x[i] + b[2] * l[i]);
        detail::score(f, y, pred);
        out.push_back(f);
    }
    return out;
}

/// Threshold on R^2 for accepting a rate family.
inline constexpr double kFitR2 = 0.99;

/**
 * Per index N (1-based, with multiplicity; the limit list starts with
 * zero_mult zeros) fits |lambda_N(eps) - lambda_N| over the sweep. The
 * preferred family is the first, in order, whose fit reaches R^2 >= 0.99:
 * zero-limit indices try 1/|log eps| first, the others eps^alpha first; the
 * three-parameter family is the last resort. Non-monotone error sequences are
 * flagged and not fitted.
 */
inline std::vector<IndexFit> match_and_fit(const SweepTable& table) {
    if (table.eps.size() < 4) throw InputError("match_and_fit: need at least 4 eps points");
    // sort rows by decreasing eps so the result does not depend on the input order
    std::vector<std::size_t> order(table.eps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return table.eps[a] > table.eps[b]; });
    const auto lim = table.limit_values();
    std::vector<IndexFit> out;
    const int n_max = std::min<int>(table.count, static_cast<int>(lim.size()));
    for (int n = 1; n <= n_max; ++n) {
        IndexFit fit;
        fit.n = n;
        fit.limit_lambda = lim[static_cast<std::size_t>(n) - 1];
        const auto col = table.column(n);
        std::vector<double> eps, err;
        bool missing = false;
        for (std::size_t i : order) {
            if (std::isnan(col[i])) missing = true;
            eps.push_back(table.eps[i]);
            err.push_back(std::abs(col[i] - fit.limit_lambda));
        }
        if (missing) {
            fit.flagged = true;
            fit.note = "eps spectrum shorter than N";
            out.push_back(fit);
            continue;
        }
        const double scale = std::max(1.0, std::abs(fit.limit_lambda));
        if (std::all_of(err.begin(), err.end(), [&](double e) { return e <= 1e-12 * scale; })) {
            fit.best.family = RateFamily::Constant;
            fit.best.r_squared = 1.0;
            fit.converged = true;
            fit.note = "constant column";
            out.push_back(fit);
            continue;
        }
        bool monotone = true;
        for (std::size_t i = 1; i < err.size(); ++i) {
            if (err[i] > err[i - 1] * (1.0 + 1e-9) + 1e-14 * scale) monotone = false;
        }
        if (!monotone || std::any_of(err.begin(), err.end(), [](double e) { return !(e > 0.0); })) {
            fit.flagged = true;
            fit.note = "non-monotone error sequence";
            out.push_back(fit);
            continue;
        }
        fit.converged = true;
        fit.candidates = fit_families(eps, err);
        const bool zero_limit = fit.limit_lambda == 0.0;
        const std::array<RateFamily, 3> pref = zero_limit
            ? std::array{RateFamily::InverseLog, RateFamily::Power, RateFamily::PowerLog}
            : std::array{RateFamily::Power, RateFamily::InverseLog, RateFamily::PowerLog};
        std::optional<RateFit> chosen;
        for (auto fam : pref) {
            for (const auto& c : fit.candidates) {
                if (!chosen && c.family == fam && c.r_squared >= kFitR2) chosen = c;
            }
        }
        if (!chosen) {
            chosen = *std::max_element(fit.candidates.begin(), fit.candidates.end(),
                                       [](const RateFit& a, const RateFit& b) { return a.r_squared < b.r_squared; });
            fit.note = "no family reaches R^2 >= 0.99";
        }
        fit.best = *chosen;
        out.push_back(fit);
    }
    return out;
}

inline nlohmann::json fit_json(const RateFit& f) {
    return {{"family", family_name(f.family)}, {"coefficient", f.coefficient}, {"alpha", f.alpha},
            {"beta", f.beta},                   {"r_squared", f.r_squared},     {"residual", f.residual}};
}

inline std::string fit_summary_json(const std::vector<IndexFit>& fits) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : fits) {
        nlohmann::json j{{"n", f.n},           {"limit_lambda", f.limit_lambda}, {"best", fit_json(f.best)},
                         {"converged", f.converged}, {"flagged", f.flagged},     {"note", f.note}};
        j["candidates"] = nlohmann::json::array();
        for (const auto& c : f.candidates) j["candidates"].push_back(fit_json(c));
        arr.push_back(j);
    }
    return nlohmann::json{{"fits", arr}}.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Trace decay

enum class TraceBand { LeMinusOne, MinusOneZero, Half };

inline std::string band_name(TraceBand b) {
    switch (b) {
        case TraceBand::LeMinusOne: return "gamma<=-1";
        case TraceBand::MinusOneZero: return "-1<gamma<0";
        case TraceBand::Half: return "gamma=1/2";
    }
    return "?";
}

struct TraceDecay {
    TraceBand band = TraceBand::LeMinusOne;
    double gamma = 0.0;
    double exponent = 0.0;   // fitted decay exponent (see trace_decay_check)
    double expected = 0.0;   // bound the exponent is compared with
    double r_squared = 0.0;
    bool holds = false;
};

struct TraceDecayReport {
    std::vector<TraceDecay> fits;
    std::vector<std::string> notes;
};

/// Tolerance on fitted decay exponents.
inline constexpr double kExponentTolerance = 0.1;

/**
 * For every channel in a band, takes the N-th eps-eigenmode of that channel
 * (N 1-based, L^2-normalized on [eps r0, 1]) along the sweep and fits:
 *   gamma <= -1:     |u(eps)| ~ eps^a, holds iff a >= 1/2 - 0.1;
 *   -1 < gamma < 0:  |u(eps)| ~ eps^a, a reported, holds iff a > 0;
 *   gamma = 1/2:     the r^{-1/2} coefficient d ~ |log eps|^{-b}, holds iff
 *                    |b - 1/2| <= 10% of 1/2 (channels with t = 0 only).
 * u(eps) is the trace at the gluing radius r = eps.
 */
inline TraceDecayReport trace_decay_check(const Geometry& geom, const std::vector<double>& eps_list, int n,
                                          const SpectrumOptions& opt = {}) {
    geom.validate();
    if (eps_list.size() < 3) throw InputError("trace_decay_check: need at least 3 eps points");
    if (n < 1) throw InputError("trace_decay_check: N must be positive");
    TraceDecayReport rep;
    struct Job {
        TraceBand band;
        const Channel* ch;
    };
    std::vector<Job> jobs;
    bool have[3] = {false, false, false};
    for (const auto& ch : geom.channels) {
        std::optional<TraceBand> band;
        if (ch.gamma <= -1.0 + 1e-12) band = TraceBand::LeMinusOne;
        else if (ch.gamma < 0.0 && !same_gamma(ch.gamma, 0.0)) band = TraceBand::MinusOneZero;
        else if (is_half(ch.gamma) && ch.gamma > 0.0) band = TraceBand::Half;
        if (!band) continue;
        if (*band == TraceBand::Half && !t_scalar(ch, geom.r0, geom.m2_cap(ch.gamma)).is_zero()) {
            rep.notes.push_back("gamma=1/2 channel has t != 0: coefficient law not applicable, skipped");
            continue;
        }
        have[static_cast<int>(*band)] = true;
        jobs.push_back({*band, &ch});
    }
    for (auto b : {TraceBand::LeMinusOne, TraceBand::MinusOneZero, TraceBand::Half}) {
        if (!have[static_cast<int>(b)]) rep.notes.push_back("band " + band_name(b) + " absent, skipped");
    }
    std::vector<TraceDecay> results(jobs.size());
    parallel_for(jobs.size(), opt.threads, [&](std::size_t j) {
        const Channel& ch = *jobs[j].ch;
        std::vector<double> xs, ys;
        for (double eps : eps_list) {
            const RadialProblem p = eps_problem(geom, ch, eps, n);
            const auto modes = shoot_modes(p, ShootOptions{opt.bessel});
            const RadialMode& m = modes.at(static_cast<std::size_t>(n) - 1);
            if (jobs[j].band == TraceBand::Half) {
                xs.push_back(std::log(std::abs(std::log(eps))));
                ys.push_back(std::log(std::abs(m.half_coefficient())));
            } else {
                xs.push_back(std::log(eps));
                ys.push_back(std::log(std::abs(m.value(eps))));
            }
        }
        std::vector<double> ones(xs.size(), 1.0);
        const auto b = detail::least_squares({ones, xs}, ys);
        RateFit f;
        std::vector<double> pred;
        for (std::size_t i = 0; i < xs.size(); ++i) pred.push_back(b[0] + b[1] * xs[i]);
        detail::score(f, ys, pred);
        TraceDecay d;
        d.band = jobs[j].band;
        d.gamma = ch.gamma;
        d.r_squared = f.r_squared;
        switch (d.band) {
            case TraceBand::LeMinusOne:
                d.exponent = b[1];
                d.expected = 0.5;
                d.holds = d.exponent >= d.expected - kExponentTolerance;
                break;
            case TraceBand::MinusOneZero:
                d.exponent = b[1];
                d.expected = 0.0;
                d.holds = d.exponent > d.expected;
                break;
            case TraceBand::Half:
                d.exponent = -b[1];
                d.expected = 0.5;
                d.holds = std::abs(d.exponent - d.expected) <= 0.1 * d.expected;
                break;
        }
        results[j] = d;
    });
    rep.fits = std::move(results);
    return rep;
}

// ---------------------------------------------------------------------------
// Hardy-type inequality

struct HardyResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

/// Smooth bump amplitude * exp(1 - 1/(1 - x^2)), x = (r - center) / half_width, supported on |x| < 1.
struct Bump {
    double center = 4.0;
    double half_width = 1.0;
    double amplitude = 1.0;

    [[nodiscard]] double lo() const { return center - half_width; }
    [[nodiscard]] double hi() const { return center + half_width; }

    [[nodiscard]] double value(double r) const {
        const double x = (r - center) / half_width;
        if (std::abs(x) >= 1.0) return 0.0;
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - x * x));
    }

    [[nodiscard]] double derivative(double r) const {
        const double x = (r - center) / half_width;
        if (std::abs(x) >= 1.0) return 0.0;
        const double d = 1.0 - x * x;
        return value(r) * (-2.0 * x / (d * d)) / half_width;
    }
};

/**
 * Both sides of the Hardy-type inequality for v supported in [lo, hi] with
 * e < lo (e = Euler's number):
 *   lambda != -1/2:  (lambda + 1/2)^2 int v^2 / r^2  <=  int r^{-2 lambda} |(r^lambda v)'|^2
 *   lambda  = -1/2:  int v^2 / (|r log r|^2 log log r)  <=  int r |(r^{-1/2} v)'|^2
 * with r^{-2 lambda} |(r^lambda v)'|^2 = (v' + lambda v / r)^2. Integrals use
 * 12-point Gauss–Legendre on `panels` equal panels; holds = lhs <= rhs (1 + 1e-8).
 */
inline HardyResult hardy_check(double lambda, const std::function<double(double)>& v,
                               const std::function<double(double)>& dv, double lo, double hi, int panels = 200) {
    if (!(lo > std::numbers::e) || !(hi > lo) || !std::isfinite(hi)) {
        throw InputError("hardy_check: support must be an interval [lo, hi] with e < lo < hi");
    }
    if (panels < 1) throw InputError("hardy_check: panels must be positive");
    static const quad::Rule rule = quad::gauss_legendre(12);
    std::vector<double> edges;
    for (int i = 0; i <= panels; ++i) edges.push_back(lo + (hi - lo) * i / panels);
    HardyResult res;
    if (std::abs(lambda + 0.5) <= 1e-12) {
        res.lhs = quad::integrate_panels(rule, edges, [&](double r) {
            const double lr = std::log(r);
            const double x = v(r);
            return x * x / (r * r * lr * lr * std::log(lr));
        });
        res.rhs = quad::integrate_panels(rule, edges, [&](double r) {
            const double g = dv(r) - 0.5 * v(r) / r;
            return g * g;
        });
    } else {
        const double c = (lambda + 0.5) * (lambda + 0.5);
        res.lhs = c * quad::integrate_panels(rule, edges, [&](double r) {
            const double x = v(r);
            return x * x / (r * r);
        });
        res.rhs = quad::integrate_panels(rule, edges, [&](double r) {
            const double g = dv(r) + lambda * v(r) / r;
            return g * g;
        });
    }
    res.holds = res.lhs <= res.rhs * (1.0 + 1e-8);
    return res;
}

inline HardyResult hardy_check(double lambda, const Bump& b, int panels = 200) {
    return hardy_check(lambda, [&](double r) { return b.value(r); }, [&](double r) { return b.derivative(r); },
                       b.lo(), b.hi(), panels);
}

}  // namespace conespec

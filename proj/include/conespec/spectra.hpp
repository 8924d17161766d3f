/**
 * @file spectra.hpp
 * @brief Finite-eps spectra, the limit spectrum with its exact zero
 *        multiplicity, and pseudomode Rayleigh quotients.
 *
 * In the exact-cone model each channel gamma is one radial problem:
 *   finite eps: [eps r0, 1] with cap_m2 at the left and cap_m1 at the right;
 *   limit:      [0, 1] with the limit branch at r = 0 and cap_m1 at r = 1.
 * Channel spectra are merged with their A-multiplicities and sorted by
 * (lambda, gamma).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conespec/channel_model.hpp"
#include "conespec/errors.hpp"
#include "conespec/finite_difference.hpp"
#include "conespec/parallel.hpp"
#include "conespec/quadrature.hpp"
#include "conespec/radial_solver.hpp"

namespace conespec {

/// Which solver produced an eigenvalue.
enum class SolverTag { Shooting, FiniteDifference };

inline std::string solver_name(SolverTag s) { return s == SolverTag::Shooting ? "shooting" : "fd"; }

inline SolverTag parse_solver(const std::string& s) {
    if (s == "shooting") return SolverTag::Shooting;
    if (s == "fd") return SolverTag::FiniteDifference;
    throw InputError("unknown solver '" + s + "' (expected shooting or fd)");
}

struct SpectrumEntry {
    double lambda = 0.0;
    double gamma = 0.0;   // channel label
    long mult = 1;
    std::string solver = "shooting";

    friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

struct SpectrumReport {
    bool is_limit = false;
    double eps = 0.0;        // meaningless for limit reports
    std::vector<SpectrumEntry> entries;
    long zero_mult = 0;      // limit reports only: dim_ker_limit + dim_ker_D2 + i_half

    /// Eigenvalues repeated according to multiplicity (kernel excluded).
    [[nodiscard]] std::vector<double> expanded() const {
        std::vector<double> out;
        for (const auto& e : entries) out.insert(out.end(), static_cast<std::size_t>(e.mult), e.lambda);
        return out;
    }

    /// Number of eigenvalues (with multiplicity) strictly below x.
    [[nodiscard]] long count_below(double x) const {
        long n = 0;
        for (const auto& e : entries) {
            if (e.lambda < x) n += e.mult;
        }
        return n;
    }

    friend bool operator==(const SpectrumReport&, const SpectrumReport&) = default;
};

struct SpectrumOptions {
    SolverTag solver = SolverTag::Shooting;
    unsigned threads = 1;                   // 0 = hardware concurrency
    const BesselEvaluator* bessel = nullptr;
};

namespace detail {

inline std::string channel_context(double gamma, const std::string& what) {
    std::ostringstream os;
    os.precision(17);
    os << "channel gamma=" << gamma << ": " << what;
    return os.str();
}

/// Sorts by (lambda, gamma) and keeps the smallest entries until their total
/// multiplicity reaches `count` (the last kept entry may overshoot).
inline void sort_and_truncate(std::vector<SpectrumEntry>& entries, int count) {
    std::stable_sort(entries.begin(), entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.gamma < b.gamma;
    });
    long total = 0;
    std::size_t keep = 0;
    while (keep < entries.size() && total < count) total += entries[keep++].mult;
    entries.resize(keep);
}

/// Runs `solve(i)` for every channel and concatenates the per-channel results in channel order.
template <class Solve>
std::vector<SpectrumEntry> per_channel(const Geometry& geom, unsigned threads, Solve&& solve) {
    std::vector<std::vector<SpectrumEntry>> slots(geom.channels.size());
    parallel_for(geom.channels.size(), threads, [&](std::size_t i) {
        const double g = geom.channels[i].gamma;
        try {
            slots[i] = solve(i);
        } catch (const InputError& e) {
            throw InputError(channel_context(g, e.what()));
        } catch (const SolverError& e) {
            throw SolverError(channel_context(g, e.what()));
        }
    });
    std::vector<SpectrumEntry> all;
    for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
    return all;
}

}  // namespace detail

/// Radial problem of one channel at finite eps.
inline RadialProblem eps_problem(const Geometry& geom, const Channel& ch, double eps, int count) {
    RadialProblem p;
    p.gamma = ch.gamma;
    p.a = eps * geom.r0;
    p.b = 1.0;
    p.left = geom.m2_cap(ch.gamma);
    p.right = geom.m1_cap(ch.gamma);
    p.count = count;
    return p;
}

/// Radial problem of one channel in the limit, using the branch rule of the W decision.
inline RadialProblem limit_problem(const Geometry& geom, const ChannelDecision& d, int count) {
    RadialProblem p;
    p.gamma = d.gamma;
    p.a = 0.0;
    p.b = 1.0;
    p.left = d.in_w ? BranchSelection::r_minus_gamma() : BranchSelection::minimal();
    p.right = geom.m1_cap(d.gamma);
    p.count = count;
    return p;
}

/**
 * The `count` smallest eigenvalues (with multiplicity) of the eps-problem.
 * Non-positive eigenvalues, which Robin caps can produce, are reported too.
 */
inline SpectrumReport eps_spectrum(const Geometry& geom, double eps, int count, const SpectrumOptions& opt = {}) {
    geom.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps_spectrum: eps must lie in (0, 1)");
    if (count < 1) throw InputError("eps_spectrum: count must be positive");
    SpectrumReport rep;
    rep.eps = eps;
    const std::string tag = solver_name(opt.solver);
    rep.entries = detail::per_channel(geom, opt.threads, [&](std::size_t i) {
        const Channel& ch = geom.channels[i];
        const RadialProblem p = eps_problem(geom, ch, eps, count);
        std::vector<double> values;
        if (opt.solver == SolverTag::Shooting) {
            values = shoot_eigenvalues(p, ShootOptions{opt.bessel});
        } else {
            for (const auto& v : fd_eigenvalues(p)) values.push_back(v.lambda);
        }
        std::vector<SpectrumEntry> out;
        for (double v : values) out.push_back({v, ch.gamma, ch.mult, tag});
        return out;
    });
    detail::sort_and_truncate(rep.entries, count);
    return rep;
}

/**
 * The `count` smallest positive eigenvalues (with multiplicity) of the limit
 * operator. The kernel is not listed; its dimension is the exact integer
 * w.zero_mult(). A negative limit eigenvalue is reported as a solver error:
 * the cap data then do not describe a non-negative limit operator.
 */
inline SpectrumReport limit_spectrum(const Geometry& geom, const WDecision& w, int count,
                                     const SpectrumOptions& opt = {}) {
    geom.validate();
    if (count < 1) throw InputError("limit_spectrum: count must be positive");
    if (w.channels.size() != geom.channels.size()) {
        throw InputError("limit_spectrum: W decision does not match the geometry");
    }
    SpectrumReport rep;
    rep.is_limit = true;
    rep.zero_mult = w.zero_mult();
    const std::string tag = solver_name(opt.solver);
    rep.entries = detail::per_channel(geom, opt.threads, [&](std::size_t i) {
        const Channel& ch = geom.channels[i];
        const ChannelDecision& d = w.channels[i];
        if (!same_gamma(d.gamma, ch.gamma)) throw InputError("W decision channel order mismatch");
        // one extra mode in case the channel carries a kernel element
        const RadialProblem p = limit_problem(geom, d, count + 1);
        std::vector<SpectrumEntry> out;
        if (opt.solver == SolverTag::Shooting) {
            for (const auto& m : shoot_modes(p, ShootOptions{opt.bessel})) {
                if (m.kind == RadialMode::Kind::Negative) {
                    std::ostringstream os;
                    os.precision(12);
                    os << "negative limit eigenvalue " << m.lambda << " (non-physical cap data)";
                    throw SolverError(os.str());
                }
                if (m.kind == RadialMode::Kind::Zero) continue;
                out.push_back({m.lambda, ch.gamma, ch.mult, tag});
            }
        } else {
            for (const auto& v : fd_eigenvalues(p)) {
                if (d.limit_kernel && std::abs(v.lambda) <= 1e-6) continue;
                if (v.lambda < 0.0) throw SolverError("negative limit eigenvalue (non-physical cap data)");
                out.push_back({v.lambda, ch.gamma, ch.mult, tag});
            }
        }
        if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(count));
        return out;
    });
    detail::sort_and_truncate(rep.entries, count);
    return rep;
}

struct PseudomodeResult {
    double rayleigh = 0.0;   // q(psi) / |psi|^2
    double l2_norm = 0.0;    // |psi|
    int panels = 0;          // panels per sub-interval at convergence
};

namespace detail {

/// Cut-off equal to 1 on r <= 1/2 and 0 at r = 1, smooth in between:
/// xi = 1 / (1 + e^z) with z = 1/(1-r) - 1/(r-1/2).
/// Returns (xi, xi') for r in (1/2, 1).
inline std::pair<double, double> cutoff(double r) {
    const double d1 = 1.0 - r, d0 = r - 0.5;
    const double z = 1.0 / d1 - 1.0 / d0;
    const double dz = 1.0 / (d1 * d1) + 1.0 / (d0 * d0);
    const double t = std::exp(-std::abs(z));           // in (0, 1]
    const double xi = z > 0.0 ? t / (1.0 + t) : 1.0 / (1.0 + t);
    const double xi_one_minus = t / ((1.0 + t) * (1.0 + t));
    return {xi, -xi_one_minus * dz};
}

}  // namespace detail

/**
 * Rayleigh quotient of the pseudomode psi = c xi(r) r^{-gamma} on [eps r0, 1]
 * for a channel whose harmonic r^{-gamma} satisfies the M2 cap (t = 0).
 * For gamma = 1/2, c = |log eps|^{-1/2}; otherwise c = 1. Because r^{-gamma}
 * is harmonic and satisfies the left cap exactly, the quadratic form reduces to
 * q(psi) = c^2 int xi'^2 r^{-2 gamma} dr. Integrals use 12-point Gauss–Legendre
 * on log-spaced panels over [eps r0, 1/2] and uniform panels over [1/2, 1]; the
 * panel count doubles until the quotient changes by less than 1e-3 relative.
 */
inline PseudomodeResult pseudomode_quotient(const Geometry& geom, double eps, double gamma = 0.5) {
    geom.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("pseudomode_quotient: eps must lie in (0, 1)");
    const auto it = std::find_if(geom.channels.begin(), geom.channels.end(),
                                 [&](const Channel& c) { return same_gamma(c.gamma, gamma); });
    if (it == geom.channels.end()) {
        throw InputError(detail::channel_context(gamma, "pseudomode needs this channel in the geometry"));
    }
    if (!t_scalar(*it, geom.r0, geom.m2_cap(gamma)).is_zero()) {
        throw InputError(detail::channel_context(gamma, "pseudomode needs t = 0 (cap_m2 = robin(-gamma))"));
    }
    const double a = eps * geom.r0;
    if (!(a < 0.5)) throw InputError("pseudomode_quotient: eps r0 must be below 1/2");
    const double c2 = is_half(gamma) && gamma > 0 ? 1.0 / std::abs(std::log(eps)) : 1.0;
    static const quad::Rule rule = quad::gauss_legendre(12);
    auto weight = [&](double r) { return std::pow(r, -2.0 * gamma); };

    auto evaluate = [&](int panels) {
        // [a, 1/2]: xi = 1, xi' = 0, integrate in s = log r
        const double sa = std::log(a), sh = std::log(0.5);
        std::vector<double> left(static_cast<std::size_t>(panels) + 1);
        for (int i = 0; i <= panels; ++i) left[static_cast<std::size_t>(i)] = sa + (sh - sa) * i / panels;
        const double n_left = quad::integrate_panels(rule, left, [&](double s) {
            const double r = std::exp(s);
            return weight(r) * r;
        });
        std::vector<double> right(static_cast<std::size_t>(panels) + 1);
        for (int i = 0; i <= panels; ++i) right[static_cast<std::size_t>(i)] = 0.5 + 0.5 * i / panels;
        double n_right = 0.0, q = 0.0;
        for (int i = 0; i < panels; ++i) {
            n_right += quad::integrate(rule, right[i], right[i + 1], [&](double r) {
                const double xi = detail::cutoff(r).first;
                return xi * xi * weight(r);
            });
            q += quad::integrate(rule, right[i], right[i + 1], [&](double r) {
                const double dxi = detail::cutoff(r).second;
                return dxi * dxi * weight(r);
            });
        }
        const double norm2 = c2 * (n_left + n_right);
        return PseudomodeResult{c2 * q / norm2, std::sqrt(norm2), panels};
    };

    PseudomodeResult prev = evaluate(8);
    for (int panels = 16; panels <= (1 << 16); panels *= 2) {
        PseudomodeResult cur = evaluate(panels);
        if (std::abs(cur.rayleigh - prev.rayleigh) <= 1e-3 * std::abs(cur.rayleigh)) return cur;
        prev = cur;
    }
    throw SolverError("pseudomode_quotient: quadrature did not converge");
}

}  // namespace conespec

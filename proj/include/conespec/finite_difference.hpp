/**
 * @file finite_difference.hpp
 * @brief Finite-difference oracle for the radial eigenproblem, independent of
 *        the Bessel machinery.
 *
 * With s = log r and the ground-state substitution u = r^e v, where r^e is one
 * of the two harmonic branches (e(e-1) = gamma(gamma+1)), the channel equation
 * takes the symmetric form
 *     -(e^{(2e-1)s} v_s)_s = lambda e^{(2e+1)s} v,
 * and the cap r u' - kappa u = 0 becomes v_s = (kappa - e) v. The branch is
 * chosen to match the left cap when possible: the selected solution is then an
 * exact discrete constant, so the discretization cannot leak the other branch
 * in, which would otherwise be amplified by (b/a)^{|2 gamma + 1|} on tiny
 * intervals. A vertex-centred finite-volume scheme (half cells at Robin ends)
 * gives a symmetric tridiagonal pencil whose lowest eigenvalues are found by
 * Sturm bisection; Richardson extrapolation in h^2 combines the grids. The
 * singular endpoint a = 0 is truncated at a small delta carrying the
 * branch-matched condition kappa = e for the kept branch r^e.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "conespec/errors.hpp"
#include "conespec/radial_solver.hpp"
#include "conespec/tridiagonal.hpp"

namespace conespec {

struct FdEigenvalue {
    double lambda = 0.0;
    double error_estimate = 0.0;
    bool converged = true;   // extrapolation residual within budget
};

namespace detail {

/// Pencil for one grid with N intervals on [sa, sb] in s = log r, for u = r^e v.
inline tridiag::LadderPencil fd_pencil(double e, double sa, double sb, std::optional<double> kappa_a,
                                       std::optional<double> kappa_b, int n) {
    const double h = (sb - sa) / n;
    const double ih2 = 1.0 / (h * h);
    // coefficients relative to their values at s = sb to keep magnitudes moderate
    auto p = [&](double s) { return std::exp((2.0 * e - 1.0) * (s - sb)); };
    auto q = [&](double s) { return std::exp((2.0 * e + 1.0) * (s - sb)); };
    const int first = kappa_a ? 0 : 1;
    const int last = kappa_b ? n : n - 1;
    tridiag::LadderPencil t;
    for (int i = first; i <= last; ++i) {
        const double s = sa + h * i;
        double shunt = 0.0;
        double m = q(s);
        if (i == 0) {
            shunt = p(s) * (*kappa_a - e) / h;
            m *= 0.5;
        } else if (i == 1 && !kappa_a) {
            shunt = p(s - 0.5 * h) * ih2;   // link to the Dirichlet node
        }
        if (i == n) {
            shunt -= p(s) * (*kappa_b - e) / h;
            m *= 0.5;
        } else if (i == n - 1 && !kappa_b) {
            shunt += p(s + 0.5 * h) * ih2;
        }
        t.shunt.push_back(shunt);
        t.mass.push_back(m);
        if (i < last) t.link.push_back(p(s + 0.5 * h) * ih2);
    }
    return t;
}

/// Branch exponent used for the substitution u = r^e v.
inline double fd_branch(double gamma, std::optional<double> kappa_a) {
    const double e1 = gamma + 1.0, e2 = -gamma;
    if (kappa_a) {
        return std::abs(*kappa_a - e1) <= std::abs(*kappa_a - e2) ? e1 : e2;
    }
    return std::max(e1, e2);
}

/// Richardson extrapolation in h^2 over grids N, 2N, 4N, ...; returns (value, residual).
inline std::pair<double, double> richardson(const std::vector<double>& seq) {
    std::vector<std::vector<double>> tab(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        tab[i].push_back(seq[i]);
        for (std::size_t j = 1; j <= i; ++j) {
            const double f = std::pow(4.0, static_cast<double>(j));
            tab[i].push_back(tab[i][j - 1] + (tab[i][j - 1] - tab[i - 1][j - 1]) / (f - 1.0));
        }
    }
    const std::size_t m = seq.size() - 1;
    const double best = tab[m][m];
    double resid = 0.0;
    if (m >= 1) resid = std::max(std::abs(best - tab[m][m - 1]), std::abs(best - tab[m - 1][m - 1]));
    return {best, resid};
}

}  // namespace detail

/// Default base grid: about 40 points per local wavelength at r = b for the highest requested mode.
inline int fd_default_base(const RadialProblem& p, double sa, double sb) {
    const double L = p.b - p.a;
    const double k = (p.nu() + 2.0 + std::numbers::pi * (p.count + 1)) / L;
    const double per_wave = 2.0 * std::numbers::pi / (k * p.b);
    const double n = std::ceil((sb - sa) / per_wave * 40.0);
    return static_cast<int>(std::clamp(n, 200.0, 4000.0));
}

namespace detail {

/// Extrapolated eigenvalues on [a, b] with caps given as Robin parameters (nullopt = Dirichlet).
inline std::vector<FdEigenvalue> fd_on_interval(const RadialProblem& p, double a, std::optional<double> kappa_a,
                                                std::vector<int> grid_sizes) {
    const auto kappa_b = p.right.robin_kappa();
    const double sa = std::log(a), sb = std::log(p.b);
    if (grid_sizes.empty()) {
        const int base = fd_default_base(p, sa, sb);
        grid_sizes = {base, 2 * base, 4 * base, 8 * base};
    }
    for (std::size_t i = 1; i < grid_sizes.size(); ++i) {
        if (grid_sizes[i] != 2 * grid_sizes[i - 1]) throw InputError("fd_eigenvalues: grid sizes must double");
    }
    if (grid_sizes.front() < 4) throw InputError("fd_eigenvalues: grids need at least 4 intervals");
    const double e = fd_branch(p.gamma, kappa_a);
    if (std::max(std::abs(2.0 * e - 1.0), std::abs(2.0 * e + 1.0)) * (sb - sa) > 600.0) {
        throw InputError("fd_eigenvalues: coefficient range exceeds double precision for " + p.describe());
    }
    const auto count = static_cast<std::size_t>(p.count);
    std::vector<std::vector<double>> per_grid;
    for (int n : grid_sizes) {
        const auto t = fd_pencil(e, sa, sb, kappa_a, kappa_b, n);
        if (t.size() < count) throw InputError("fd_eigenvalues: grid too coarse for the requested count");
        per_grid.push_back(tridiag::lowest_eigenvalues(t, count));
    }
    std::vector<FdEigenvalue> out;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> seq;
        for (const auto& g : per_grid) seq.push_back(g[k]);
        auto [val, res] = richardson(seq);
        out.push_back({val, res, res <= 1e-7 * std::max(1.0, std::abs(val))});
    }
    return out;
}

}  // namespace detail

/**
 * The first `count` eigenvalues by extrapolated finite differences. `grid_sizes`
 * must be increasing by factors of two (empty = automatic base N, 2N, 4N, 8N).
 *
 * For a = 0 the interval is truncated at delta with the branch-matched cap
 * kappa = e; the truncation error behaves like delta^{2e+1}, so two truncation
 * radii are combined by Richardson extrapolation in that power.
 */
inline std::vector<FdEigenvalue> fd_eigenvalues(const RadialProblem& p, std::vector<int> grid_sizes = {}) {
    p.validate();
    if (!p.singular()) {
        return detail::fd_on_interval(p, p.a, std::get<CapCondition>(p.left).robin_kappa(), grid_sizes);
    }
    const double e = p.branch_exponent();
    const double rho = 2.0 * e + 1.0;
    const double d1 = 1e-6 * p.b, t = 100.0;
    auto coarse = detail::fd_on_interval(p, d1, e, grid_sizes);
    if (rho >= 2.0) {
        auto fine = detail::fd_on_interval(p, d1 / t, e, grid_sizes);
        for (std::size_t k = 0; k < fine.size(); ++k) {
            fine[k].error_estimate += std::abs(fine[k].lambda - coarse[k].lambda);
        }
        return fine;
    }
    auto fine = detail::fd_on_interval(p, d1 / t, e, grid_sizes);
    const double f = std::pow(t, rho);
    for (std::size_t k = 0; k < fine.size(); ++k) {
        const double ext = (f * fine[k].lambda - coarse[k].lambda) / (f - 1.0);
        fine[k].error_estimate += std::abs(ext - fine[k].lambda);
        fine[k].lambda = ext;
        fine[k].converged = fine[k].converged && fine[k].error_estimate <= 1e-4 * std::max(1.0, std::abs(ext));
    }
    return fine;
}

}  // namespace conespec

/**
 * @file tridiagonal.hpp
 * @brief Selected eigenpairs of real symmetric tridiagonal pencils (T, diag(mass))
 *        by Sturm bisection and inverse iteration.
 *
 * Two storage forms are provided:
 *   - SymTridiag: diagonal, off-diagonal and optional mass;
 *   - LadderPencil: a weighted path Laplacian plus a diagonal shunt,
 *       T = sum_i c_i (e_i - e_{i+1})(e_i - e_{i+1})^T + diag(shunt),
 *     whose Sturm count is evaluated by the cancellation-free recurrence
 *       g_i = shunt_i - x m_i + c_{i-1} g_{i-1} / (c_{i-1} + g_{i-1}),
 *       pivot_i = c_i + g_i.
 *     This keeps counts accurate when the link weights c_i dwarf the
 *     eigenvalue scale (finite differences on strongly graded grids).
 * Inertia of T - x M is counted directly, so no M^{-1/2} scaling is formed.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "conespec/errors.hpp"

namespace conespec::tridiag {

/// Symmetric tridiagonal matrix (diag: N entries, off: N-1) with an optional
/// positive diagonal mass; an empty mass means the identity.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;
    std::vector<double> mass;

    [[nodiscard]] std::size_t size() const { return diag.size(); }
    [[nodiscard]] double m(std::size_t i) const { return mass.empty() ? 1.0 : mass[i]; }
    [[nodiscard]] double d(std::size_t i) const { return diag[i]; }
    [[nodiscard]] double e(std::size_t i) const { return off[i]; }

    void check() const {
        if (diag.empty()) throw InputError("tridiagonal: empty matrix");
        if (off.size() + 1 != diag.size()) throw InputError("tridiagonal: off-diagonal length mismatch");
        if (!mass.empty() && mass.size() != diag.size()) throw InputError("tridiagonal: mass length mismatch");
    }

    /// Number of eigenvalues strictly below x (negative LDL^T pivots of T - x M).
    [[nodiscard]] std::size_t count_below(double x) const {
        const std::size_t n = size();
        std::size_t count = 0;
        const double tiny = std::numeric_limits<double>::min();
        double q = diag[0] - x * m(0);
        for (std::size_t i = 0;; ++i) {
            if (q == 0.0) q = -tiny * (1.0 + std::abs(x));
            if (q < 0.0) ++count;
            if (i + 1 == n) break;
            q = diag[i + 1] - x * m(i + 1) - off[i] * off[i] / q;
        }
        return count;
    }
};

/// Weighted path Laplacian plus diagonal shunt, with positive mass.
struct LadderPencil {
    std::vector<double> link;    // N-1 positive link weights c_i between nodes i, i+1
    std::vector<double> shunt;   // N diagonal terms
    std::vector<double> mass;    // N positive masses

    [[nodiscard]] std::size_t size() const { return shunt.size(); }
    [[nodiscard]] double m(std::size_t i) const { return mass[i]; }
    [[nodiscard]] double d(std::size_t i) const {
        double v = shunt[i];
        if (i > 0) v += link[i - 1];
        if (i + 1 < size()) v += link[i];
        return v;
    }
    [[nodiscard]] double e(std::size_t i) const { return -link[i]; }

    void check() const {
        if (shunt.empty()) throw InputError("ladder pencil: empty matrix");
        if (link.size() + 1 != shunt.size()) throw InputError("ladder pencil: link length mismatch");
        if (mass.size() != shunt.size()) throw InputError("ladder pencil: mass length mismatch");
        for (double c : link) {
            if (!(c > 0.0)) throw InputError("ladder pencil: link weights must be positive");
        }
    }

    [[nodiscard]] std::size_t count_below(double x) const {
        const std::size_t n = size();
        std::size_t count = 0;
        const double tiny = std::numeric_limits<double>::min();
        double g = shunt[0] - x * mass[0];
        for (std::size_t i = 0;; ++i) {
            const double c = i + 1 < n ? link[i] : 0.0;
            double pivot = c + g;
            if (pivot == 0.0) pivot = -tiny * (1.0 + std::abs(x));
            if (pivot < 0.0) ++count;
            if (i + 1 == n) break;
            // c g / (c + g), written to stay finite when the pivot underflows
            g = shunt[i + 1] - x * mass[i + 1] + c * (g / pivot);
        }
        return count;
    }
};

/// Gershgorin interval containing the whole spectrum of the pencil.
template <class Pencil>
std::pair<double, double> gershgorin(const Pencil& t) {
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.e(i - 1)) / std::sqrt(t.m(i) * t.m(i - 1));
        if (i + 1 < n) r += std::abs(t.e(i)) / std::sqrt(t.m(i) * t.m(i + 1));
        const double c = t.d(i) / t.m(i);
        lo = std::min(lo, c - r);
        hi = std::max(hi, c + r);
    }
    return {lo, hi};
}

/// Number of eigenvalues strictly below x.
template <class Pencil>
std::size_t count_below(const Pencil& t, double x) {
    return t.count_below(x);
}

/// The k-th smallest eigenvalue (k = 0-based), bisected to machine precision.
template <class Pencil>
double eigenvalue(const Pencil& t, std::size_t k) {
    t.check();
    if (k >= t.size()) throw InputError("tridiagonal eigenvalue index out of range");
    auto [lo, hi] = gershgorin(t);
    const double span = std::max(std::abs(lo), std::abs(hi));
    lo -= 1e-12 * span + std::numeric_limits<double>::min();
    hi += 1e-12 * span + std::numeric_limits<double>::min();
    for (int it = 0; it < 2200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (t.count_below(mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// The `count` smallest eigenvalues in increasing order.
template <class Pencil>
std::vector<double> lowest_eigenvalues(const Pencil& t, std::size_t count) {
    count = std::min(count, t.size());
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(eigenvalue(t, k));
    return out;
}

/**
 * Eigenvector for the eigenvalue estimate `lambda` by inverse iteration with a
 * slightly shifted, LU-factored (T - lambda M); normalized so that v^T M v = 1.
 */
template <class Pencil>
std::vector<double> eigenvector(const Pencil& t, double lambda, int iterations = 4) {
    t.check();
    const std::size_t n = t.size();
    const double scale = std::max(1.0, std::abs(lambda));
    const double shift = lambda + 1e-14 * scale;
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < iterations; ++it) {
        // Gaussian elimination with partial pivoting; row i holds b (diag), c (super), u2 (second super).
        std::vector<double> a(n), b(n), c(n), u2(n, 0.0), rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = t.m(i) * v[i];
            b[i] = t.d(i) - shift * t.m(i);
            a[i] = i > 0 ? t.e(i - 1) : 0.0;
            c[i] = i + 1 < n ? t.e(i) : 0.0;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(a[i + 1]) > std::abs(b[i])) {
                std::swap(b[i], a[i + 1]);
                std::swap(c[i], b[i + 1]);
                std::swap(u2[i], c[i + 1]);
                std::swap(rhs[i], rhs[i + 1]);
            }
            if (b[i] == 0.0) b[i] = std::numeric_limits<double>::epsilon() * scale;
            const double mlt = a[i + 1] / b[i];
            b[i + 1] -= mlt * c[i];
            c[i + 1] -= mlt * u2[i];
            rhs[i + 1] -= mlt * rhs[i];
        }
        if (b[n - 1] == 0.0) b[n - 1] = std::numeric_limits<double>::epsilon() * scale;
        std::vector<double> x(n);
        for (std::size_t ii = n; ii-- > 0;) {
            double s = rhs[ii];
            if (ii + 1 < n) s -= c[ii] * x[ii + 1];
            if (ii + 2 < n) s -= u2[ii] * x[ii + 2];
            x[ii] = s / b[ii];
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += t.m(i) * x[i] * x[i];
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw SolverError("inverse iteration broke down");
        for (std::size_t i = 0; i < n; ++i) v[i] = x[i] / norm;
    }
    return v;
}

}  // namespace conespec::tridiag

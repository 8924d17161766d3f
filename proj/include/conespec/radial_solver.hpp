/**
 * @file radial_solver.hpp
 * @brief Eigenvalues and eigenfunctions of  -u'' + gamma(gamma+1)/r^2 u = lambda u
 *        on [a, b] by closed-form Bessel shooting.
 *
 * With nu = |gamma + 1/2| the solutions are sqrt(r) Z_nu(k r):
 *   lambda = k^2 > 0   Z in {J_nu, Y_nu}
 *   lambda = -k^2 < 0  Z in {I_nu, K_nu}   (evaluated exponentially scaled)
 *   lambda = 0         r^{gamma+1}, r^{-gamma}  (r^{1/2}, r^{1/2} log r at gamma = -1/2)
 * At a = 0 a single branch sqrt(r) J_{+-(gamma+1/2)} replaces the left cap.
 *
 * Eigenvalues are roots of the 2x2 boundary determinant, found by a sign scan in
 * k = sqrt(|lambda|) (geometric ladder near 0, then uniform steps) and refined by
 * bisection. The number of non-positive eigenvalues is known exactly from the
 * Pruefer angle of the closed-form lambda = 0 solution, and the index of every
 * positive root is confirmed by counting the interior zeros of its eigenfunction.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "conespec/bessel.hpp"
#include "conespec/channel_model.hpp"
#include "conespec/errors.hpp"
#include "conespec/quadrature.hpp"

namespace conespec {

/// Solution selected at the singular endpoint r = 0.
struct BranchSelection {
    enum class Choice { Minimal, RMinusGamma };
    Choice choice = Choice::Minimal;

    static BranchSelection minimal() { return {Choice::Minimal}; }
    static BranchSelection r_minus_gamma() { return {Choice::RMinusGamma}; }

    [[nodiscard]] std::string label() const { return choice == Choice::Minimal ? "minimal" : "r_minus_gamma"; }
};

using LeftCondition = std::variant<CapCondition, BranchSelection>;

struct RadialProblem {
    double gamma = 0.0;
    double a = 0.0;
    double b = 1.0;
    LeftCondition left = CapCondition::dirichlet();
    CapCondition right = CapCondition::dirichlet();
    int count = 5;

    [[nodiscard]] double potential_coeff() const { return gamma * (gamma + 1.0); }
    [[nodiscard]] double nu() const { return std::abs(gamma + 0.5); }
    [[nodiscard]] bool singular() const { return a == 0.0; }

    /// Exponent e of the branch r^e kept at r = 0 (singular problems only).
    [[nodiscard]] double branch_exponent() const {
        const auto& br = std::get<BranchSelection>(left);
        if (br.choice == BranchSelection::Choice::RMinusGamma) return -gamma;
        return std::max(gamma + 1.0, -gamma);
    }

    /// Bessel order of the branch function sqrt(r) J_order(k r) (singular problems only).
    [[nodiscard]] double branch_order() const { return branch_exponent() - 0.5; }

    void validate() const {
        if (!std::isfinite(gamma)) throw InputError("radial problem: gamma must be finite");
        if (nu() > bessel::kMaxOrder - 1.0) throw InputError("radial problem: |gamma + 1/2| exceeds 50");
        if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) throw InputError("radial problem: need 0 <= a < b");
        if (count < 1) throw InputError("radial problem: count must be positive");
        if (a == 0.0) {
            if (!std::holds_alternative<BranchSelection>(left)) {
                throw InputError("radial problem: a = 0 requires a branch selection on the left");
            }
            const auto& br = std::get<BranchSelection>(left);
            if (br.choice == BranchSelection::Choice::RMinusGamma && !(std::abs(gamma) < 0.5 && !is_half(gamma))) {
                throw InputError("radial problem: r_minus_gamma branch requires |gamma| < 1/2");
            }
        } else if (!std::holds_alternative<CapCondition>(left)) {
            throw InputError("radial problem: a > 0 requires a cap condition on the left");
        }
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "gamma=" << gamma << " on [" << a << ", " << b << "], left=";
        if (const auto* c = std::get_if<CapCondition>(&left)) os << c->label();
        else os << std::get<BranchSelection>(left).label();
        os << ", right=" << right.label();
        return os.str();
    }
};

/// Cylinder functions used by the solver; replaceable for fault-injection tests.
struct BesselEvaluator {
    std::function<double(double, double)> j = [](double nu, double x) { return bessel::cyl_j(nu, x); };
    std::function<double(double, double)> y = [](double nu, double x) { return bessel::cyl_y(nu, x); };
    std::function<double(double, double)> i_scaled = [](double nu, double x) { return bessel::cyl_i_scaled(nu, x); };
    std::function<double(double, double)> k_scaled = [](double nu, double x) { return bessel::cyl_k_scaled(nu, x); };

    static const BesselEvaluator& standard() {
        static const BesselEvaluator ev;
        return ev;
    }
};

struct ShootOptions {
    const BesselEvaluator* bessel = nullptr;   // nullptr = standard evaluator
};

/**
 * One eigenpair. The eigenfunction is
 *   u(r) = scale * sqrt(r) * (c1 F1(k r) + c2 F2(k r))
 * with (F1, F2) = (J_o1, Y_nu) for lambda > 0 and
 * (F1, F2) = (e^{k(r-b)} I~_o1, e^{-k(r-a)} K~_nu) for lambda < 0 (scaled
 * functions I~ = e^{-x} I, K~ = e^{x} K), or the harmonic pair for lambda = 0.
 * `scale` normalizes the L^2 norm on [a, b] to one.
 */
struct RadialMode {
    enum class Kind { Negative, Zero, Positive };

    double lambda = 0.0;
    Kind kind = Kind::Positive;
    double gamma = 0.0, a = 0.0, b = 1.0;
    double k = 0.0;
    double order1 = 0.0;   // order of F1 (J or I); negative for the r^{-gamma} branch
    double order2 = 0.0;   // order of F2 (Y or K)
    double c1 = 0.0, c2 = 0.0;
    // lambda = 0: u = x1 (r/a)^{p1} + x2 (r/a)^{p2}, or e^{s/2}(x1 + x2 s) with s = log(r/a) at gamma = -1/2,
    // or r^{p1} when a = 0
    double p1 = 0.0, p2 = 0.0;
    bool log_pair = false;
    double scale = 1.0;
    const BesselEvaluator* bessel = &BesselEvaluator::standard();

    /// Unnormalized eigenfunction.
    [[nodiscard]] double raw(double r) const {
        switch (kind) {
            case Kind::Positive: {
                const double x = k * r;
                double v = c1 * bessel->j(order1, x);
                if (c2 != 0.0) v += c2 * bessel->y(order2, x);
                return std::sqrt(r) * v;
            }
            case Kind::Negative: {
                const double x = k * r;
                double v = 0.0;
                if (c1 != 0.0) v += c1 * bessel->i_scaled(order1, x) * std::exp(k * (r - b));
                if (c2 != 0.0) v += c2 * bessel->k_scaled(order2, x) * std::exp(-k * (r - a));
                return std::sqrt(r) * v;
            }
            case Kind::Zero: {
                if (a == 0.0) return std::pow(r, p1);
                const double s = std::log(r / a);
                if (log_pair) return std::exp(0.5 * s) * (c1 + c2 * s);
                // scale by the larger exponential at b to stay finite
                const double sb = std::log(b / a);
                const double m = std::max(p1 * sb, p2 * sb);
                return c1 * std::exp(p1 * s - m) + c2 * std::exp(p2 * s - m);
            }
        }
        return 0.0;
    }

    /// L^2-normalized eigenfunction value.
    [[nodiscard]] double value(double r) const { return scale * raw(r); }

    /// Coefficient of r^{-1/2} in the normalized eigenfunction near r = 0 for the
    /// gamma = 1/2 channel (the r^{-1/2} part of sqrt(r) Y_1(k r) is -2/(pi k)).
    [[nodiscard]] double half_coefficient() const {
        if (kind != Kind::Positive || !is_half(gamma) || gamma < 0) return 0.0;
        return -2.0 / (std::numbers::pi * k) * c2 * scale;
    }
};

namespace detail {

/// Robin parameter used by the boundary functional r u' - kappa u; nullopt = Dirichlet.
inline std::optional<double> functional_kappa(const CapCondition& c) { return c.robin_kappa(); }

/// Boundary functional of sqrt(r) J_o(k r) at x = k r, divided by sqrt(r).
inline double functional_j(const BesselEvaluator& ev, std::optional<double> kappa, double o, double x) {
    if (!kappa) return ev.j(o, x);
    const double c = 0.5 - *kappa;
    return (c + o) * ev.j(o, x) - x * ev.j(o + 1.0, x);
}

inline double functional_y(const BesselEvaluator& ev, std::optional<double> kappa, double nu, double x) {
    if (!kappa) return ev.y(nu, x);
    const double c = 0.5 - *kappa;
    return (c - nu) * ev.y(nu, x) + x * ev.y(nu - 1.0, x);
}

inline double functional_i(const BesselEvaluator& ev, std::optional<double> kappa, double o, double x) {
    if (!kappa) return ev.i_scaled(o, x);
    const double c = 0.5 - *kappa;
    return (c + o) * ev.i_scaled(o, x) + x * ev.i_scaled(o + 1.0, x);
}

inline double functional_k(const BesselEvaluator& ev, std::optional<double> kappa, double nu, double x) {
    if (!kappa) return ev.k_scaled(nu, x);
    const double c = 0.5 - *kappa;
    return (c - nu) * ev.k_scaled(nu, x) - x * ev.k_scaled(nu - 1.0, x);
}

/// Boundary functionals of the two basis functions at one endpoint.
struct EndValues {
    double f1 = 0.0, f2 = 0.0;
};

class Shooter {
public:
    Shooter(const RadialProblem& p, const BesselEvaluator& ev) : p_(p), ev_(ev) {
        nu_ = p.nu();
        if (p.singular()) {
            order1_ = p.branch_order();
        } else {
            order1_ = nu_;
            kappa_a_ = functional_kappa(std::get<CapCondition>(p.left));
        }
        kappa_b_ = functional_kappa(p.right);
    }

    [[nodiscard]] double order1() const { return order1_; }
    [[nodiscard]] double order2() const { return nu_; }

    EndValues left_positive(double k) const {
        const double x = k * p_.a;
        return {functional_j(ev_, kappa_a_, order1_, x), functional_y(ev_, kappa_a_, nu_, x)};
    }
    EndValues right_positive(double k) const {
        const double x = k * p_.b;
        EndValues e{functional_j(ev_, kappa_b_, order1_, x), 0.0};
        if (!p_.singular()) e.f2 = functional_y(ev_, kappa_b_, nu_, x);
        return e;
    }
    EndValues left_negative(double k) const {
        const double x = k * p_.a;
        return {functional_i(ev_, kappa_a_, order1_, x), functional_k(ev_, kappa_a_, nu_, x)};
    }
    EndValues right_negative(double k) const {
        const double x = k * p_.b;
        EndValues e{functional_i(ev_, kappa_b_, order1_, x), 0.0};
        if (!p_.singular()) e.f2 = functional_k(ev_, kappa_b_, nu_, x);
        return e;
    }

    /// Normalized boundary determinant for lambda = k^2 > 0.
    double det_positive(double k) const {
        const EndValues r = right_positive(k);
        if (p_.singular()) return check(r.f1 / (1.0 + std::abs(r.f1)) * 1.0, k);
        const EndValues l = left_positive(k);
        const double d = l.f1 * r.f2 - l.f2 * r.f1;
        return check(d / (std::hypot(l.f1, l.f2) * std::hypot(r.f1, r.f2)), k);
    }

    /// Normalized boundary determinant for lambda = -k^2 < 0 (scaled, sign-correct).
    double det_negative(double k) const {
        const EndValues r = right_negative(k);
        if (p_.singular()) return check(r.f1 / (1.0 + std::abs(r.f1)), k);
        const EndValues l = left_negative(k);
        const double damp = std::exp(-2.0 * k * (p_.b - p_.a));
        const double d = damp * l.f1 * r.f2 - l.f2 * r.f1;
        const double n = (std::abs(l.f2) + damp * std::abs(l.f1)) * (std::abs(r.f1) + std::abs(r.f2));
        return check(d / n, k);
    }

    const RadialProblem& problem() const { return p_; }
    const BesselEvaluator& evaluator() const { return ev_; }
    std::optional<double> kappa_a() const { return kappa_a_; }
    std::optional<double> kappa_b() const { return kappa_b_; }

private:
    double check(double v, double k) const {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os.precision(17);
            os << "shooting: boundary determinant not finite at k=" << k
               << " (dynamic range exceeded) for " << p_.describe();
            throw SolverError(os.str());
        }
        return v;
    }

    const RadialProblem& p_;
    const BesselEvaluator& ev_;
    double nu_ = 0.0;
    double order1_ = 0.0;
    std::optional<double> kappa_a_;
    std::optional<double> kappa_b_;
};

/// Closed-form lambda = 0 analysis.
struct ZeroAnalysis {
    int below = 0;          // number of eigenvalues < 0
    bool zero_is_eigen = false;
    RadialMode mode;        // the left-admissible harmonic solution (raw, unnormalized)
};

inline ZeroAnalysis analyze_zero(const RadialProblem& p) {
    ZeroAnalysis out;
    RadialMode& m = out.mode;
    m.kind = RadialMode::Kind::Zero;
    m.lambda = 0.0;
    m.gamma = p.gamma;
    m.a = p.a;
    m.b = p.b;
    int zeros = 0;
    double u = 0.0, v = 0.0;   // (u(b), b u'(b)) up to a positive factor
    if (p.singular()) {
        m.p1 = p.branch_exponent();
        u = 1.0;
        v = m.p1;
    } else {
        const auto ka = std::get<CapCondition>(p.left).robin_kappa();
        const double sb = std::log(p.b / p.a);
        if (is_half(p.gamma) && p.gamma < 0) {
            m.log_pair = true;
            double A = 0.0, B = 1.0;
            if (ka) {
                A = 1.0;
                B = *ka - 0.5;
            }
            m.c1 = A;
            m.c2 = B;
            if (B != 0.0) {
                const double s = -A / B;
                if (s > 0.0 && s < sb) zeros = 1;
            }
            u = A + B * sb;
            v = 0.5 * u + B;
        } else {
            m.p1 = p.gamma + 1.0;
            m.p2 = -p.gamma;
            double x1 = 1.0, x2 = -1.0;
            if (ka) {
                x1 = *ka - m.p2;
                x2 = m.p1 - *ka;
            }
            m.c1 = x1;
            m.c2 = x2;
            if (x1 != 0.0 && x2 != 0.0 && -x2 / x1 > 0.0) {
                const double s = std::log(-x2 / x1) / (m.p1 - m.p2);
                if (s > 0.0 && s < sb) zeros = 1;
            }
            const double mx = std::max(m.p1 * sb, m.p2 * sb);
            const double e1 = std::exp(m.p1 * sb - mx), e2 = std::exp(m.p2 * sb - mx);
            u = x1 * e1 + x2 * e2;
            v = m.p1 * x1 * e1 + m.p2 * x2 * e2;
        }
    }
    // Pruefer angle at b in the (u, b u') plane, folded into (0, pi].
    double phi = std::atan2(u, v);
    if (phi <= 0.0) phi += std::numbers::pi;
    const auto kb = p.right.robin_kappa();
    const double beta = kb ? std::atan2(1.0, *kb) : std::numbers::pi;
    double residual, size;
    if (kb) {
        residual = v - *kb * u;
        size = std::abs(v) + std::abs(*kb * u);
    } else {
        residual = u;
        size = std::abs(u) + std::abs(v);
    }
    out.zero_is_eigen = std::abs(residual) <= 1e-12 * size;
    out.below = zeros + ((!out.zero_is_eigen && phi > beta) ? 1 : 0);
    return out;
}

/// Bisection on a sign change of f over [lo, hi] to relative width ~1e-15.
template <class F>
double bisect(F&& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || (hi - lo) <= 4e-16 * hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Sample radii strictly inside (lo, b): geometric near lo and b, uniform at `step`.
inline std::vector<double> sample_points(double lo, double b, double step, double ratio = 1.02) {
    std::vector<double> pts;
    const double len = b - lo;
    const double first = lo > 0.0 ? lo : 1e-10 * b;
    for (double r = first * (1.0 + 1e-9) ; r < b; r *= ratio) {
        if (r > lo) pts.push_back(r);
        if (pts.size() > 200000) break;
    }
    for (int j = 1; j < 60; ++j) {
        const double d = len * std::ldexp(1.0, -j);
        if (d < 1e-14 * b) break;
        pts.push_back(b - d);
        if (lo > 0.0) pts.push_back(lo + d);
    }
    if (step > 0.0) {
        const auto n = static_cast<long>(std::min(len / step, 2e5));
        for (long i = 1; i < n; ++i) pts.push_back(lo + len * static_cast<double>(i) / static_cast<double>(n));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::erase_if(pts, [&](double r) { return !(r > lo && r < b); });
    return pts;
}

inline int count_sign_changes(const RadialMode& m, const std::vector<double>& pts) {
    int changes = 0;
    int last = 0;
    for (double r : pts) {
        const double v = m.raw(r);
        if (v == 0.0 || !std::isfinite(v)) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Panel edges for integrating the eigenfunction: geometric in r plus resolution of the oscillation scale.
inline std::vector<double> panel_edges(double lo, double b, double width) {
    std::vector<double> e;
    e.push_back(lo);
    for (double r = lo * 1.5; lo > 0.0 && r < b; r *= 1.5) e.push_back(r);
    const double len = b - lo;
    for (int j = 1; j < 50; ++j) {
        const double d = len * std::ldexp(1.0, -j);
        if (d < 1e-13 * b) break;
        e.push_back(b - d);
        e.push_back(lo + d);
    }
    if (width > 0.0) {
        const auto n = static_cast<long>(std::min(std::ceil(len / width), 1e5));
        for (long i = 1; i < n; ++i) e.push_back(lo + len * static_cast<double>(i) / static_cast<double>(n));
    }
    e.push_back(b);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    std::erase_if(e, [&](double r) { return r < lo || r > b; });
    return e;
}

/// Sets mode.scale so that the L^2 norm on [a, b] is one.
inline void normalize(RadialMode& m) {
    static const quad::Rule rule = quad::gauss_legendre(12);
    double lo = m.a;
    double tail = 0.0;
    double width = 0.0;
    if (m.kind == RadialMode::Kind::Positive) width = std::numbers::pi / (4.0 * m.k);
    if (m.kind == RadialMode::Kind::Negative) width = 0.5 / m.k;
    if (m.a == 0.0) {
        // near 0 the mode is C r^e with e = order1 + 1/2 (or p1); integrate the tail in closed form
        lo = 1e-7 * m.b;
        const double e = m.kind == RadialMode::Kind::Zero ? m.p1 : m.order1 + 0.5;
        const double u = m.raw(lo);
        tail = u * u * lo / (2.0 * e + 1.0);
    }
    auto edges = panel_edges(lo, m.b, width);
    if (m.a == 0.0) {
        std::vector<double> extra;
        for (double r = lo * 2.0; r < m.b; r *= 2.0) extra.push_back(r);
        edges.insert(edges.end(), extra.begin(), extra.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    const double n2 = tail + quad::integrate_panels(rule, edges, [&](double r) {
        const double v = m.raw(r);
        return v * v;
    });
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw SolverError("shooting: eigenfunction norm is not positive and finite");
    m.scale = 1.0 / std::sqrt(n2);
}

}  // namespace detail

/**
 * The first `count` eigenpairs (ascending), non-positive ones included.
 * Throws SolverError when the scan limit is exhausted or index verification fails.
 */
inline std::vector<RadialMode> shoot_modes(const RadialProblem& p, const ShootOptions& opt = {}) {
    p.validate();
    const BesselEvaluator& ev = opt.bessel ? *opt.bessel : BesselEvaluator::standard();
    detail::Shooter sh(p, ev);
    const detail::ZeroAnalysis za = detail::analyze_zero(p);
    const double L = p.b - p.a;

    std::vector<RadialMode> modes;

    auto positive_mode = [&](double k) {
        RadialMode m;
        m.kind = RadialMode::Kind::Positive;
        m.lambda = k * k;
        m.k = k;
        m.gamma = p.gamma;
        m.a = p.a;
        m.b = p.b;
        m.order1 = sh.order1();
        m.order2 = sh.order2();
        m.bessel = &ev;
        if (p.singular()) {
            m.c1 = 1.0;
            m.c2 = 0.0;
        } else {
            const auto l = sh.left_positive(k);
            const double n = std::hypot(l.f1, l.f2);
            m.c1 = l.f2 / n;
            m.c2 = -l.f1 / n;
        }
        return m;
    };
    auto negative_mode = [&](double k) {
        RadialMode m;
        m.kind = RadialMode::Kind::Negative;
        m.lambda = -k * k;
        m.k = k;
        m.gamma = p.gamma;
        m.a = p.a;
        m.b = p.b;
        m.order1 = sh.order1();
        m.order2 = sh.order2();
        m.bessel = &ev;
        if (p.singular()) {
            m.c1 = 1.0;
            m.c2 = 0.0;
        } else {
            const auto l = sh.left_negative(k);
            const double damp = std::exp(-k * (p.b - p.a));
            m.c1 = l.f2;
            m.c2 = -l.f1 * damp;
            const double n = std::abs(m.c1) + std::abs(m.c2);
            m.c1 /= n;
            m.c2 /= n;
        }
        return m;
    };

    // Negative eigenvalues: geometric scan in k with an expanding upper bound.
    if (za.below > 0) {
        double kappa_scale = 1.0 + p.nu();
        if (sh.kappa_a()) kappa_scale = std::max(kappa_scale, std::abs(*sh.kappa_a()) + 1.0);
        if (sh.kappa_b()) kappa_scale = std::max(kappa_scale, std::abs(*sh.kappa_b()) + 1.0);
        const double k_top = 4.0 * kappa_scale / (p.a > 0.0 ? p.a : p.b) + 4.0 / L;
        std::vector<double> found;
        for (double ratio = 1.05; ratio > 1.0 + 1e-7; ratio = 1.0 + (ratio - 1.0) / 8.0) {
            found.clear();
            auto f = [&](double k) { return sh.det_negative(k); };
            double k0 = 1e-9 / p.b;
            double f0 = f(k0);
            for (double k = k0 * ratio; k0 < k_top && static_cast<int>(found.size()) < za.below; k *= ratio) {
                const double fk = f(k);
                if ((fk < 0.0) != (f0 < 0.0) || fk == 0.0) found.push_back(detail::bisect(f, k0, k, f0));
                k0 = k;
                f0 = fk;
            }
            if (static_cast<int>(found.size()) == za.below) break;
        }
        if (static_cast<int>(found.size()) != za.below) {
            throw SolverError("shooting: could not bracket all " + std::to_string(za.below) +
                              " negative eigenvalues for " + p.describe());
        }
        std::sort(found.begin(), found.end(), std::greater<>());
        for (double k : found) modes.push_back(negative_mode(k));
    }
    if (za.zero_is_eigen) {
        RadialMode m = za.mode;
        m.bessel = &ev;
        modes.push_back(m);
    }

    const int nonpositive = static_cast<int>(modes.size());
    const int wanted = p.count - nonpositive;
    if (wanted > 0) {
        const double nu = p.nu();
        const double k_limit = 16.0 * (nu + 2.0 + std::numbers::pi * (p.count + 2)) / L;
        double step = std::numbers::pi / (8.0 * L);
        double k_start = 1e-8 / p.b;
        bool ok = false;
        std::string failure;
        for (int attempt = 0; attempt < 6 && !ok; ++attempt) {
            std::vector<double> roots;
            auto f = [&](double k) { return sh.det_positive(k); };
            double k0 = k_start;
            double f0 = f(k0);
            auto advance = [&](double k) {
                const double fk = f(k);
                if (fk == 0.0) {
                    roots.push_back(k);
                } else if ((fk < 0.0) != (f0 < 0.0) && f0 != 0.0) {
                    roots.push_back(detail::bisect(f, k0, k, f0));
                }
                k0 = k;
                f0 = fk;
            };
            for (double k = k0 * 2.0; k < step && static_cast<int>(roots.size()) < wanted; k *= 2.0) advance(k);
            double k = std::max(step, k0);
            while (static_cast<int>(roots.size()) < wanted) {
                k += step;
                if (k > k_limit) break;
                advance(k);
            }
            if (static_cast<int>(roots.size()) < wanted) {
                std::ostringstream os;
                os.precision(6);
                os << "shooting: root bracket exhausted, scanned k in [" << k_start << ", " << k_limit
                   << "] (lambda up to " << k_limit * k_limit << ") and found " << roots.size() << " of "
                   << wanted << " roots for " << p.describe();
                throw SolverError(os.str());
            }
            // Confirm indices by counting eigenfunction zeros.
            ok = true;
            std::vector<RadialMode> pos;
            for (std::size_t j = 0; j < roots.size(); ++j) {
                RadialMode m = positive_mode(roots[j]);
                const auto pts = detail::sample_points(p.a, p.b, std::numbers::pi / (16.0 * roots[j]));
                const int zeros = detail::count_sign_changes(m, pts);
                if (zeros != nonpositive + static_cast<int>(j)) {
                    ok = false;
                    std::ostringstream os;
                    os.precision(12);
                    os << "shooting: eigenfunction " << nonpositive + j << " at lambda=" << m.lambda << " has "
                       << zeros << " interior zeros for " << p.describe();
                    failure = os.str();
                    break;
                }
                pos.push_back(m);
            }
            if (ok) {
                modes.insert(modes.end(), pos.begin(), pos.end());
            } else {
                step *= 0.5;
                k_start *= 1e-4;
            }
        }
        if (!ok) throw SolverError(failure);
    }
    if (static_cast<int>(modes.size()) > p.count) modes.resize(static_cast<std::size_t>(p.count));
    for (auto& m : modes) detail::normalize(m);
    return modes;
}

/// The first `count` eigenvalues (ascending) by Bessel shooting.
inline std::vector<double> shoot_eigenvalues(const RadialProblem& p, const ShootOptions& opt = {}) {
    std::vector<double> out;
    for (const auto& m : shoot_modes(p, opt)) out.push_back(m.lambda);
    return out;
}

}  // namespace conespec

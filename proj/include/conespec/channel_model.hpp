/**
 * @file channel_model.hpp
 * @brief Scalar radial channels, cap conditions, the desk-scale geometry and
 *        the per-channel extension data (T-scalar, W, kernel dimensions).
 *
 * Each eigenvalue gamma of A yields the radial operator
 *     -u'' + gamma (gamma + 1) / r^2 u
 * whose harmonic solutions are r^{gamma+1} and r^{-gamma}. The non-conical
 * interiors of the two glued pieces are replaced by cap conditions at r = 1
 * (piece M1) and at the inner radius (piece M2).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "conespec/cross_section.hpp"
#include "conespec/errors.hpp"

namespace conespec {

/// Endpoint condition at radius a: Dirichlet u(a) = 0, Neumann u'(a) = 0, or
/// Robin u'(a) - (kappa / a) u(a) = 0.
struct CapCondition {
    enum class Kind { Dirichlet, Neumann, Robin };
    Kind kind = Kind::Dirichlet;
    double kappa = 0.0;

    static CapCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }
    static CapCondition neumann() { return {Kind::Neumann, 0.0}; }
    static CapCondition robin(double kappa) { return {Kind::Robin, kappa}; }

    /// Robin parameter kappa in u' = (kappa/a) u; Neumann is kappa = 0.
    [[nodiscard]] std::optional<double> robin_kappa() const {
        if (kind == Kind::Dirichlet) return std::nullopt;
        return kind == Kind::Neumann ? 0.0 : kappa;
    }

    [[nodiscard]] std::string label() const {
        switch (kind) {
            case Kind::Dirichlet: return "dirichlet";
            case Kind::Neumann: return "neumann";
            case Kind::Robin: {
                std::ostringstream os;
                os.precision(17);
                os << "robin(" << kappa << ')';
                return os.str();
            }
        }
        return "?";
    }

    friend bool operator==(const CapCondition& a, const CapCondition& b) {
        return a.kind == b.kind && (a.kind != Kind::Robin || a.kappa == b.kappa);
    }
};

/// One scalar radial channel.
struct Channel {
    double gamma = 0.0;
    long mult = 1;
    double potential_coeff = 0.0;                // gamma (gamma + 1)
    std::pair<double, double> branch_exponents;  // (gamma + 1, -gamma)
    std::vector<AOrigin> origins;

    [[nodiscard]] std::string label() const {
        std::ostringstream os;
        os.precision(17);
        os << "gamma=" << gamma;
        return os.str();
    }
};

inline Channel make_channel(double gamma, long mult, std::vector<AOrigin> origins = {}) {
    if (mult < 1) throw InputError("channel multiplicity must be positive");
    if (!std::isfinite(gamma)) throw InputError("channel gamma must be finite");
    return Channel{gamma, mult, gamma * (gamma + 1.0), {gamma + 1.0, -gamma}, std::move(origins)};
}

/// One channel per distinct gamma, multiplicities carried over, sorted by gamma.
inline std::vector<Channel> make_channels(std::vector<ASpectrumEntry> spectrum) {
    if (spectrum.empty()) throw InputError("make_channels: empty A-spectrum");
    std::stable_sort(spectrum.begin(), spectrum.end(),
                     [](const ASpectrumEntry& a, const ASpectrumEntry& b) { return a.gamma < b.gamma; });
    std::vector<Channel> out;
    for (const auto& e : spectrum) {
        if (!out.empty() && same_gamma(out.back().gamma, e.gamma)) {
            out.back().mult += e.mult;
            out.back().origins.insert(out.back().origins.end(), e.origins.begin(), e.origins.end());
            continue;
        }
        out.push_back(make_channel(e.gamma, e.mult, e.origins));
    }
    return out;
}

/// Cap replacing the global cap_m1 / cap_m2 on the channel with this gamma.
struct CapOverride {
    double gamma = 0.0;
    CapCondition cap;
};

struct Geometry {
    std::vector<Channel> channels;
    double r0 = 0.5;
    CapCondition cap_m2 = CapCondition::dirichlet();   // at r = eps r0 (or r0 on the model M2)
    CapCondition cap_m1 = CapCondition::dirichlet();   // at r = 1
    std::vector<CapOverride> cap_m2_overrides;
    std::vector<CapOverride> cap_m1_overrides;

    [[nodiscard]] CapCondition m2_cap(double gamma) const { return pick(cap_m2_overrides, cap_m2, gamma); }
    [[nodiscard]] CapCondition m1_cap(double gamma) const { return pick(cap_m1_overrides, cap_m1, gamma); }

    void validate() const {
        if (channels.empty()) throw InputError("geometry: channel list is empty");
        if (!(r0 > 0.0 && r0 < 1.0)) throw InputError("geometry: r0 must lie in (0, 1)");
        auto check = [&](const std::vector<CapOverride>& ov, const char* what) {
            for (const auto& o : ov) {
                const bool found = std::any_of(channels.begin(), channels.end(),
                                               [&](const Channel& c) { return same_gamma(c.gamma, o.gamma); });
                if (!found) {
                    std::ostringstream os;
                    os << "geometry: " << what << " override for gamma=" << o.gamma << " matches no channel";
                    throw InputError(os.str());
                }
            }
        };
        check(cap_m2_overrides, "cap_m2");
        check(cap_m1_overrides, "cap_m1");
    }

private:
    static CapCondition pick(const std::vector<CapOverride>& ov, const CapCondition& fallback, double gamma) {
        for (const auto& o : ov) {
            if (same_gamma(o.gamma, gamma)) return o.cap;
        }
        return fallback;
    }
};

/// The T-scalar of one channel: finite, infinite (u(1) = 0) or degenerate.
struct TScalar {
    enum class Kind { Finite, Infinite, Degenerate };
    Kind kind = Kind::Finite;
    double value = 0.0;

    [[nodiscard]] bool is_zero(double tol = 1e-10) const { return kind == Kind::Finite && std::abs(value) <= tol; }

    [[nodiscard]] std::string label() const {
        if (kind == Kind::Infinite) return "inf";
        if (kind == Kind::Degenerate) return "degenerate";
        std::ostringstream os;
        os.precision(17);
        os << value;
        return os.str();
    }
};

/**
 * Solves the channel's harmonic equation on [r0, 1] with @p cap at r0,
 * normalizes u(1) = 1 and returns t = (u' + gamma u)(1).
 *
 * With u = X1 (r/r0)^{gamma+1} + X2 (r/r0)^{-gamma}, the trace operator kills
 * the r^{-gamma} part, so t = (2 gamma + 1) X1 / (X1 + X2 r0^{2 gamma + 1}).
 * At gamma = -1/2 the basis is r^{1/2}, r^{1/2} log r.
 */
inline TScalar t_scalar(const Channel& ch, double r0, const CapCondition& cap) {
    if (!(r0 > 0.0 && r0 < 1.0)) throw InputError("t_scalar: r0 must lie in (0, 1)");
    const double g = ch.gamma;
    const auto kappa = cap.robin_kappa();
    if (std::abs(g + 0.5) <= 1e-12) {
        // u = r^{1/2} (A + B log r); cap at r0 fixes (A, B) up to scale.
        const double l0 = std::log(r0);
        double a, b;
        if (!kappa) {
            b = 1.0;
            a = -l0;
        } else {
            b = *kappa - 0.5;
            a = 1.0 - b * l0;
        }
        if (a == 0.0 && b == 0.0) return {TScalar::Kind::Degenerate, 0.0};
        if (a == 0.0) return {TScalar::Kind::Infinite, std::numeric_limits<double>::infinity()};
        return {TScalar::Kind::Finite, b / a};
    }
    const double p1 = g + 1.0, p2 = -g;
    double x1, x2;
    if (!kappa) {
        x1 = 1.0;
        x2 = -1.0;
    } else {
        x1 = *kappa - p2;
        x2 = p1 - *kappa;
    }
    if (x1 == 0.0 && x2 == 0.0) return {TScalar::Kind::Degenerate, 0.0};
    const double den = x1 + x2 * std::pow(r0, p1 - p2);
    if (den == 0.0) return {TScalar::Kind::Infinite, std::numeric_limits<double>::infinity()};
    return {TScalar::Kind::Finite, (p1 - p2) * x1 / den};
}

/// Per-channel outcome of the extension analysis.
struct ChannelDecision {
    double gamma = 0.0;
    long mult = 0;
    TScalar t;
    bool in_w = false;            // |gamma| < 1/2 and t = 0
    double limit_exponent = 0.0;  // exponent of the harmonic branch kept in the limit
    bool limit_kernel = false;    // r^{limit_exponent} satisfies the M1 cap at r = 1
};

struct WDecision {
    std::vector<ChannelDecision> channels;   // sorted by gamma
    std::vector<double> w_members;
    long dim_ker_D2 = 0;
    long i_half = 0;
    long dim_ker_limit = 0;

    [[nodiscard]] long zero_mult() const { return dim_ker_limit + dim_ker_D2 + i_half; }

    [[nodiscard]] bool in_w(double gamma) const {
        return std::any_of(w_members.begin(), w_members.end(), [&](double g) { return same_gamma(g, gamma); });
    }
};

/// |gamma| = 1/2 up to the merge tolerance.
inline bool is_half(double gamma) { return std::abs(std::abs(gamma) - 0.5) <= 1e-12; }

/**
 * Limit branch rule: for |gamma| < 1/2 the r^{-gamma} branch if gamma is in W
 * and r^{gamma+1} otherwise; for |gamma| >= 1/2 the branch with exponent >= 1/2.
 */
inline double limit_branch_exponent(double gamma, bool in_w) {
    if (std::abs(gamma) < 0.5 && !is_half(gamma)) return in_w ? -gamma : gamma + 1.0;
    return std::max(gamma + 1.0, -gamma);
}

inline WDecision compute_w_decision(const Geometry& geom) {
    geom.validate();
    WDecision w;
    for (const auto& ch : geom.channels) {
        ChannelDecision d;
        d.gamma = ch.gamma;
        d.mult = ch.mult;
        d.t = t_scalar(ch, geom.r0, geom.m2_cap(ch.gamma));
        const bool small = std::abs(ch.gamma) < 0.5 && !is_half(ch.gamma);
        d.in_w = small && d.t.is_zero();
        if (d.in_w) w.w_members.push_back(ch.gamma);
        if (d.t.is_zero()) {
            if (is_half(ch.gamma) && ch.gamma > 0) w.i_half += ch.mult;
            else if (ch.gamma > 0.5) w.dim_ker_D2 += ch.mult;
        }
        d.limit_exponent = limit_branch_exponent(ch.gamma, d.in_w);
        const auto kappa = geom.m1_cap(ch.gamma).robin_kappa();
        d.limit_kernel = kappa && std::abs(*kappa - d.limit_exponent) <= 1e-12;
        if (d.limit_kernel) w.dim_ker_limit += ch.mult;
        w.channels.push_back(d);
    }
    return w;
}

}  // namespace conespec

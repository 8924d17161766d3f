/**
 * @file cross_section.hpp
 * @brief Spectral data of the cross-section (Sigma, h) and the spectrum of
 *        the cone boundary operator A built from it.
 *
 * The spectrum of A is assembled from the Betti numbers of Sigma and the
 * eigenvalues mu^2 of the Hodge Laplacian on coexact p-forms:
 *
 *     +-(p - n/2)                                with multiplicity b_p(Sigma)
 *     +-1/2 +- sqrt(mu^2 + ((n-1)/2 - p)^2)      with multiplicity mult(p, mu^2)
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conespec/config.hpp"
#include "conespec/errors.hpp"

namespace conespec {

/// One eigenvalue of the Hodge Laplacian on coexact p-forms of Sigma.
struct CoexactMode {
    int p = 0;
    double mu_sq = 0.0;
    long mult = 1;
};

struct CrossSectionSpectrum {
    int n = 2;
    std::vector<long> betti;                  // b_0 .. b_n
    std::vector<CoexactMode> coexact_modes;   // sorted by (p, mu_sq)
    double cutoff = 5.0;                      // keep |gamma| <= cutoff
};

/// Where an eigenvalue of A comes from.
struct AOrigin {
    enum class Kind { Harmonic, Coexact };
    Kind kind = Kind::Harmonic;
    int p = 0;
    int sign = 1;          // Harmonic: gamma = sign * (p - n/2)
    double mu_sq = 0.0;    // Coexact only
    int s1 = 1;            // Coexact: gamma = s1/2 + s2 * sqrt(mu^2 + ((n-1)/2 - p)^2)
    int s2 = 1;

    [[nodiscard]] std::string label() const {
        std::ostringstream os;
        if (kind == Kind::Harmonic) {
            os << "Harmonic(" << p << ',' << (sign > 0 ? '+' : '-') << ')';
        } else {
            os << "Coexact(" << p << ',' << mu_sq << ',' << (s1 > 0 ? '+' : '-')
               << (s2 > 0 ? '+' : '-') << ')';
        }
        return os.str();
    }
};

struct ASpectrumEntry {
    double gamma = 0.0;
    long mult = 0;
    std::vector<AOrigin> origins;
};

/// Two gamma values are identified iff they agree to 1e-12 relative.
inline bool same_gamma(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

namespace detail {

inline bool same_mu_sq(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

/// Sorts modes by (p, mu_sq) and merges duplicates by adding multiplicities.
inline std::vector<CoexactMode> merge_modes(std::vector<CoexactMode> modes) {
    std::sort(modes.begin(), modes.end(), [](const CoexactMode& a, const CoexactMode& b) {
        return a.p != b.p ? a.p < b.p : a.mu_sq < b.mu_sq;
    });
    std::vector<CoexactMode> out;
    for (const auto& m : modes) {
        if (!out.empty() && out.back().p == m.p && same_mu_sq(out.back().mu_sq, m.mu_sq)) {
            out.back().mult += m.mult;
        } else {
            out.push_back(m);
        }
    }
    return out;
}

/// Largest mu^2 of a degree-p mode that can still produce some |gamma| <= cutoff.
inline double mu_sq_bound(int n, int p, double cutoff) {
    const double shift = 0.5 * (n - 1) - p;
    return (cutoff + 0.5) * (cutoff + 0.5) - shift * shift;
}

}  // namespace detail

/// Throws InputError unless @p cs satisfies the structural invariants.
inline void validate(const CrossSectionSpectrum& cs) {
    if (cs.n < 2) {
        throw InputError("cross-section dimension n = " + std::to_string(cs.n) +
                         " is not allowed: the cone construction requires n >= 2");
    }
    if (cs.betti.size() != static_cast<std::size_t>(cs.n + 1)) {
        throw InputError("betti must list n+1 = " + std::to_string(cs.n + 1) + " entries");
    }
    for (int p = 0; p <= cs.n; ++p) {
        if (cs.betti[p] < 0) throw InputError("betti[" + std::to_string(p) + "] is negative");
        if (cs.betti[p] != cs.betti[cs.n - p]) {
            throw InputError("betti violates Poincare duality: betti[" + std::to_string(p) +
                             "] != betti[" + std::to_string(cs.n - p) + "]");
        }
    }
    if (!(cs.cutoff > 0.0) || !std::isfinite(cs.cutoff)) throw InputError("cutoff must be positive");
    for (const auto& m : cs.coexact_modes) {
        if (m.p < 0 || m.p >= cs.n) {
            throw InputError("coexact mode degree p = " + std::to_string(m.p) + " outside 0..n-1");
        }
        if (!(m.mu_sq > 0.0) || !std::isfinite(m.mu_sq)) {
            throw InputError("coexact eigenvalue mu_sq must be positive (harmonic content belongs in betti)");
        }
        if (m.mult <= 0) throw InputError("coexact mode multiplicity must be positive");
    }
}

/// Returns @p cs with modes sorted, merged and validated.
inline CrossSectionSpectrum normalized(CrossSectionSpectrum cs) {
    cs.coexact_modes = detail::merge_modes(std::move(cs.coexact_modes));
    validate(cs);
    return cs;
}

/**
 * Spectrum of A as a sorted list of (gamma, multiplicity, origins).
 *
 * Coincident values are merged (multiplicities added, origins concatenated).
 * The result is symmetric under gamma -> -gamma.
 */
inline std::vector<ASpectrumEntry> build_a_spectrum(const CrossSectionSpectrum& input) {
    const CrossSectionSpectrum cs = normalized(input);
    const double half_n = 0.5 * cs.n;
    std::vector<ASpectrumEntry> raw;

    auto emit = [&](double gamma, long mult, const AOrigin& origin) {
        if (std::abs(gamma) > cs.cutoff) return;
        raw.push_back(ASpectrumEntry{gamma, mult, {origin}});
    };

    for (int p = 0; p <= cs.n; ++p) {
        if (cs.betti[p] == 0) continue;
        const double g = p - half_n;
        AOrigin o;
        o.kind = AOrigin::Kind::Harmonic;
        o.p = p;
        o.sign = 1;
        emit(g, cs.betti[p], o);
        o.sign = -1;
        emit(-g, cs.betti[p], o);
    }
    for (const auto& m : cs.coexact_modes) {
        const double shift = 0.5 * (cs.n - 1) - m.p;
        const double s = std::sqrt(m.mu_sq + shift * shift);
        const double outer = 0.5 + s;
        const double inner = 0.5 - s;
        AOrigin o;
        o.kind = AOrigin::Kind::Coexact;
        o.p = m.p;
        o.mu_sq = m.mu_sq;
        o.s1 = 1, o.s2 = 1;
        emit(outer, m.mult, o);
        o.s1 = -1, o.s2 = -1;
        emit(-outer, m.mult, o);
        o.s1 = 1, o.s2 = -1;
        emit(inner, m.mult, o);
        o.s1 = -1, o.s2 = 1;
        emit(-inner, m.mult, o);
    }

    std::stable_sort(raw.begin(), raw.end(),
                     [](const ASpectrumEntry& a, const ASpectrumEntry& b) { return a.gamma < b.gamma; });

    std::vector<ASpectrumEntry> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        std::size_t j = i + 1;
        while (j < raw.size() && same_gamma(raw[i].gamma, raw[j].gamma)) ++j;
        ASpectrumEntry merged;
        // Representative: smallest |gamma| in the cluster, 0 if it straddles zero.
        double rep = raw[i].gamma;
        bool neg = false, pos = false;
        for (std::size_t k = i; k < j; ++k) {
            if (std::abs(raw[k].gamma) < std::abs(rep)) rep = raw[k].gamma;
            neg = neg || raw[k].gamma < 0.0;
            pos = pos || raw[k].gamma > 0.0;
            merged.mult += raw[k].mult;
            merged.origins.insert(merged.origins.end(), raw[k].origins.begin(), raw[k].origins.end());
        }
        merged.gamma = (neg && pos) ? 0.0 : rep;
        if (merged.gamma == 0.0) merged.gamma = 0.0;   // normalize -0
        out.push_back(std::move(merged));
        i = j;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace detail {

/// Unit circle: b = [1, 1], coexact 0-forms k^2 with multiplicity 2.
inline CrossSectionSpectrum circle_raw(double mu_sq_max) {
    CrossSectionSpectrum cs;
    cs.n = 1;
    cs.betti = {1, 1};
    for (long k = 1; static_cast<double>(k * k) <= mu_sq_max; ++k) {
        cs.coexact_modes.push_back({0, static_cast<double>(k * k), 2});
    }
    return cs;
}

/**
 * Unit round 2-sphere: coexact 0-forms k(k+1) with multiplicity 2k+1 and,
 * by Hodge duality (coexact p <-> coexact n-1-p), the same list in degree 1.
 */
inline CrossSectionSpectrum sphere2_raw(double mu_sq_max) {
    CrossSectionSpectrum cs;
    cs.n = 2;
    cs.betti = {1, 0, 1};
    for (long k = 1; static_cast<double>(k * (k + 1)) <= mu_sq_max; ++k) {
        const double ev = static_cast<double>(k * (k + 1));
        cs.coexact_modes.push_back({0, ev, 2 * k + 1});
        cs.coexact_modes.push_back({1, ev, 2 * k + 1});
    }
    cs.coexact_modes = merge_modes(std::move(cs.coexact_modes));
    return cs;
}

inline long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/**
 * Flat torus R^n / (side Z)^n. Mode k in the dual lattice contributes
 * C(n-1, p) coexact p-forms with eigenvalue |2 pi k / side|^2.
 */
inline CrossSectionSpectrum torus_raw(int n, double side, double mu_sq_max) {
    CrossSectionSpectrum cs;
    cs.n = n;
    cs.betti.resize(n + 1);
    for (int p = 0; p <= n; ++p) cs.betti[p] = binomial(n, p);
    const double unit = (2.0 * std::numbers::pi / side) * (2.0 * std::numbers::pi / side);
    const long kmax = static_cast<long>(std::floor(std::sqrt(mu_sq_max / unit)));
    // Count lattice points by |k|^2.
    std::map<long, long> shells;
    std::vector<long> k(n, -kmax);
    while (true) {
        long norm = 0;
        for (long c : k) norm += c * c;
        if (norm > 0 && static_cast<double>(norm) * unit <= mu_sq_max) ++shells[norm];
        int d = 0;
        while (d < n && ++k[d] > kmax) k[d++] = -kmax;
        if (d == n) break;
    }
    for (const auto& [norm, count] : shells) {
        for (int p = 0; p < n; ++p) {
            cs.coexact_modes.push_back({p, static_cast<double>(norm) * unit, count * binomial(n - 1, p)});
        }
    }
    cs.coexact_modes = merge_modes(std::move(cs.coexact_modes));
    return cs;
}

/// Total p-form spectrum: degree -> (eigenvalue -> multiplicity), eigenvalue 0 = harmonic.
using FormSpectrum = std::vector<std::map<double, long>>;

inline void add_eigen(std::map<double, long>& shell, double ev, long mult) {
    for (auto& [key, m] : shell) {
        if (same_mu_sq(key, ev)) {
            m += mult;
            return;
        }
    }
    shell[ev] += mult;
}

inline FormSpectrum total_spectrum(const CrossSectionSpectrum& cs) {
    FormSpectrum tot(cs.n + 1);
    for (int p = 0; p <= cs.n; ++p) {
        if (cs.betti[p] > 0) tot[p][0.0] += cs.betti[p];
    }
    for (const auto& m : cs.coexact_modes) {
        add_eigen(tot[m.p], m.mu_sq, m.mult);       // coexact p-forms
        add_eigen(tot[m.p + 1], m.mu_sq, m.mult);   // exact (p+1)-forms d(...)
    }
    return tot;
}

/// Recovers coexact multiplicities from total ones: coexact_p = total_p - coexact_{p-1}.
inline std::vector<CoexactMode> coexact_from_total(const FormSpectrum& tot, int n, double mu_sq_max) {
    std::vector<CoexactMode> out;
    std::map<double, long> prev;   // coexact_{p-1}
    for (int p = 0; p < n; ++p) {
        std::map<double, long> cur;
        for (const auto& [ev, m] : tot[p]) {
            if (ev == 0.0 || ev > mu_sq_max * (1 + 1e-12)) continue;
            long exact = 0;
            for (const auto& [ev2, m2] : prev) {
                if (same_mu_sq(ev, ev2)) exact = m2;
            }
            const long co = m - exact;
            if (co < 0) throw InputError("inconsistent form spectrum in product construction");
            if (co > 0) cur[ev] = co;
        }
        for (const auto& [ev, m] : cur) out.push_back({p, ev, m});
        prev = std::move(cur);
    }
    return merge_modes(std::move(out));
}

}  // namespace detail

/**
 * Riemannian product of two cross-sections (Kunneth for spectra).
 * Eigenforms of the product are wedge products of factor eigenforms, so total
 * multiplicities convolve; coexact ones are then recovered degree by degree.
 * Both inputs must carry every mode with mu^2 <= @p mu_sq_max.
 */
inline CrossSectionSpectrum product(const CrossSectionSpectrum& a, const CrossSectionSpectrum& b,
                                    double mu_sq_max) {
    const int n = a.n + b.n;
    const auto ta = detail::total_spectrum(a);
    const auto tb = detail::total_spectrum(b);
    detail::FormSpectrum tot(n + 1);
    for (int i = 0; i <= a.n; ++i) {
        for (int j = 0; j <= b.n; ++j) {
            for (const auto& [x, mx] : ta[i]) {
                for (const auto& [y, my] : tb[j]) {
                    if (x + y > mu_sq_max * (1 + 1e-12)) continue;
                    detail::add_eigen(tot[i + j], x + y, mx * my);
                }
            }
        }
    }
    CrossSectionSpectrum cs;
    cs.n = n;
    cs.betti.assign(n + 1, 0);
    for (int p = 0; p <= n; ++p) {
        auto it = tot[p].find(0.0);
        cs.betti[p] = it == tot[p].end() ? 0 : it->second;
    }
    cs.coexact_modes = detail::coexact_from_total(tot, n, mu_sq_max);
    cs.cutoff = std::min(a.cutoff, b.cutoff);
    return cs;
}

/// @p copies disjoint copies of @p cs: Betti numbers and multiplicities scale.
inline CrossSectionSpectrum disjoint_union(CrossSectionSpectrum cs, long copies) {
    if (copies < 1) throw InputError("disjoint_union needs at least one copy");
    for (auto& b : cs.betti) b *= copies;
    for (auto& m : cs.coexact_modes) m.mult *= copies;
    return cs;
}

inline CrossSectionSpectrum parse_cross_section(const config::Document& doc, const config::Section& sec);

/**
 * Catalog of cross-sections with validated spectra.
 *
 *   circle                      S^1 (rejected: n = 1)
 *   flat_torus     [n, side?]   R^n / (side Z)^n, side defaults to 2 pi
 *   round_sphere   [n]          unit S^n; only n = 2 is shipped
 *   product_spheres [a, b]      S^a x S^b with a, b in {1, 2}
 *   disjoint_union [copies, n]  copies of the unit S^n
 *
 * custom_file is handled by load_cross_section_file().
 */
inline CrossSectionSpectrum catalog_lookup(std::string_view name, std::span<const double> params,
                                           double cutoff) {
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (params.size() < lo || params.size() > hi) {
            throw InputError("catalog entry '" + std::string(name) + "' expects " + std::to_string(lo) +
                             (lo == hi ? "" : ".." + std::to_string(hi)) + " parameters");
        }
    };
    auto as_int = [&](double v) {
        if (std::floor(v) != v) throw InputError("catalog entry '" + std::string(name) + "': integer parameter expected");
        return static_cast<int>(v);
    };
    auto sphere = [&](int n, double mu_max) {
        if (n == 1) return detail::circle_raw(mu_max);
        if (n == 2) return detail::sphere2_raw(mu_max);
        throw InputError("round_sphere: coexact p-form spectra for n = " + std::to_string(n) +
                         " are not in the validated catalog (only n = 2 is shipped); use custom_file");
    };
    const double mu_max = (cutoff + 0.5) * (cutoff + 0.5);

    CrossSectionSpectrum cs;
    if (name == "circle") {
        need(0, 0);
        cs = detail::circle_raw(mu_max);
    } else if (name == "flat_torus") {
        need(1, 2);
        const int n = as_int(params[0]);
        const double side = params.size() > 1 ? params[1] : 2.0 * std::numbers::pi;
        if (n < 1 || n > 6) throw InputError("flat_torus: dimension must be in 1..6");
        if (!(side > 0.0)) throw InputError("flat_torus: side must be positive");
        cs = detail::torus_raw(n, side, mu_max);
    } else if (name == "round_sphere") {
        need(1, 1);
        cs = sphere(as_int(params[0]), mu_max);
    } else if (name == "product_spheres") {
        need(2, 2);
        const int a = as_int(params[0]), b = as_int(params[1]);
        if (a < 1 || a > 2 || b < 1 || b > 2) {
            throw InputError("product_spheres: factor dimensions must be 1 or 2");
        }
        cs = product(sphere(a, mu_max), sphere(b, mu_max), mu_max);
    } else if (name == "disjoint_union") {
        need(2, 2);
        cs = disjoint_union(sphere(as_int(params[1]), mu_max), as_int(params[0]));
    } else if (name == "custom_file") {
        throw InputError("custom_file entries are loaded with load_cross_section_file(path)");
    } else {
        throw InputError("unknown catalog key '" + std::string(name) + "'");
    }
    cs.cutoff = cutoff;
    std::erase_if(cs.coexact_modes, [&](const CoexactMode& m) {
        return m.mu_sq > detail::mu_sq_bound(cs.n, m.p, cutoff) * (1 + 1e-12);
    });
    return normalized(std::move(cs));
}

/**
 * Reads n, betti, coexact_modes = [(p, mu_sq, mult), ...] and cutoff from a
 * section. Unknown keys are rejected.
 */
inline CrossSectionSpectrum parse_cross_section(const config::Document& doc, const config::Section& sec) {
    config::require_known_keys(doc, sec, {"n", "betti", "coexact_modes", "cutoff"});
    config::Reader rd(doc, sec);
    CrossSectionSpectrum cs;
    cs.n = static_cast<int>(rd.integer("n"));
    cs.betti = rd.integers("betti");
    cs.cutoff = rd.number("cutoff");
    if (rd.has("coexact_modes")) {
        const auto& v = rd.entry("coexact_modes").value;
        if (!v.is_sequence()) rd.fail(v, "coexact_modes", "expected a list of (p, mu_sq, mult)");
        for (const auto& item : v.items) {
            if (!item.is_sequence() || item.items.size() != 3) {
                rd.fail(item, "coexact_modes", "each mode must be a tuple (p, mu_sq, mult)");
            }
            CoexactMode m;
            m.p = static_cast<int>(rd.as_integer(item.items[0], "coexact_modes"));
            m.mu_sq = rd.as_number(item.items[1], "coexact_modes");
            m.mult = rd.as_integer(item.items[2], "coexact_modes");
            cs.coexact_modes.push_back(m);
        }
    }
    try {
        return normalized(std::move(cs));
    } catch (const InputError& e) {
        throw InputError(config::where(doc.source, sec.line, "", e.what()));
    }
}

/// Loads a custom cross-section file (top-level keys or a [cross_section] section).
inline CrossSectionSpectrum load_cross_section_file(const std::string& path) {
    const auto doc = config::parse_file(path);
    if (const auto* s = doc.find("cross_section")) return parse_cross_section(doc, *s);
    const auto* root = doc.find("");
    if (doc.sections.size() > 1) {
        throw InputError(path + ": unexpected section [" + doc.sections[1].name + "] in cross-section file");
    }
    return parse_cross_section(doc, *root);
}

}  // namespace conespec

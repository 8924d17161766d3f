/**
 * @file topology.hpp
 * @brief Integer cohomology bookkeeping for M = M1 ∪_Σ M2: L^2-cohomology of
 *        the cone completion of M2, Mayer–Vietoris consistency, intersection
 *        cohomology of the cone-singular M1, and small-eigenvalue predictions
 *        for product gluings.
 *
 * All inputs are Betti numbers (real coefficients); nothing is computed from
 * triangulations.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conespec/config.hpp"
#include "conespec/errors.hpp"

namespace conespec::topology {

using Betti = std::vector<long>;

struct CohomologyInput {
    std::string name;
    int m = 0;                           // dim M = n + 1
    Betti betti_M1, betti_M2, betti_Sigma, betti_M;   // lengths m+1, m+1, m, m+1
    Betti relative_betti_M2;             // H^k(M2, Σ), length m+1
    std::optional<long> image_rank_mid;  // rank H^{m/2}(M2, Σ) -> H^{m/2}(M2), needed when n is odd

    [[nodiscard]] int n() const { return m - 1; }

    void validate() const {
        if (m < 1) throw InputError("cohomology input: dimension m must be positive");
        auto check = [&](const Betti& b, std::size_t len, const char* what) {
            if (b.size() != len) {
                throw InputError(std::string("cohomology input: ") + what + " must have " + std::to_string(len) +
                                 " entries");
            }
            for (long v : b) {
                if (v < 0) throw InputError(std::string("cohomology input: negative entry in ") + what);
            }
        };
        const auto len = static_cast<std::size_t>(m) + 1;
        check(betti_M1, len, "betti_M1");
        check(betti_M2, len, "betti_M2");
        check(betti_Sigma, len - 1, "betti_Sigma");
        check(betti_M, len, "betti_M");
        check(relative_betti_M2, len, "relative_betti_M2");
        if (image_rank_mid && *image_rank_mid < 0) throw InputError("cohomology input: negative image_rank_mid");
    }
};

/**
 * dim of L^2-harmonic k-forms on the cone completion of M2:
 *   H^k(M2, Σ) for k < (n+1)/2,
 *   Im(H^k(M2, Σ) -> H^k(M2)) for k = (n+1)/2 (n odd),
 *   H^k(M2) for k > (n+1)/2.
 */
inline long l2_cohomology(const CohomologyInput& inp, int k) {
    inp.validate();
    if (k < 0 || k > inp.m) throw InputError("l2_cohomology: degree out of range");
    const int twice = 2 * k;
    if (twice < inp.m) return inp.relative_betti_M2[static_cast<std::size_t>(k)];
    if (twice > inp.m) return inp.betti_M2[static_cast<std::size_t>(k)];
    if (!inp.image_rank_mid) {
        throw InputError("l2_cohomology: image_rank_mid is required in the middle degree (" + inp.name + ")");
    }
    return *inp.image_rank_mid;
}

struct ExactnessIssue {
    std::string sequence;   // "mayer-vietoris" or "pair"
    std::string term;       // e.g. "H^2(Sigma)"
    std::string message;
};

struct MvReport {
    bool consistent = true;
    long euler_M = 0, euler_M1 = 0, euler_M2 = 0, euler_Sigma = 0;
    std::vector<ExactnessIssue> issues;
    std::optional<long> derived_image_rank_mid;   // forced by exactness of the pair sequence
};

namespace detail {

inline long euler(const Betti& b) {
    long s = 0;
    for (std::size_t i = 0; i < b.size(); ++i) s += (i % 2 == 0 ? 1 : -1) * b[i];
    return s;
}

/// Walks a long exact sequence 0 -> d_0 -> d_1 -> ... -> d_L -> 0. The ranks
/// r_i of the outgoing maps are forced: r_i = d_i - r_{i-1}. Returns the ranks
/// and reports terms where a rank would be negative or the sequence does not close.
inline std::vector<long> walk(const std::vector<std::pair<std::string, long>>& terms, const std::string& seq,
                              std::vector<ExactnessIssue>& issues) {
    std::vector<long> ranks;
    long prev = 0;
    for (const auto& [label, d] : terms) {
        const long r = d - prev;
        if (r < 0) {
            issues.push_back({seq, label, "image of the incoming map (" + std::to_string(prev) +
                                              ") exceeds the dimension " + std::to_string(d)});
        }
        ranks.push_back(r);
        prev = std::max(0L, r);
    }
    if (!terms.empty() && ranks.back() != 0) {
        issues.push_back({seq, terms.back().first,
                          "sequence does not close: last map would have rank " + std::to_string(ranks.back())});
    }
    return ranks;
}

inline std::string h(int k, const char* space) { return "H^" + std::to_string(k) + "(" + space + ")"; }

}  // namespace detail

/**
 * Checks that the Betti numbers admit exact sequences:
 *   Mayer–Vietoris  ... -> H^k(M) -> H^k(M1) ⊕ H^k(M2) -> H^k(Σ) -> H^{k+1}(M) -> ...
 *   pair (M2, Σ)    ... -> H^k(M2, Σ) -> H^k(M2) -> H^k(Σ) -> H^{k+1}(M2, Σ) -> ...
 * In a finite exact sequence of vector spaces the rank of every map is forced
 * by the dimensions, so a violation is reported at the first impossible term.
 * The pair sequence also fixes the rank of H^{m/2}(M2, Σ) -> H^{m/2}(M2), which
 * must equal image_rank_mid when given.
 */
inline MvReport mv_check(const CohomologyInput& inp) {
    inp.validate();
    MvReport rep;
    rep.euler_M = detail::euler(inp.betti_M);
    rep.euler_M1 = detail::euler(inp.betti_M1);
    rep.euler_M2 = detail::euler(inp.betti_M2);
    rep.euler_Sigma = detail::euler(inp.betti_Sigma);
    const int m = inp.m;
    auto at = [](const Betti& b, int k) { return k < static_cast<int>(b.size()) ? b[static_cast<std::size_t>(k)] : 0L; };

    std::vector<std::pair<std::string, long>> mv;
    for (int k = 0; k <= m; ++k) {
        mv.emplace_back(detail::h(k, "M"), at(inp.betti_M, k));
        mv.emplace_back(detail::h(k, "M1") + "+" + detail::h(k, "M2"), at(inp.betti_M1, k) + at(inp.betti_M2, k));
        mv.emplace_back(detail::h(k, "Sigma"), at(inp.betti_Sigma, k));
    }
    detail::walk(mv, "mayer-vietoris", rep.issues);

    std::vector<std::pair<std::string, long>> pair;
    for (int k = 0; k <= m; ++k) {
        pair.emplace_back(detail::h(k, "M2,Sigma"), at(inp.relative_betti_M2, k));
        pair.emplace_back(detail::h(k, "M2"), at(inp.betti_M2, k));
        pair.emplace_back(detail::h(k, "Sigma"), at(inp.betti_Sigma, k));
    }
    const auto ranks = detail::walk(pair, "pair", rep.issues);
    if (m % 2 == 0) {
        const long forced = ranks[static_cast<std::size_t>(3 * (m / 2))];
        rep.derived_image_rank_mid = forced;
        if (inp.image_rank_mid && *inp.image_rank_mid != forced) {
            rep.issues.push_back({"pair", detail::h(m / 2, "M2,Sigma") + "->" + detail::h(m / 2, "M2"),
                                  "image_rank_mid = " + std::to_string(*inp.image_rank_mid) +
                                      " but exactness forces " + std::to_string(forced)});
        }
    }
    rep.consistent = rep.issues.empty();
    return rep;
}

/// Intersection cohomology IH^p of the cone-singular M1, or a note when unavailable.
struct IhValue {
    std::optional<long> value;
    std::string note;
};

/**
 * IH^p = H^p(M1) for p <= n/2 and H^p_c(M1) = H^p(M1, Σ) ≅ H_{m-p}(M1) for
 * p >= n/2 + 1. The identification with the kernel of the Laplacian needs
 * H^{n/2}(Σ) = 0 (n even); for n odd the degree p = (n+1)/2 lies in neither range.
 */
inline IhValue intersection_cohomology(const CohomologyInput& inp, int p) {
    inp.validate();
    if (p < 0 || p > inp.m) throw InputError("intersection_cohomology: degree out of range");
    const int n = inp.n();
    if (n % 2 == 0 && inp.betti_Sigma[static_cast<std::size_t>(n / 2)] != 0) {
        return {std::nullopt, "identification unavailable: H^{n/2}(Sigma) != 0"};
    }
    if (2 * p <= n) return {inp.betti_M1[static_cast<std::size_t>(p)], "H^p(M1)"};
    if (2 * p >= n + 2) return {inp.betti_M1[static_cast<std::size_t>(inp.m - p)], "H^p_c(M1)"};
    return {std::nullopt, "identification unavailable: degree (n+1)/2 is not covered"};
}

// ---------------------------------------------------------------------------
// Betti helpers

inline Betti sphere(int k) {
    if (k < 0) throw InputError("sphere: negative dimension");
    if (k == 0) return {2};
    Betti b(static_cast<std::size_t>(k) + 1, 0);
    b.front() = 1;
    b.back() = 1;
    return b;
}

inline Betti point() { return {1}; }

/// Künneth formula over a field.
inline Betti product(const Betti& a, const Betti& b) {
    Betti out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

inline Betti disjoint(const Betti& a, const Betti& b) {
    Betti out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

inline Betti copies(const Betti& a, long c) {
    Betti out = a;
    for (auto& v : out) v *= c;
    return out;
}

inline Betti padded(Betti b, std::size_t len) {
    if (b.size() > len) {
        for (std::size_t i = len; i < b.size(); ++i) {
            if (b[i] != 0) throw InputError("padded: nonzero Betti number above the dimension");
        }
    }
    b.resize(len, 0);
    return b;
}

/// Lefschetz duality for a compact orientable m-manifold with boundary: H^k(X, ∂X) ≅ H_{m-k}(X).
inline Betti lefschetz_relative(const Betti& bx, int m) {
    const Betti b = padded(bx, static_cast<std::size_t>(m) + 1);
    Betti out(b.size());
    for (int k = 0; k <= m; ++k) out[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(m - k)];
    return out;
}

/// Completes an input from M1, M2, Σ, M Betti numbers (relative groups by Lefschetz duality,
/// middle image rank forced by exactness).
inline CohomologyInput assemble(std::string name, int m, const Betti& m1, const Betti& m2, const Betti& sigma,
                                const Betti& whole) {
    CohomologyInput in;
    in.name = std::move(name);
    in.m = m;
    const auto len = static_cast<std::size_t>(m) + 1;
    in.betti_M1 = padded(m1, len);
    in.betti_M2 = padded(m2, len);
    in.betti_Sigma = padded(sigma, len - 1);
    in.betti_M = padded(whole, len);
    in.relative_betti_M2 = lefschetz_relative(in.betti_M2, m);
    if (m % 2 == 0) in.image_rank_mid = mv_check(in).derived_image_rank_mid;
    return in;
}

/// S^m = (D^{n1+1} x S^{n2}) ∪ (S^{n1} x D^{n2+1}), m = n1 + n2 + 1.
inline CohomologyInput sphere_decomposition(int n1, int n2) {
    if (n1 < 0 || n2 < 0 || n1 + n2 < 1) throw InputError("sphere_decomposition: need n1, n2 >= 0, n1 + n2 >= 1");
    const int m = n1 + n2 + 1;
    return assemble("sphere_" + std::to_string(n1) + "_" + std::to_string(n2), m, sphere(n2), sphere(n1),
                    product(sphere(n1), sphere(n2)), sphere(m));
}

/// S^{n1} x S^{n2+1} = (S^{n1} x [0,1] x S^{n2}) ∪ ((S^{n1} ⊔ S^{n1}) x D^{n2+1}).
inline CohomologyInput product_sphere_decomposition(int n1, int n2) {
    if (n1 < 1 || n2 < 0) throw InputError("product_sphere_decomposition: need n1 >= 1, n2 >= 0");
    const int m = n1 + n2 + 1;
    const Betti two = copies(sphere(n1), 2);
    return assemble("product_" + std::to_string(n1) + "_" + std::to_string(n2 + 1), m,
                    product(sphere(n1), sphere(n2)), two, product(two, sphere(n2)),
                    product(sphere(n1), sphere(n2 + 1)));
}

/// L-fold connected sum of S^k x S^l = (S^{k-1} x (S^{l+1} minus L+1 disks)) ∪ (D^k x ⊔_{L+1} S^l).
inline CohomologyInput connected_sum_decomposition(int k, int l, long L) {
    if (k < 1 || l < 1 || L < 1) throw InputError("connected_sum_decomposition: need k, l, L >= 1");
    const int m = k + l;
    Betti punctured(static_cast<std::size_t>(l) + 1, 0);   // wedge of L copies of S^l
    punctured.front() = 1;
    punctured.back() += L;
    Betti whole(static_cast<std::size_t>(m) + 1, 0);
    whole.front() = 1;
    whole.back() = 1;
    whole[static_cast<std::size_t>(k)] += L;
    whole[static_cast<std::size_t>(l)] += L;
    const Betti spheres = copies(sphere(l), L + 1);
    return assemble("connected_sum_" + std::to_string(k) + "_" + std::to_string(l) + "_" + std::to_string(L), m,
                    product(sphere(k - 1), punctured), spheres, product(sphere(k - 1), spheres), whole);
}

// ---------------------------------------------------------------------------
// Small-eigenvalue predictions

struct Target {
    std::string manifold;            // e.g. "S^5", "S^3xS^2"
    bool predicted = false;          // dim H^{n2}(M) < dim H^{n2}(Σ2)
    std::vector<int> coexact_degrees;
    std::vector<int> exact_degrees;
};

struct Prediction {
    int n1 = 0, n2 = 0, n = 0, m = 0;
    double gamma = 0.0;               // n2 - n/2
    bool in_open_band = false;        // |gamma| < 1/2
    bool boundary_case = false;       // |gamma| = 1/2
    std::string domain;               // "w" (gamma = 0), "minimal" (gamma < 0)
    std::vector<Target> targets;
};

/**
 * Gluing M1 = W1 x Σ2 and M2 = Σ1 x W2 with dim Wi = ni + 1: the volume form
 * of Σ2 is the A-eigenvector with gamma = n2 - n/2. It lies in the minimal
 * domain when gamma < 0 and in the W-domain for gamma = 0, and yields a small
 * eigenvalue on coexact n2-forms whenever dim H^{n2}(M) < dim H^{n2}(Σ2).
 * The same eigenvalue appears on exact (n2+1)-forms (apply d) and, by Hodge
 * duality, on exact (m - n2)-forms and coexact (m - n2 - 1)-forms. Targets:
 *   W1 = D^{n1+1},         W2 = D^{n2+1}:  M = S^m;
 *   W1 = S^{n1} x [0, 1],  W2 = D^{n2+1}:  M = S^{n1} x S^{n2+1}  (n2 < n1).
 */
inline Prediction predict_small_eigenvalues(int n1, int n2) {
    if (n2 < 0 || n2 > n1 || n1 + n2 < 2) {
        throw InputError("predict_small_eigenvalues: need 0 <= n2 <= n1 and n1 + n2 >= 2");
    }
    Prediction p;
    p.n1 = n1;
    p.n2 = n2;
    p.n = n1 + n2;
    p.m = p.n + 1;
    p.gamma = n2 - 0.5 * p.n;
    p.in_open_band = std::abs(p.gamma) < 0.5;
    p.boundary_case = std::abs(std::abs(p.gamma) - 0.5) < 1e-12;
    p.domain = p.gamma == 0.0 ? "w" : "minimal";
    const long sigma2 = sphere(n2)[static_cast<std::size_t>(n2)];
    auto make = [&](std::string name, const Betti& whole) {
        Target t;
        t.manifold = std::move(name);
        const long hm = static_cast<std::size_t>(n2) < whole.size() ? whole[static_cast<std::size_t>(n2)] : 0;
        t.predicted = hm < sigma2;
        if (t.predicted) {
            // the eigenform w (coexact, degree n2), d w (exact, n2 + 1) and their Hodge duals
            t.coexact_degrees = {n2, p.m - n2 - 1};
            t.exact_degrees = {n2 + 1, p.m - n2};
            for (auto* v : {&t.coexact_degrees, &t.exact_degrees}) {
                std::sort(v->begin(), v->end());
                v->erase(std::unique(v->begin(), v->end()), v->end());
            }
        }
        return t;
    };
    p.targets.push_back(make("S^" + std::to_string(p.m), sphere(p.m)));
    if (n2 < n1) {
        p.targets.push_back(make("S^" + std::to_string(n1) + "xS^" + std::to_string(n2 + 1),
                                 product(sphere(n1), sphere(n2 + 1))));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Catalog files

/**
 * Reads one decomposition: name, m, betti_M1, betti_M2, betti_Sigma, betti_M,
 * relative_betti_M2 and (n odd) image_rank_mid, all at top level.
 */
inline CohomologyInput parse_cohomology(const config::Document& doc) {
    const auto* root = doc.find("");
    if (root == nullptr || doc.sections.size() != 1) {
        throw InputError(doc.source + ": topology files hold top-level keys only");
    }
    config::require_known_keys(doc, *root, {"name", "m", "betti_M1", "betti_M2", "betti_Sigma", "betti_M",
                                            "relative_betti_M2", "image_rank_mid"});
    config::Reader rd(doc, *root);
    CohomologyInput in;
    in.name = rd.word("name");
    in.m = static_cast<int>(rd.integer("m"));
    in.betti_M1 = rd.integers("betti_M1");
    in.betti_M2 = rd.integers("betti_M2");
    in.betti_Sigma = rd.integers("betti_Sigma");
    in.betti_M = rd.integers("betti_M");
    in.relative_betti_M2 = rd.integers("relative_betti_M2");
    if (rd.has("image_rank_mid")) in.image_rank_mid = rd.integer("image_rank_mid");
    try {
        in.validate();
    } catch (const InputError& e) {
        throw InputError(config::where(doc.source, root->line, "", e.what()));
    }
    return in;
}

inline CohomologyInput load_cohomology_file(const std::string& path) {
    return parse_cohomology(config::parse_file(path));
}

}  // namespace conespec::topology

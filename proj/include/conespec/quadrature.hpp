/**
 * @file quadrature.hpp
 * @brief Gauss–Legendre rules and composite integration on panels.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "conespec/errors.hpp"

namespace conespec::quad {

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Builds the n-point rule by Newton iteration on P_n from Chebyshev guesses.
inline Rule gauss_legendre(std::size_t n) {
    if (n == 0) throw InputError("gauss_legendre: need at least one node");
    Rule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

/// Integral of f over [a, b] with the given rule on a single panel.
template <class F>
double integrate(const Rule& rule, double a, double b, F&& f) {
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + hw * rule.nodes[i]);
    return s * hw;
}

/// Composite rule over consecutive panels [edges[i], edges[i+1]].
template <class F>
double integrate_panels(const Rule& rule, const std::vector<double>& edges, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) s += integrate(rule, edges[i], edges[i + 1], f);
    return s;
}

}  // namespace conespec::quad

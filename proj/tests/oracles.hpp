#pragma once

// Test-only numeric oracles, independent of the library's solver code
// paths: objective evaluators written straight from the penalty
// definitions, a coarse-to-fine grid minimizer for short vectors, and a
// subgradient-descent minimizer for longer ones.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

struct ProxTaus {
    double l1 = 0.0;
    double tv = 0.0;
    double group = 0.0;
};

/// (1/2)||u - v||^2 + tau1||u||_1 + tau2 TV(u) + tau3 ||u||_2
inline double prox_objective(const std::vector<double> &u, const std::vector<double> &v,
                             const ProxTaus &taus) {
    double quad = 0.0, l1 = 0.0, tv = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        quad += 0.5 * d * d;
        l1 += std::fabs(u[i]);
        sq += u[i] * u[i];
        if (i + 1 < u.size())
            tv += std::fabs(u[i + 1] - u[i]);
    }
    return quad + taus.l1 * l1 + taus.tv * tv + taus.group * std::sqrt(sq);
}

/// Coarse-to-fine grid search; only practical for v.size() <= 3. Returns
/// the best objective value found.
inline double grid_min_objective(const std::vector<double> &v, const ProxTaus &taus) {
    const std::size_t k = v.size();
    double radius = 1e-3;
    for (const double x : v)
        radius = std::max(radius, std::fabs(x));
    std::vector<double> center(k, 0.0), best(k, 0.0);
    double best_obj = prox_objective(best, v, taus);

    const int points = 21; // per axis, per refinement pass
    double half_span = radius * 1.05;
    for (int pass = 0; pass < 9; ++pass) {
        std::vector<int> idx(k, 0);
        std::vector<double> u(k);
        bool carry = false;
        while (!carry) {
            for (std::size_t i = 0; i < k; ++i)
                u[i] = center[i] + half_span * (2.0 * idx[i] / (points - 1) - 1.0);
            const double obj = prox_objective(u, v, taus);
            if (obj < best_obj) {
                best_obj = obj;
                best = u;
            }
            // odometer increment
            carry = true;
            for (std::size_t i = 0; i < k && carry; ++i) {
                if (++idx[i] < points)
                    carry = false;
                else
                    idx[i] = 0;
            }
        }
        center = best;
        half_span *= 2.5 / (points - 1); // keep a margin beyond one cell
    }
    return best_obj;
}

/// Subgradient descent with diminishing steps, tracking the best iterate.
inline double subgradient_min_objective(const std::vector<double> &v, const ProxTaus &taus,
                                        int iters = 100000) {
    const std::size_t k = v.size();
    std::vector<double> u(k, 0.0), g(k);
    double best_obj = prox_objective(u, v, taus);
    double scale = 1e-3;
    for (const double x : v)
        scale = std::max(scale, std::fabs(x));

    for (int t = 0; t < iters; ++t) {
        double norm_u = 0.0;
        for (const double x : u)
            norm_u += x * x;
        norm_u = std::sqrt(norm_u);
        for (std::size_t i = 0; i < k; ++i) {
            double gi = u[i] - v[i];
            if (u[i] != 0.0)
                gi += taus.l1 * (u[i] > 0 ? 1.0 : -1.0);
            if (norm_u > 0.0)
                gi += taus.group * u[i] / norm_u;
            if (i + 1 < k && u[i + 1] != u[i])
                gi += taus.tv * (u[i] > u[i + 1] ? 1.0 : -1.0);
            if (i > 0 && u[i] != u[i - 1])
                gi += taus.tv * (u[i] > u[i - 1] ? 1.0 : -1.0);
            g[i] = gi;
        }
        const double step = 0.5 * scale / std::sqrt(static_cast<double>(t) + 1.0);
        double gnorm = 0.0;
        for (const double x : g)
            gnorm += x * x;
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-15)
            break;
        for (std::size_t i = 0; i < k; ++i)
            u[i] -= step * g[i] / gnorm;
        const double obj = prox_objective(u, v, taus);
        if (obj < best_obj)
            best_obj = obj;
    }
    return best_obj;
}

/// Routes to the grid for k <= 3, subgradient descent otherwise.
inline double prox_oracle_objective(const std::vector<double> &v, const ProxTaus &taus,
                                    int subgrad_iters = 100000) {
    if (v.size() <= 3)
        return grid_min_objective(v, taus);
    return subgradient_min_objective(v, taus, subgrad_iters);
}

} // namespace oracles

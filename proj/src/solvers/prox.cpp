#include "mtfl/solvers/prox.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>

#include "mtfl/kernels/kernels.hpp"

namespace mtfl::solvers {

void prox_l1(std::span<const double> v, double tau, std::span<double> out) {
    assert(v.size() == out.size());
    assert(tau >= 0.0);
    kernels::soft_threshold(v.data(), tau, out.data(), v.size());
}

// Direct 1D total-variation prox (Condat, 2013). Maintains a tube of
// admissible segment values [vmin, vmax] with dual slacks (umin, umax)
// and flushes a constant segment whenever the tube is violated. Exact in
// a single left-to-right sweep.
void prox_flsa(std::span<const double> v, double tau2, std::span<double> out) {
    assert(v.size() == out.size());
    assert(tau2 >= 0.0);
    const std::size_t width = v.size();
    if (width == 0)
        return;
    if (tau2 == 0.0 || width == 1) {
        for (std::size_t i = 0; i < width; ++i)
            out[i] = v[i];
        return;
    }

    const double lambda = tau2;
    const double two_lambda = 2.0 * lambda;
    const double neg_lambda = -lambda;

    std::size_t k = 0, k0 = 0;       // current sample, start of current segment
    std::size_t kplus = 0, kminus = 0; // last hits of the upper/lower tube wall
    double umin = lambda, umax = neg_lambda;
    double vmin = v[0] - lambda, vmax = v[0] + lambda;

    for (;;) {
        while (k == width - 1) {
            if (umin < 0.0) { // segment must end with a negative jump
                do
                    out[k0++] = vmin;
                while (k0 <= kminus);
                k = kminus = k0;
                vmin = v[k];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if (umax > 0.0) { // segment must end with a positive jump
                do
                    out[k0++] = vmax;
                while (k0 <= kplus);
                k = kplus = k0;
                vmax = v[k];
                umax = neg_lambda;
                umin = vmax + umax - vmin;
            } else { // tube closes: flush the final segment
                vmin += umin / static_cast<double>(k - k0 + 1);
                do
                    out[k0++] = vmin;
                while (k0 <= k);
                return;
            }
        }
        umin += v[k + 1] - vmin;
        if (umin < neg_lambda) { // lower wall pierced: emit segment at vmin
            do
                out[k0++] = vmin;
            while (k0 <= kminus);
            k = kminus = kplus = k0;
            vmin = v[k];
            vmax = vmin + two_lambda;
            umin = lambda;
            umax = neg_lambda;
            continue;
        }
        umax += v[k + 1] - vmax;
        if (umax > lambda) { // upper wall pierced: emit segment at vmax
            do
                out[k0++] = vmax;
            while (k0 <= kplus);
            k = kminus = kplus = k0;
            vmax = v[k];
            vmin = vmax - two_lambda;
            umin = lambda;
            umax = neg_lambda;
            continue;
        }
        ++k;
        if (umin >= lambda) {
            kminus = k;
            vmin += (umin - lambda) / static_cast<double>(k - k0 + 1);
            umin = lambda;
        }
        if (umax <= neg_lambda) {
            kplus = k;
            vmax += (umax + lambda) / static_cast<double>(k - k0 + 1);
            umax = neg_lambda;
        }
    }
}

void prox_group_l2(std::span<const double> v, double tau3, std::span<double> out) {
    assert(v.size() == out.size());
    assert(tau3 >= 0.0);
    const double norm = std::sqrt(kernels::sum_sq(v.data(), v.size()));
    double factor = 0.0;
    if (norm > tau3)
        factor = 1.0 - tau3 / norm;
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = factor * v[i];
}

void prox_fsgl_row(std::span<const double> v, double tau1, double tau2, double tau3,
                   std::span<double> out) {
    assert(v.size() == out.size());
    prox_flsa(v, tau2, out);
    prox_l1(out, tau1, out);
    prox_group_l2(out, tau3, out);
}

} // namespace mtfl::solvers

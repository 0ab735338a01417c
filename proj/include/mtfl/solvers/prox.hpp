#pragma once

#include <span>

namespace mtfl::solvers {

// Proximal operators, each the exact minimizer of
//   (1/2)||u - v||^2 + penalty(u)
// for its penalty. These run on single rows of the weight matrix (one
// feature's per-task profile), so inputs are short dense spans.

/// penalty = tau * ||u||_1 (elementwise soft threshold).
void prox_l1(std::span<const double> v, double tau, std::span<double> out);

/// penalty = tau2 * sum_t |u[t+1] - u[t]| (1D total variation / fused
/// lasso). Exact via Condat's direct taut-string sweep.
void prox_flsa(std::span<const double> v, double tau2, std::span<double> out);

/// penalty = tau3 * ||u||_2 (block soft threshold).
void prox_group_l2(std::span<const double> v, double tau3, std::span<double> out);

/// penalty = tau1*||u||_1 + tau2*TV(u) + tau3*||u||_2. Computed as the
/// composition prox_group_l2 ∘ prox_l1 ∘ prox_flsa, which is exact for
/// this penalty family; the test suite checks it against a numeric
/// minimization oracle rather than taking the decomposition on faith.
void prox_fsgl_row(std::span<const double> v, double tau1, double tau2, double tau3,
                   std::span<double> out);

} // namespace mtfl::solvers

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtfl/core/matrix.hpp"

namespace mtfl::solvers {

enum class Model { ridge, lasso, fsgl };

std::string model_name(Model m);
Model parse_model(const std::string &name);

/// Penalty weights for the three regularizers: lambda1 elementwise
/// sparsity, lambda2 temporal fusion on adjacent task columns, lambda3
/// whole-row (feature) sparsity. Ridge and lasso read lambda1 only.
struct PenaltyConfig {
    Model model = Model::fsgl;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;

    double total() const { return lambda1 + lambda2 + lambda3; }
    void validate() const; // throws ConfigError on negative weights
};

struct SolverOptions {
    double tol = 1e-6;   // relative objective change between accepted iterates
    int max_iter = 10000;
    int power_iters = 50;
    double power_tol = 1e-6;
    bool polish = true;           // lasso-only active-set refinement
    double lipschitz_hint = 0.0;  // reuse a precomputed 2*sigma_max(X^T X); 0 = compute
    const Matrix *warm_start = nullptr;
};

struct SolverReport {
    std::vector<double> objective_trace; // accepted iterates; non-increasing
    std::vector<double> step_trace;      // step size per iteration
    int iterations = 0;
    bool converged = false;
    // Meaning depends on the model: ridge = relative normal-equation
    // residual; lasso = worst subgradient optimality violation; fsgl =
    // scaled proximal-gradient fixed-point residual.
    double kkt_residual = 0.0;
};

struct FitResult {
    Matrix weights; // d x k
    SolverReport report;
};

/// Loss is ||Y - XW||_F^2 with no 1/2 factor; the penalty terms follow
/// the model enum. The fused term sums |W[i][t+1] - W[i][t]| over all
/// rows and adjacent column pairs (forward differences).
double objective_value(const Matrix &x, const Matrix &y, const Matrix &w,
                       const PenaltyConfig &cfg);

/// Penalty-only part of the objective.
double penalty_value(const Matrix &w, const PenaltyConfig &cfg);

/// Eq-form convenience: the full fused-sparse-group objective regardless
/// of cfg.model.
double fsgl_objective(const Matrix &x, const Matrix &y, const Matrix &w,
                      const PenaltyConfig &cfg);

/// Closed-form per-column solve of (X^T X + lambda I) W = X^T Y.
/// The ridge penalty is the squared Frobenius norm.
FitResult fit_ridge(const Matrix &x, const Matrix &y, double lambda);

FitResult fit_lasso(const Matrix &x, const Matrix &y, double lambda1,
                    const SolverOptions &opts = {});

FitResult fit_fsgl(const Matrix &x, const Matrix &y, const PenaltyConfig &cfg,
                   const SolverOptions &opts = {});

/// Dispatch on cfg.model.
FitResult fit(const Matrix &x, const Matrix &y, const PenaltyConfig &cfg,
              const SolverOptions &opts = {});

/// Worst-case violation of the lasso stationarity conditions at W:
/// zero entries need |2(X^T(XW-Y))| <= lambda1, nonzero entries need
/// 2(X^T(XW-Y)) + lambda1*sign(W) = 0.
double lasso_kkt_residual(const Matrix &x, const Matrix &y, const Matrix &w, double lambda1);

} // namespace mtfl::solvers

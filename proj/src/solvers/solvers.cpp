#include "mtfl/solvers/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mtfl/core/error.hpp"
#include "mtfl/core/linalg.hpp"
#include "mtfl/kernels/kernels.hpp"
#include "mtfl/solvers/prox.hpp"

namespace mtfl::solvers {

std::string model_name(Model m) {
    switch (m) {
    case Model::ridge:
        return "ridge";
    case Model::lasso:
        return "lasso";
    case Model::fsgl:
        return "fsgl";
    }
    return "?";
}

Model parse_model(const std::string &name) {
    if (name == "ridge")
        return Model::ridge;
    if (name == "lasso")
        return Model::lasso;
    if (name == "fsgl")
        return Model::fsgl;
    throw ConfigError("unknown model '" + name + "' (expected ridge|lasso|fsgl)");
}

void PenaltyConfig::validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
        throw ConfigError("penalty weights must be non-negative");
}

namespace {

double fused_tv(const Matrix &w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const auto row = w.row(i);
        for (std::size_t t = 0; t + 1 < row.size(); ++t)
            acc += std::fabs(row[t + 1] - row[t]);
    }
    return acc;
}

void check_shapes(const Matrix &x, const Matrix &y, const Matrix &w) {
    if (x.rows() != y.rows() || x.cols() != w.rows() || w.cols() != y.cols())
        throw SolverError("objective: X " + std::to_string(x.rows()) + "x" +
                          std::to_string(x.cols()) + ", Y " + std::to_string(y.rows()) + "x" +
                          std::to_string(y.cols()) + ", W " + std::to_string(w.rows()) + "x" +
                          std::to_string(w.cols()) + " do not agree");
}

} // namespace

double penalty_value(const Matrix &w, const PenaltyConfig &cfg) {
    switch (cfg.model) {
    case Model::ridge:
        return cfg.lambda1 * linalg::frob_sq(w);
    case Model::lasso:
        return cfg.lambda1 * linalg::sum_abs(w);
    case Model::fsgl:
        return cfg.lambda1 * linalg::sum_abs(w) + cfg.lambda2 * fused_tv(w) +
               cfg.lambda3 * linalg::l21_norm(w);
    }
    return 0.0;
}

double objective_value(const Matrix &x, const Matrix &y, const Matrix &w,
                       const PenaltyConfig &cfg) {
    check_shapes(x, y, w);
    Matrix residual = linalg::matmul(x, w);
    kernels::sub(residual.data(), y.data(), residual.data(), residual.size());
    return kernels::sum_sq(residual.data(), residual.size()) + penalty_value(w, cfg);
}

double fsgl_objective(const Matrix &x, const Matrix &y, const Matrix &w,
                      const PenaltyConfig &cfg) {
    PenaltyConfig full = cfg;
    full.model = Model::fsgl;
    return objective_value(x, y, w, full);
}

FitResult fit_ridge(const Matrix &x, const Matrix &y, double lambda) {
    if (lambda < 0.0)
        throw ConfigError("fit_ridge requires lambda >= 0");
    if (x.rows() != y.rows())
        throw SolverError("fit_ridge: X and Y row counts differ");

    const std::size_t d = x.cols();
    Matrix gram = linalg::matmul_tn(x, x);
    for (std::size_t i = 0; i < d; ++i)
        gram(i, i) += lambda;
    Matrix xty = linalg::matmul_tn(x, y);
    Matrix w = linalg::cholesky_solve(gram, xty);

    FitResult result;
    result.report.iterations = 1;
    result.report.converged = true;
    PenaltyConfig cfg{Model::ridge, lambda, 0.0, 0.0};
    result.report.objective_trace.push_back(objective_value(x, y, w, cfg));

    // Residual of the normal equations, relative to the right-hand side.
    Matrix lhs = linalg::matmul(gram, w);
    kernels::sub(lhs.data(), xty.data(), lhs.data(), lhs.size());
    const double rhs_norm = std::sqrt(linalg::frob_sq(xty));
    result.report.kkt_residual = std::sqrt(linalg::frob_sq(lhs)) / (1.0 + rhs_norm);
    result.weights = std::move(w);
    return result;
}

namespace {

// Applies the model's row-wise proximal map for step size eta in place.
void apply_prox(Matrix &w, const PenaltyConfig &cfg, double eta) {
    const std::size_t d = w.rows();
    if (cfg.model == Model::lasso) {
        kernels::soft_threshold(w.data(), eta * cfg.lambda1, w.data(), w.size());
        return;
    }
    // Row order must not matter: rows are independent and each writes
    // only its own storage, so any schedule yields identical bits.
    for (std::size_t i = 0; i < d; ++i) {
        auto row = w.row(i);
        prox_fsgl_row(row, eta * cfg.lambda1, eta * cfg.lambda2, eta * cfg.lambda3, row);
    }
}

struct Fista {
    const Matrix &x;
    const Matrix &y;
    PenaltyConfig cfg;
    SolverOptions opts;

    // workspace, shaped once
    Matrix residual;  // n x k
    Matrix grad;      // d x k
    Matrix trial;     // d x k
    Matrix diff;      // d x k

    Fista(const Matrix &x_, const Matrix &y_, const PenaltyConfig &cfg_,
          const SolverOptions &opts_)
        : x(x_), y(y_), cfg(cfg_), opts(opts_), residual(x_.rows(), y_.cols()),
          grad(x_.cols(), y_.cols()), trial(x_.cols(), y_.cols()), diff(x_.cols(), y_.cols()) {}

    // smooth loss ||Y - XW||_F^2, leaving XW - Y in `residual`
    double smooth_loss(const Matrix &w) {
        kernels::gemm_nn(x.rows(), x.cols(), w.cols(), x.data(), x.cols(), w.data(), w.cols(),
                         0.0, residual.data(), residual.cols());
        kernels::sub(residual.data(), y.data(), residual.data(), residual.size());
        return kernels::sum_sq(residual.data(), residual.size());
    }

    // grad = 2 X^T residual; assumes smooth_loss was just called
    void gradient_from_residual() {
        kernels::gemm_tn(x.cols(), x.rows(), residual.cols(), x.data(), x.cols(), residual.data(),
                         residual.cols(), 0.0, grad.data(), grad.cols());
        kernels::scal(2.0, grad.data(), grad.size());
    }

    FitResult run() {
        cfg.validate();
        if (x.rows() != y.rows())
            throw SolverError("fit: X and Y row counts differ");

        const std::size_t d = x.cols();
        const std::size_t k = y.cols();

        Matrix w(d, k);
        if (opts.warm_start != nullptr) {
            if (opts.warm_start->rows() != d || opts.warm_start->cols() != k)
                throw SolverError("warm start shape mismatch");
            w = *opts.warm_start;
        }

        double lipschitz = opts.lipschitz_hint > 0.0
                               ? opts.lipschitz_hint
                               : 2.0 * linalg::spectral_norm_xtx(x, opts.power_iters,
                                                                 opts.power_tol);
        if (lipschitz <= 0.0)
            lipschitz = 1.0; // degenerate X: any step works on a constant loss
        double eta = 1.0 / lipschitz;
        const double eta_floor = eta * 0x1p-40;

        FitResult out;
        SolverReport &report = out.report;

        double obj_w = smooth_loss(w) + penalty_value(w, cfg);
        report.objective_trace.push_back(obj_w);

        Matrix v = w; // extrapolation point
        double t_momentum = 1.0;

        int iter = 0;
        for (; iter < opts.max_iter; ++iter) {
            const double loss_v = smooth_loss(v);
            gradient_from_residual();

            // prox-gradient step with backtracking on the quadratic bound
            double loss_trial = 0.0;
            for (;;) {
                trial = v;
                kernels::axpy(-eta, grad.data(), trial.data(), trial.size());
                apply_prox(trial, cfg, eta);

                kernels::sub(trial.data(), v.data(), diff.data(), diff.size());
                const double inner = kernels::dot(grad.data(), diff.data(), diff.size());
                const double dist_sq = kernels::sum_sq(diff.data(), diff.size());
                loss_trial = smooth_loss(trial);
                const double bound = loss_v + inner + dist_sq / (2.0 * eta);
                if (loss_trial <= bound + 1e-10 * (1.0 + std::fabs(loss_trial)))
                    break;
                eta *= 0.5;
                if (eta < eta_floor)
                    break; // numerical floor; accept the step as-is
            }
            const double obj_trial = loss_trial + penalty_value(trial, cfg);

            const bool accepted = obj_trial <= obj_w;
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));

            if (accepted) {
                // v = trial + ((t-1)/t_next)(trial - w_prev_accepted)
                v = trial;
                const double beta = (t_momentum - 1.0) / t_next;
                kernels::sub(trial.data(), w.data(), diff.data(), diff.size());
                kernels::axpy(beta, diff.data(), v.data(), v.size());
                w = trial;
                obj_w = obj_trial;
                t_momentum = t_next;
            } else {
                // monotone safeguard: keep w, restart momentum from it
                v = w;
                t_momentum = 1.0;
            }

            report.objective_trace.push_back(obj_w);
            report.step_trace.push_back(eta);

            if (accepted) {
                const auto &trace = report.objective_trace;
                const double prev = trace[trace.size() - 2];
                if (std::fabs(prev - obj_w) <= opts.tol * std::max(1.0, std::fabs(obj_w))) {
                    report.converged = true;
                    ++iter;
                    break;
                }
            }
        }
        report.iterations = iter;

        out.weights = std::move(w);
        finish_report(out, eta);
        return out;
    }

    void finish_report(FitResult &out, double eta) {
        if (cfg.model == Model::lasso) {
            out.report.kkt_residual = lasso_kkt_residual(x, y, out.weights, cfg.lambda1);
            return;
        }
        // Fixed-point residual of the prox-gradient map at the solution.
        smooth_loss(out.weights);
        gradient_from_residual();
        trial = out.weights;
        kernels::axpy(-eta, grad.data(), trial.data(), trial.size());
        apply_prox(trial, cfg, eta);
        kernels::sub(trial.data(), out.weights.data(), diff.data(), diff.size());
        const double wnorm = std::sqrt(linalg::frob_sq(out.weights));
        out.report.kkt_residual = std::sqrt(kernels::sum_sq(diff.data(), diff.size())) /
                                  (eta * (1.0 + wnorm));
    }
};

// Active-set refinement for lasso: on the support found by FISTA the
// objective is smooth, so the exact stationary point solves
//   (X^T X)_SS w_S = (X^T Y)_S - (lambda1/2) * sign(w_S)
// per column. The refit is kept only if it preserves signs and the
// off-support bound; otherwise the FISTA iterate stands.
void polish_lasso(const Matrix &x, const Matrix &y, double lambda1, Matrix &w) {
    const std::size_t d = x.cols();
    const std::size_t k = y.cols();
    Matrix gram = linalg::matmul_tn(x, x);
    Matrix xty = linalg::matmul_tn(x, y);

    std::vector<std::size_t> support;
    std::vector<double> signs;
    for (std::size_t j = 0; j < k; ++j) {
        support.clear();
        signs.clear();
        for (std::size_t i = 0; i < d; ++i)
            if (w(i, j) != 0.0) {
                support.push_back(i);
                signs.push_back(w(i, j) > 0.0 ? 1.0 : -1.0);
            }
        if (support.empty())
            continue;

        const std::size_t s = support.size();
        Matrix sub_gram(s, s);
        std::vector<double> rhs(s);
        for (std::size_t a = 0; a < s; ++a) {
            for (std::size_t b = 0; b < s; ++b)
                sub_gram(a, b) = gram(support[a], support[b]);
            rhs[a] = xty(support[a], j) - 0.5 * lambda1 * signs[a];
        }

        std::vector<double> refit;
        try {
            refit = linalg::cholesky_solve(std::move(sub_gram), rhs);
        } catch (const SolverError &) {
            continue; // singular sub-Gram (e.g. d > n); keep the iterate
        }

        bool sign_ok = true;
        for (std::size_t a = 0; a < s; ++a)
            if (refit[a] == 0.0 || (refit[a] > 0.0) != (signs[a] > 0.0)) {
                sign_ok = false;
                break;
            }
        if (!sign_ok)
            continue;

        // off-support check: |2(X^T(Xw - y))_i| <= lambda1
        std::vector<double> col(d, 0.0);
        for (std::size_t a = 0; a < s; ++a)
            col[support[a]] = refit[a];
        bool bound_ok = true;
        for (std::size_t i = 0; i < d && bound_ok; ++i) {
            if (col[i] != 0.0)
                continue;
            double g = -xty(i, j);
            for (std::size_t a = 0; a < s; ++a)
                g += gram(i, support[a]) * refit[a];
            if (std::fabs(2.0 * g) > lambda1 + 1e-9)
                bound_ok = false;
        }
        if (!bound_ok)
            continue;

        for (std::size_t i = 0; i < d; ++i)
            w(i, j) = col[i];
    }
}

} // namespace

FitResult fit_lasso(const Matrix &x, const Matrix &y, double lambda1, const SolverOptions &opts) {
    if (lambda1 < 0.0)
        throw ConfigError("fit_lasso requires lambda1 >= 0");
    PenaltyConfig cfg{Model::lasso, lambda1, 0.0, 0.0};
    Fista engine(x, y, cfg, opts);
    FitResult result = engine.run();
    if (opts.polish) {
        polish_lasso(x, y, lambda1, result.weights);
        result.report.kkt_residual = lasso_kkt_residual(x, y, result.weights, lambda1);
        const double polished = objective_value(x, y, result.weights, cfg);
        if (!result.report.objective_trace.empty() &&
            polished < result.report.objective_trace.back())
            result.report.objective_trace.push_back(polished);
    }
    return result;
}

FitResult fit_fsgl(const Matrix &x, const Matrix &y, const PenaltyConfig &cfg,
                   const SolverOptions &opts) {
    PenaltyConfig full = cfg;
    full.model = Model::fsgl;
    Fista engine(x, y, full, opts);
    return engine.run();
}

FitResult fit(const Matrix &x, const Matrix &y, const PenaltyConfig &cfg,
              const SolverOptions &opts) {
    switch (cfg.model) {
    case Model::ridge:
        return fit_ridge(x, y, cfg.lambda1);
    case Model::lasso:
        return fit_lasso(x, y, cfg.lambda1, opts);
    case Model::fsgl:
        return fit_fsgl(x, y, cfg, opts);
    }
    throw ConfigError("fit: unknown model");
}

double lasso_kkt_residual(const Matrix &x, const Matrix &y, const Matrix &w, double lambda1) {
    Matrix residual = linalg::matmul(x, w);
    kernels::sub(residual.data(), y.data(), residual.data(), residual.size());
    Matrix grad = linalg::matmul_tn(x, residual);
    kernels::scal(2.0, grad.data(), grad.size());

    double worst = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double g = grad(i, j);
            double violation;
            if (w(i, j) == 0.0)
                violation = std::max(0.0, std::fabs(g) - lambda1);
            else
                violation = std::fabs(g + lambda1 * (w(i, j) > 0.0 ? 1.0 : -1.0));
            worst = std::max(worst, violation);
        }
    return worst;
}

} // namespace mtfl::solvers

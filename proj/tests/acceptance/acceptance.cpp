// Acceptance gate: nine release criteria, one [PASS]/[FAIL] line each.
// Oracles here are independent of the library code paths they judge
// (grids, subgradient descent, Eigen solves, hand arithmetic).
// Usage: mtfl_acceptance [path-to-mtfl-binary] [repo-root]

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtfl/core/matrix.hpp"
#include "mtfl/core/rng.hpp"
#include "mtfl/featureprep/featureprep.hpp"
#include "mtfl/multitask/multitask.hpp"
#include "mtfl/seir/seir.hpp"
#include "mtfl/solvers/prox.hpp"
#include "mtfl/solvers/solvers.hpp"
#include "mtfl/voting/voting.hpp"

using namespace mtfl;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void verdict(int criterion, bool ok, const std::string &label, const std::string &detail) {
    std::printf("[%s] %d %s (%s)\n", ok ? "PASS" : "FAIL", criterion, label.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++g_failures;
}

std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// --- criterion 1: prox operators vs numeric oracles ----------------------

double prox_objective(std::span<const double> v, std::span<const double> x, double t1,
                      double t2, double t3) {
    double quad = 0.0, l1 = 0.0, fuse = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        quad += 0.5 * (x[j] - v[j]) * (x[j] - v[j]);
        l1 += std::fabs(x[j]);
        sq += x[j] * x[j];
    }
    for (std::size_t j = 0; j + 1 < v.size(); ++j)
        fuse += std::fabs(x[j + 1] - x[j]);
    return quad + t1 * l1 + t2 * fuse + t3 * std::sqrt(sq);
}

// Exhaustive axis grid; only used for k <= 3 where it stays cheap.
double grid_oracle(std::span<const double> v, double t1, double t2, double t3) {
    const std::size_t k = v.size();
    const std::size_t steps = k == 1 ? 4000 : k == 2 ? 240 : 72;
    std::vector<double> lo(k), hi(k), x(k);
    for (std::size_t j = 0; j < k; ++j) {
        lo[j] = std::min(v[j], 0.0) - 0.1;
        hi[j] = std::max(v[j], 0.0) + 0.1;
    }
    double best = prox_objective(v, v, t1, t2, t3);
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        for (std::size_t j = 0; j < k; ++j)
            x[j] = lo[j] + (hi[j] - lo[j]) * static_cast<double>(idx[j]) /
                               static_cast<double>(steps);
        best = std::min(best, prox_objective(v, x, t1, t2, t3));
        std::size_t j = 0;
        while (j < k && ++idx[j] > steps)
            idx[j++] = 0;
        if (j == k)
            break;
    }
    return best;
}

// Projected subgradient with a diminishing step; tracks the best iterate.
double subgradient_oracle(std::span<const double> v, double t1, double t2, double t3) {
    const std::size_t k = v.size();
    double vmax = 1.0;
    for (double e : v)
        vmax = std::max(vmax, std::fabs(e));
    double best = std::min(prox_objective(v, v, t1, t2, t3),
                           prox_objective(v, std::vector<double>(k, 0.0), t1, t2, t3));
    std::vector<double> x(v.begin(), v.end()), g(k);
    for (int it = 0; it < 100000; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            norm += x[j] * x[j];
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < k; ++j) {
            g[j] = (x[j] - v[j]) + t1 * (x[j] > 0 ? 1.0 : x[j] < 0 ? -1.0 : 0.0);
            if (norm > 0)
                g[j] += t3 * x[j] / norm;
        }
        for (std::size_t j = 0; j + 1 < k; ++j) {
            const double s = x[j + 1] > x[j] ? 1.0 : x[j + 1] < x[j] ? -1.0 : 0.0;
            g[j + 1] += t2 * s;
            g[j] -= t2 * s;
        }
        const double step = 0.05 * vmax / std::sqrt(static_cast<double>(it + 1));
        for (std::size_t j = 0; j < k; ++j)
            x[j] -= step * g[j];
        best = std::min(best, prox_objective(v, x, t1, t2, t3));
    }
    return best;
}

void criterion_prox() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xACC001);
    double worst = -1e300;
    int checked = 0;
    for (int op = 0; op < 4; ++op) {
        for (int inst = 0; inst < 1000; ++inst) {
            const std::size_t k = 1 + static_cast<std::size_t>(rng.bits() % 8);
            std::vector<double> v(k), x(k);
            const double scale = rng.uniform(0.5, 2.0);
            for (double &e : v)
                e = scale * rng.normal();
            double t1 = 0, t2 = 0, t3 = 0;
            const double tau = rng.uniform(0.05, 1.5);
            switch (op) {
            case 0: t1 = tau; solvers::prox_l1(v, tau, x); break;
            case 1: t2 = tau; solvers::prox_flsa(v, tau, x); break;
            case 2: t3 = tau; solvers::prox_group_l2(v, tau, x); break;
            default:
                t1 = rng.uniform(0.05, 1.0);
                t2 = rng.uniform(0.05, 1.0);
                t3 = rng.uniform(0.05, 1.0);
                solvers::prox_fsgl_row(v, t1, t2, t3, x);
            }
            const double mine = prox_objective(v, x, t1, t2, t3);
            const double oracle =
                k <= 3 ? grid_oracle(v, t1, t2, t3) : subgradient_oracle(v, t1, t2, t3);
            worst = std::max(worst, mine - oracle);
            ++checked;
        }
    }
    const double elapsed = seconds_since(t0);
    verdict(1, worst <= 1e-5 && elapsed < 60.0,
            "prox operators beat independent numeric oracles",
            fmt("%.0f instances, worst margin %.2e, %.1fs", checked, worst, elapsed));
}

// --- criterion 2: lasso stationarity --------------------------------------

double kkt_by_hand(const Matrix &x, const Matrix &y, const Matrix &w, double lambda) {
    const std::size_t n = x.rows(), d = x.cols(), k = y.cols();
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            double g = 0.0; // 2 * (X^T (XW - Y))(i, t)
            for (std::size_t r = 0; r < n; ++r) {
                double pred = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    pred += x(r, j) * w(j, t);
                g += 2.0 * x(r, i) * (pred - y(r, t));
            }
            if (w(i, t) != 0.0)
                worst = std::max(worst, std::fabs(g + lambda * (w(i, t) > 0 ? 1.0 : -1.0)));
            else
                worst = std::max(worst, std::max(0.0, std::fabs(g) - lambda));
        }
    return worst;
}

void criterion_lasso_kkt() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xACC002);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 2 + rng.bits() % 19, d = 1 + rng.bits() % 20,
                          k = 1 + rng.bits() % 20;
        Matrix x(n, d), y(n, k);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c)
                x(r, c) = rng.normal();
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < k; ++c)
                y(r, c) = rng.normal(0.0, 2.0);
        const double lambda = rng.uniform(0.05, 4.0);
        solvers::SolverOptions opts;
        opts.tol = 1e-14;
        opts.max_iter = 50000;
        const auto fit = solvers::fit_lasso(x, y, lambda, opts);
        worst = std::max(worst, kkt_by_hand(x, y, fit.weights, lambda));
    }
    const double elapsed = seconds_since(t0);
    verdict(2, worst <= 1e-6 && elapsed < 60.0, "lasso stationarity residual at optimum",
            fmt("100 instances, worst residual %.2e, %.1fs", worst, elapsed));
}

// --- criterion 3: fsgl reductions -----------------------------------------

void criterion_reductions() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xACC003);
    double worst_ls = 0.0, worst_lasso = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t d = 2 + rng.bits() % 9, k = 1 + rng.bits() % 10,
                          n = d + 3 + rng.bits() % 10;
        Matrix x(n, d), y(n, k);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c)
                x(r, c) = rng.normal();
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < k; ++c)
                y(r, c) = rng.normal();
        solvers::SolverOptions opts;
        opts.tol = 1e-13;
        opts.max_iter = 30000;

        // lambda = 0: objective must match the Eigen least-squares solve.
        solvers::PenaltyConfig zero{solvers::Model::fsgl, 0.0, 0.0, 0.0};
        const auto free_fit = solvers::fit_fsgl(x, y, zero, opts);
        Eigen::MatrixXd ex(n, d), ey(n, k);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c)
                ex(static_cast<long>(r), static_cast<long>(c)) = x(r, c);
            for (std::size_t c = 0; c < k; ++c)
                ey(static_cast<long>(r), static_cast<long>(c)) = y(r, c);
        }
        const Eigen::MatrixXd ew = ex.colPivHouseholderQr().solve(ey);
        const double ls_obj = (ey - ex * ew).squaredNorm();
        const double mine = solvers::objective_value(x, y, free_fit.weights, zero);
        worst_ls = std::max(worst_ls, (mine - ls_obj) / std::max(1.0, ls_obj));

        // lambda2 = lambda3 = 0: objective must match the lasso path.
        const double lambda = rng.uniform(0.1, 2.0);
        solvers::PenaltyConfig l1cfg{solvers::Model::lasso, lambda, 0.0, 0.0};
        solvers::PenaltyConfig fcfg{solvers::Model::fsgl, lambda, 0.0, 0.0};
        const auto lasso_fit = solvers::fit_lasso(x, y, lambda, opts);
        const auto fsgl_fit = solvers::fit_fsgl(x, y, fcfg, opts);
        const double lasso_obj = solvers::objective_value(x, y, lasso_fit.weights, l1cfg);
        const double fsgl_obj = solvers::objective_value(x, y, fsgl_fit.weights, l1cfg);
        worst_lasso =
            std::max(worst_lasso, std::fabs(fsgl_obj - lasso_obj) / std::max(1.0, lasso_obj));
    }
    const double elapsed = seconds_since(t0);
    verdict(3, worst_ls <= 1e-5 && worst_lasso <= 1e-5,
            "fsgl reduces to least squares and lasso at zero penalties",
            fmt("50 instances, ls gap %.2e, lasso gap %.2e", worst_ls, worst_lasso) +
                fmt(", %.1fs", elapsed));
}

// --- criteria 4 and 5: planted synthetic recovery -------------------------

constexpr std::array<std::size_t, 5> kPlanted = {3, 8, 14, 19, 24};

// n=60, d=27, k=42: five active rows with piecewise-constant profiles
// over the six task groups, Y = XW* + noise at 10% of signal std.
multitask::TaskSpec planted_tasks(Matrix *w_star = nullptr) {
    const std::size_t n = 60, d = 27, k = 42;
    Rng rng(0x7AB1E2);
    Matrix w(d, k);
    for (std::size_t i : kPlanted)
        for (std::size_t g = 0; g < 6; ++g) {
            const double val = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.5);
            for (std::size_t t = 7 * g; t < 7 * (g + 1); ++t)
                w(i, t) = val;
        }
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c)
            x(r, c) = rng.normal();
    Matrix signal(n, k);
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t t = 0; t < k; ++t) {
            double s = 0.0;
            for (std::size_t i : kPlanted)
                s += x(r, i) * w(i, t);
            signal(r, t) = s;
            mean += s;
            sq += s * s;
        }
    const double count = static_cast<double>(n * k);
    const double sigma = 0.1 * std::sqrt(sq / count - (mean / count) * (mean / count));
    multitask::TaskSpec task;
    task.x = x;
    task.y = signal;
    task.group_size = 7;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t t = 0; t < k; ++t)
            task.y(r, t) += sigma * rng.normal();
    if (w_star)
        *w_star = w;
    return task;
}

multitask::ExperimentOptions protocol_options() {
    multitask::ExperimentOptions opts;
    opts.cv_folds = 5;
    opts.test_fraction = 0.1;
    return opts;
}

void criterion_model_ordering() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto task = planted_tasks();
    const auto l1 = multitask::log_grid(0.05, 50.0, 5);
    const auto l23 = multitask::log_grid(0.05, 10.0, 3);
    const auto opts = protocol_options();
    const std::uint64_t base = 0x5EED04;
    const auto ridge = multitask::repeat_experiments(
        task, multitask::make_grid(solvers::Model::ridge, l1, {}, {}), 100, base, opts);
    const auto lasso = multitask::repeat_experiments(
        task, multitask::make_grid(solvers::Model::lasso, l1, {}, {}), 100, base, opts);
    const auto fsgl = multitask::repeat_experiments(
        task, multitask::make_grid(solvers::Model::fsgl, l1, l23, l23), 100, base, opts);
    int fsgl_wins = 0;
    for (std::size_t r = 0; r < 100; ++r)
        if (fsgl.runs[r].test_rmse < lasso.runs[r].test_rmse)
            ++fsgl_wins;
    const double elapsed = seconds_since(t0);
    const bool ordered = fsgl.rmse_mean < lasso.rmse_mean && lasso.rmse_mean < ridge.rmse_mean;
    verdict(4, ordered && fsgl_wins >= 80 && elapsed < 600.0,
            "planted synthetic keeps fsgl < lasso < ridge",
            fmt("means %.4f / %.4f / %.4f", fsgl.rmse_mean, lasso.rmse_mean, ridge.rmse_mean) +
                fmt(", fsgl wins %g/100 seeds, %.0fs", fsgl_wins, elapsed));
}

void criterion_voting_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto task = planted_tasks();
    const auto grid = multitask::make_grid(solvers::Model::fsgl,
                                           multitask::log_grid(0.1, 10.0, 3),
                                           multitask::log_grid(0.05, 1.0, 2),
                                           multitask::log_grid(0.05, 1.0, 2));
    auto opts = protocol_options();
    opts.cv_folds = 3;
    int recovered = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto batch =
            multitask::repeat_experiments(task, grid, 5, mix_seed(0xB07E5, rep), opts);
        std::vector<std::vector<std::size_t>> rankings;
        for (const auto &run : batch.runs)
            rankings.push_back(voting::task_vote(run.weights).ranking);
        const auto stable = voting::aggregate_ranking(rankings);
        int hits = 0;
        for (std::size_t pos = 0; pos < 5; ++pos)
            if (std::find(kPlanted.begin(), kPlanted.end(), stable.order[pos]) !=
                kPlanted.end())
                ++hits;
        if (hits >= 4)
            ++recovered;
    }
    const double elapsed = seconds_since(t0);
    verdict(5, recovered >= 95, "stability vote recovers the planted features",
            fmt(">=4/5 planted in top-5 in %g/100 repetitions, %.0fs", recovered, elapsed));
}

// --- criterion 6: multi-task rmse oracle ----------------------------------

void criterion_rmse_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xACC006);
    double worst = 0.0;
    int cases = 0;

    auto check = [&](const Matrix &truth, const Matrix &pred,
                     const std::vector<std::size_t> &lengths) {
        // Hand oracle: per-task rmse over the task's rows, then a
        // length-weighted average.
        double weighted = 0.0, total = 0.0;
        for (std::size_t t = 0; t < truth.cols(); ++t) {
            double sq = 0.0;
            for (std::size_t r = 0; r < lengths[t]; ++r)
                sq += (truth(r, t) - pred(r, t)) * (truth(r, t) - pred(r, t));
            weighted += static_cast<double>(lengths[t]) *
                        std::sqrt(sq / static_cast<double>(lengths[t]));
            total += static_cast<double>(lengths[t]);
        }
        const double mine = multitask::rmse_multitask(truth, pred, lengths);
        worst = std::max(worst, std::fabs(mine - weighted / total));
        ++cases;
    };

    // Pinned: one task, errors {3, 4} -> rmse sqrt(12.5).
    {
        Matrix truth(2, 1), pred(2, 1);
        truth(0, 0) = 3.0;
        truth(1, 0) = -4.0;
        check(truth, pred, {2});
    }
    // Pinned: two tasks with lengths 1 and 3, errors {6} and {1,1,1}.
    {
        Matrix truth(3, 2), pred(3, 2);
        truth(0, 0) = 6.0;
        for (std::size_t r = 0; r < 3; ++r)
            truth(r, 1) = 1.0;
        std::vector<std::size_t> lengths = {1, 3};
        const double mine = multitask::rmse_multitask(truth, pred, lengths);
        worst = std::max(worst, std::fabs(mine - (1.0 * 6.0 + 3.0 * 1.0) / 4.0));
        ++cases;
        check(truth, pred, lengths);
    }
    // Constructed: random shapes with unequal task lengths.
    while (cases < 20) {
        const std::size_t n = 2 + rng.bits() % 6, k = 1 + rng.bits() % 5;
        Matrix truth(n, k), pred(n, k);
        std::vector<std::size_t> lengths(k);
        for (std::size_t t = 0; t < k; ++t)
            lengths[t] = 1 + rng.bits() % n;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t t = 0; t < k; ++t) {
                truth(r, t) = static_cast<double>(static_cast<int>(rng.bits() % 9)) - 4.0;
                pred(r, t) = static_cast<double>(static_cast<int>(rng.bits() % 9)) - 4.0;
            }
        check(truth, pred, lengths);
    }
    const double elapsed = seconds_since(t0);
    verdict(6, worst <= 1e-12, "multi-task rmse matches the hand oracle",
            fmt("20 cases, worst gap %.2e, %.1fs", worst, elapsed));
}

// --- criterion 7: seir properties -----------------------------------------

void criterion_seir() {
    const auto t0 = std::chrono::steady_clock::now();
    seir::SeirParams p = seir::default_params();
    p.days = 120;
    const auto coarse = seir::simulate_seir(p);

    double worst_conservation = 0.0;
    for (std::size_t day = 0; day <= 120; ++day) {
        const double total = coarse.s[day] + coarse.e[day] + coarse.i[day] + coarse.r[day];
        worst_conservation =
            std::max(worst_conservation, std::fabs(total - p.n_pop) / p.n_pop);
    }

    seir::SeirParams fine = p;
    fine.dt = p.dt / 10.0;
    const auto refined = seir::simulate_seir(fine);
    double worst_refine = 0.0;
    auto series_gap = [&](const std::vector<double> &a, const std::vector<double> &b) {
        for (std::size_t day = 0; day < a.size(); ++day)
            worst_refine = std::max(
                worst_refine, std::fabs(a[day] - b[day]) / std::max(1.0, std::fabs(b[day])));
    };
    series_gap(coarse.s, refined.s);
    series_gap(coarse.e, refined.e);
    series_gap(coarse.i, refined.i);
    series_gap(coarse.r, refined.r);
    series_gap(coarse.cum_cases, refined.cum_cases);
    series_gap(coarse.cum_deaths, refined.cum_deaths);

    seir::SeirParams year = seir::default_params();
    year.days = 365;
    const auto long_run = seir::simulate_seir(year);
    const double cfr = long_run.cum_deaths.back() / long_run.cum_cases.back();
    const double cfr_gap = std::fabs(cfr - year.mu) / year.mu;

    const double elapsed = seconds_since(t0);
    verdict(7,
            worst_conservation <= 1e-9 && worst_refine <= 1e-4 && cfr_gap < 0.1,
            "seir conserves people, refines stably, drives cfr to mu",
            fmt("conservation %.1e, dt/10 gap %.1e, cfr gap %.3f", worst_conservation,
                worst_refine, cfr_gap) +
                fmt(", %.1fs", elapsed));
}

// --- criterion 8: hybrid selection ----------------------------------------

void criterion_hybrid() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr std::array<std::size_t, 3> informative = {4, 13, 21};
    int successes = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(mix_seed(0xACC008, seed));
        const std::size_t n = 60, d = 27;
        Matrix x(n, d);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c)
                x(r, c) = rng.normal();
        std::vector<double> y(n);
        for (std::size_t r = 0; r < n; ++r)
            y[r] = 1.5 * x(r, 4) - 2.0 * x(r, 13) + 1.0 * x(r, 21) + 0.5 * rng.normal();

        const std::size_t m = 8;
        featureprep::ForestConfig fc;
        fc.n_trees = 100;
        fc.seed = mix_seed(0xACC008F, seed);
        const std::array<featureprep::SelectionResult, 2> filters = {
            featureprep::pearson_select(x, y, m), featureprep::fscore_select(x, y, m)};
        const std::array<featureprep::SelectionResult, 2> wrappers = {
            featureprep::rfe_select(x, y, m), featureprep::forest_importance(x, y, m, fc)};
        const auto chosen = featureprep::hybrid_select(filters, wrappers, m);

        const bool superset = std::all_of(
            informative.begin(), informative.end(), [&](std::size_t f) {
                return std::binary_search(chosen.begin(), chosen.end(), f);
            });
        if (superset && chosen.size() <= 10)
            ++successes;
    }
    const double elapsed = seconds_since(t0);
    verdict(8, successes >= 90, "hybrid selection recovers the informative superset",
            fmt("3 planted + 24 noise: %g/100 seeds, %.0fs", successes, elapsed));
}

// --- criterion 9: end-to-end determinism ----------------------------------

std::string slurp(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_end_to_end(const std::string &mtfl_bin, const std::string &repo_root) {
    const auto t0 = std::chrono::steady_clock::now();
    namespace fs = std::filesystem;
    if (!fs::exists(mtfl_bin)) {
        verdict(9, false, "end-to-end determinism on the bundled sample",
                "mtfl binary not found at " + mtfl_bin);
        return;
    }
    const fs::path base = fs::temp_directory_path() / "mtfl_acceptance";
    fs::remove_all(base);
    const std::array<std::pair<const char *, fs::path>, 3> runs = {
        {{"1", base / "a"}, {"1", base / "b"}, {"8", base / "c"}}};
    double slowest = 0.0;
    for (const auto &[threads, out] : runs) {
        const auto r0 = std::chrono::steady_clock::now();
        const std::string cmd = "cd '" + repo_root + "' && MTFL_THREADS=" +
                                std::string(threads) + " '" + mtfl_bin +
                                "' run --config data/sample/config.json --out '" +
                                out.string() + "' >/dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            verdict(9, false, "end-to-end determinism on the bundled sample",
                    "pipeline run exited nonzero");
            return;
        }
        slowest = std::max(slowest, seconds_since(r0));
    }
    const std::array<const char *, 8> artifacts = {
        "selection.csv",       "augmentation.json",    "global_importance.csv",
        "model_comparison.csv", "local_importance.csv", "local_importance.svg",
        "report.json",         "ablation.csv"};
    bool identical = true;
    std::string mismatch;
    for (const char *name : artifacts) {
        const std::string a = slurp(runs[0].second / name);
        if (a.empty() || a != slurp(runs[1].second / name) ||
            a != slurp(runs[2].second / name)) {
            identical = false;
            mismatch = name;
            break;
        }
    }
    const double elapsed = seconds_since(t0);
    verdict(9, identical && slowest < 300.0,
            "end-to-end artifacts byte-identical across reruns and thread counts",
            identical ? fmt("8 artifacts x 3 runs, slowest run %.1fs, total %.1fs", slowest,
                            elapsed)
                      : "first mismatch: " + mismatch);
}

} // namespace

int main(int argc, char **argv) {
    const std::string mtfl_bin = argc > 1 ? argv[1] : "build/tools/mtfl";
    const std::string repo_root = argc > 2 ? argv[2] : ".";
    criterion_prox();
    criterion_lasso_kkt();
    criterion_reductions();
    criterion_model_ordering();
    criterion_voting_recovery();
    criterion_rmse_oracle();
    criterion_seir();
    criterion_hybrid();
    criterion_end_to_end(mtfl_bin, repo_root);
    if (g_failures == 0)
        std::printf("acceptance: all 9 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

#include "mtfl/multitask/multitask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtfl/core/error.hpp"
#include "mtfl/core/linalg.hpp"
#include "mtfl/core/parallel.hpp"
#include "mtfl/core/rng.hpp"
#include "mtfl/featureprep/featureprep.hpp"

namespace mtfl::multitask {

namespace {

// Sub-stream tags for deriving independent RNG streams from one seed.
constexpr std::uint64_t kSplitStream = 0x5b17;
constexpr std::uint64_t kFoldStream = 0xf01d;
constexpr std::uint64_t kCvStream = 0xc0de;

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

Matrix center_columns(const Matrix &y, std::span<const std::size_t> fit_rows,
                      std::vector<double> &means_out) {
    Matrix out = y;
    means_out.assign(y.cols(), 0.0);
    for (std::size_t t = 0; t < y.cols(); ++t) {
        double mean = 0.0;
        for (const std::size_t i : fit_rows)
            mean += y(i, t);
        mean /= static_cast<double>(fit_rows.size());
        means_out[t] = mean;
        for (std::size_t i = 0; i < y.rows(); ++i)
            out(i, t) -= mean;
    }
    return out;
}

double phase_rmse(const Matrix &y_true, const Matrix &y_pred, std::size_t col_begin,
                  std::size_t col_end) {
    if (col_begin >= col_end)
        return 0.0;
    std::vector<std::size_t> cols(col_end - col_begin);
    std::iota(cols.begin(), cols.end(), col_begin);
    return rmse_multitask(y_true.take_cols(cols), y_pred.take_cols(cols));
}

} // namespace

TaskSpec build_tasks(const Matrix &x, const Matrix &y_daily, std::size_t group_size) {
    if (group_size == 0)
        throw ConfigError("build_tasks: group size must be positive");
    if (x.rows() != y_daily.rows())
        throw DataError("build_tasks: X and Y row counts differ");
    const std::size_t k = y_daily.cols();
    if (k == 0 || k % group_size != 0)
        throw ConfigError("build_tasks: window " + std::to_string(k) +
                          " is not divisible by group size " + std::to_string(group_size));

    TaskSpec out;
    out.x = x;
    out.group_size = group_size;
    out.y = Matrix(y_daily.rows(), k);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t group = t / group_size;
        const std::size_t target_day = (group + 1) * group_size - 1;
        for (std::size_t i = 0; i < y_daily.rows(); ++i)
            out.y(i, t) = y_daily(i, target_day);
    }
    return out;
}

double rmse_multitask(const Matrix &y_true, const Matrix &y_pred,
                      std::span<const std::size_t> task_lengths) {
    if (!y_true.same_shape(y_pred))
        throw DataError("rmse_multitask: shape mismatch");
    if (task_lengths.size() != y_true.cols())
        throw DataError("rmse_multitask: one length per task required");

    double weighted = 0.0, total_len = 0.0;
    for (std::size_t t = 0; t < y_true.cols(); ++t) {
        const std::size_t len = task_lengths[t];
        if (len == 0 || len > y_true.rows())
            throw DataError("rmse_multitask: task length out of range");
        double ss = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            const double r = y_pred(i, t) - y_true(i, t);
            ss += r * r;
        }
        const double n_t = static_cast<double>(len);
        weighted += n_t * std::sqrt(ss / n_t);
        total_len += n_t;
    }
    return weighted / total_len;
}

double rmse_multitask(const Matrix &y_true, const Matrix &y_pred) {
    const std::vector<std::size_t> lengths(y_true.cols(), y_true.rows());
    return rmse_multitask(y_true, y_pred, lengths);
}

SplitPlan split_rows(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (n < 2)
        throw DataError("split_rows: need at least 2 rows");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ConfigError("split_rows: test fraction must lie in (0, 1)");
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

    Rng rng(mix_seed(seed, kSplitStream));
    const auto perm = rng.permutation(n);
    SplitPlan plan;
    plan.seed = seed;
    plan.test_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    plan.train_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(plan.test_rows.begin(), plan.test_rows.end());
    std::sort(plan.train_rows.begin(), plan.train_rows.end());
    return plan;
}

std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds,
                                                     std::uint64_t seed) {
    if (folds < 2)
        throw ConfigError("fold_partition: need at least 2 folds");
    if (n < folds)
        throw DataError("fold_partition: fewer rows than folds");
    Rng rng(mix_seed(seed, kFoldStream));
    const auto perm = rng.permutation(n);
    std::vector<std::vector<std::size_t>> out(folds);
    for (std::size_t i = 0; i < n; ++i)
        out[i % folds].push_back(perm[i]);
    for (auto &fold : out)
        std::sort(fold.begin(), fold.end());
    return out;
}

solvers::PenaltyConfig cross_validate(const TaskSpec &task,
                                      std::span<const solvers::PenaltyConfig> grid,
                                      std::size_t folds, std::uint64_t seed,
                                      const solvers::SolverOptions &opts) {
    if (grid.empty())
        throw ConfigError("cross_validate: empty grid");
    for (const auto &cfg : grid)
        cfg.validate();
    const auto partition = fold_partition(task.n(), folds, seed);

    // Fit order: descending total penalty so each solution warm-starts
    // the next (slightly denser) one within a fold.
    std::vector<std::size_t> fit_order(grid.size());
    std::iota(fit_order.begin(), fit_order.end(), 0);
    std::stable_sort(fit_order.begin(), fit_order.end(), [&](std::size_t a, std::size_t b) {
        return grid[a].total() > grid[b].total();
    });

    std::vector<double> mean_rmse(grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < folds; ++g)
            if (g != f)
                train.insert(train.end(), partition[g].begin(), partition[g].end());
        std::sort(train.begin(), train.end());
        const Matrix x_train = task.x.take_rows(train);
        const Matrix y_train = task.y.take_rows(train);
        const Matrix x_val = task.x.take_rows(partition[f]);
        const Matrix y_val = task.y.take_rows(partition[f]);

        solvers::SolverOptions fold_opts = opts;
        fold_opts.lipschitz_hint = 2.0 * linalg::spectral_norm_xtx(x_train, opts.power_iters,
                                                                   opts.power_tol);
        Matrix warm;
        for (const std::size_t gi : fit_order) {
            fold_opts.warm_start = warm.empty() ? nullptr : &warm;
            const auto fit = solvers::fit(x_train, y_train, grid[gi], fold_opts);
            warm = fit.weights;
            const Matrix pred = linalg::matmul(x_val, fit.weights);
            mean_rmse[gi] += rmse_multitask(y_val, pred) / static_cast<double>(folds);
        }
    }

    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        if (mean_rmse[gi] < mean_rmse[best] ||
            (mean_rmse[gi] == mean_rmse[best] && grid[gi].total() > grid[best].total()))
            best = gi;
    }
    return grid[best];
}

RunResult run_experiment(const TaskSpec &task, std::span<const solvers::PenaltyConfig> grid,
                         std::uint64_t seed, const ExperimentOptions &opts) {
    const auto plan = split_rows(task.n(), opts.test_fraction, seed);
    const auto scaled = featureprep::standard_scale(task.x, plan.train_rows);
    std::vector<double> y_means;
    const Matrix y_centered = center_columns(task.y, plan.train_rows, y_means);

    TaskSpec train_task;
    train_task.x = scaled.values.take_rows(plan.train_rows);
    train_task.y = y_centered.take_rows(plan.train_rows);
    train_task.group_size = task.group_size;

    RunResult out;
    out.seed = seed;
    out.chosen = cross_validate(train_task, grid, opts.cv_folds, mix_seed(seed, kCvStream),
                                opts.cv_solver);

    solvers::SolverOptions final_opts = opts.final_solver;
    final_opts.lipschitz_hint =
        2.0 * linalg::spectral_norm_xtx(train_task.x, final_opts.power_iters,
                                        final_opts.power_tol);
    const auto fit = solvers::fit(train_task.x, train_task.y, out.chosen, final_opts);
    out.weights = fit.weights;
    out.converged = fit.report.converged;

    const Matrix x_test = scaled.values.take_rows(plan.test_rows);
    const Matrix y_test = y_centered.take_rows(plan.test_rows);
    const Matrix pred_test = linalg::matmul(x_test, fit.weights);
    out.test_rmse = rmse_multitask(y_test, pred_test);
    out.train_rmse =
        rmse_multitask(train_task.y, linalg::matmul(train_task.x, fit.weights));

    const std::size_t k = task.k();
    out.per_phase[0] = phase_rmse(y_test, pred_test, 0, k / 3);
    out.per_phase[1] = phase_rmse(y_test, pred_test, k / 3, 2 * k / 3);
    out.per_phase[2] = phase_rmse(y_test, pred_test, 2 * k / 3, k);
    return out;
}

ExperimentSummary repeat_experiments(const TaskSpec &task,
                                     std::span<const solvers::PenaltyConfig> grid,
                                     std::size_t n_runs, std::uint64_t base_seed,
                                     const ExperimentOptions &opts) {
    if (n_runs == 0)
        throw ConfigError("repeat_experiments: need at least one run");
    if (grid.empty())
        throw ConfigError("repeat_experiments: empty grid");
    for (const auto &cfg : grid)
        if (cfg.model != grid.front().model)
            throw ConfigError("repeat_experiments: grid mixes models");

    ExperimentSummary summary;
    summary.model = grid.front().model;
    summary.runs.resize(n_runs);
    parallel_for(n_runs, [&](std::size_t r) {
        summary.runs[r] = run_experiment(task, grid, mix_seed(base_seed, r), opts);
    });

    // Ordered reduction over the run slots: identical for any worker count.
    const double n = static_cast<double>(n_runs);
    for (const auto &run : summary.runs) {
        summary.rmse_mean += run.test_rmse / n;
        for (std::size_t p = 0; p < 3; ++p)
            summary.per_phase_mean[p] += run.per_phase[p] / n;
    }
    double var = 0.0;
    for (const auto &run : summary.runs)
        var += (run.test_rmse - summary.rmse_mean) * (run.test_rmse - summary.rmse_mean) / n;
    summary.rmse_std = std::sqrt(var);
    return summary;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (points == 0 || lo <= 0.0 || hi < lo)
        throw ConfigError("log_grid: need points >= 1 and 0 < lo <= hi");
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (std::log10(hi) - std::log10(lo)) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = std::pow(10.0, std::log10(lo) + step * static_cast<double>(i));
    return out;
}

std::vector<solvers::PenaltyConfig> make_grid(solvers::Model model, std::span<const double> l1,
                                              std::span<const double> l2,
                                              std::span<const double> l3) {
    if (l1.empty())
        throw ConfigError("make_grid: lambda1 values required");
    std::vector<solvers::PenaltyConfig> out;
    if (model != solvers::Model::fsgl) {
        for (const double a : l1) {
            solvers::PenaltyConfig cfg;
            cfg.model = model;
            cfg.lambda1 = a;
            cfg.validate();
            out.push_back(cfg);
        }
        return out;
    }
    if (l2.empty() || l3.empty())
        throw ConfigError("make_grid: fsgl needs values for all three penalties");
    for (const double a : l1)
        for (const double b : l2)
            for (const double c : l3) {
                solvers::PenaltyConfig cfg;
                cfg.model = solvers::Model::fsgl;
                cfg.lambda1 = a;
                cfg.lambda2 = b;
                cfg.lambda3 = c;
                cfg.validate();
                out.push_back(cfg);
            }
    return out;
}

} // namespace mtfl::multitask

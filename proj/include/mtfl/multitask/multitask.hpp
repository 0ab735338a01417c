#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mtfl/core/matrix.hpp"
#include "mtfl/solvers/solvers.hpp"

namespace mtfl::multitask {

/// Shared-design multi-task data: every task column of y is the coupled
/// group target (the group's final-day value), so the k columns fall
/// into k/group_size blocks of identical targets.
struct TaskSpec {
    Matrix x;
    Matrix y;
    std::size_t group_size = 7;

    std::size_t n() const { return x.rows(); }
    std::size_t d() const { return x.cols(); }
    std::size_t k() const { return y.cols(); }
};

/// Rewrites the daily target matrix into the grouped structure: every
/// task column in group g carries the day-((g+1)*group_size - 1) value.
TaskSpec build_tasks(const Matrix &x, const Matrix &y_daily, std::size_t group_size);

/// Task-length-weighted mean of per-task RMSEs: task t contributes its
/// root-mean-squared error over rows 0..lengths[t]-1 of column t,
/// weighted by lengths[t].
double rmse_multitask(const Matrix &y_true, const Matrix &y_pred,
                      std::span<const std::size_t> task_lengths);
/// All tasks use every row.
double rmse_multitask(const Matrix &y_true, const Matrix &y_pred);

/// Strictly 9:1 by default; test size never drops below one row.
struct SplitPlan {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::uint64_t seed = 0;
};
SplitPlan split_rows(std::size_t n, double test_fraction, std::uint64_t seed);

/// Deterministic fold assignment depending only on (seed, n, folds):
/// rows are permuted once, then dealt round-robin.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds,
                                                     std::uint64_t seed);

struct ExperimentOptions {
    std::size_t cv_folds = 5;
    double test_fraction = 0.1;
    solvers::SolverOptions cv_solver;    // loosened: grid scoring only
    solvers::SolverOptions final_solver; // refit at full tolerance

    ExperimentOptions() {
        cv_solver.tol = 1e-5;
        cv_solver.max_iter = 2000;
    }
};

/// Mean validation rmse over folds for every grid point; returns the
/// minimizer, ties broken toward the larger total penalty (the sparser
/// model), then toward the earlier grid entry.
solvers::PenaltyConfig cross_validate(const TaskSpec &task,
                                      std::span<const solvers::PenaltyConfig> grid,
                                      std::size_t folds, std::uint64_t seed,
                                      const solvers::SolverOptions &opts = {});

struct RunResult {
    std::uint64_t seed = 0;
    solvers::PenaltyConfig chosen;
    double test_rmse = 0.0;
    double train_rmse = 0.0;
    std::array<double, 3> per_phase{}; // test rmse over the 3 task-column thirds
    Matrix weights;                    // d x k refit on the full training split
    bool converged = true;
};

/// One full protocol pass: split by seed, standardize X and center Y on
/// the training rows only, cross-validate the grid, refit, score the
/// held-out rows.
RunResult run_experiment(const TaskSpec &task, std::span<const solvers::PenaltyConfig> grid,
                         std::uint64_t seed, const ExperimentOptions &opts = {});

struct ExperimentSummary {
    solvers::Model model = solvers::Model::fsgl;
    double rmse_mean = 0.0;
    double rmse_std = 0.0; // population std over runs
    std::array<double, 3> per_phase_mean{};
    std::vector<RunResult> runs; // per-run weights retained for the voting stage
};

/// n_runs independent repetitions with seeds mix_seed(base_seed, run).
/// Runs may execute in parallel; aggregation is an ordered reduction, so
/// the summary is identical for any worker count.
ExperimentSummary repeat_experiments(const TaskSpec &task,
                                     std::span<const solvers::PenaltyConfig> grid,
                                     std::size_t n_runs, std::uint64_t base_seed,
                                     const ExperimentOptions &opts = {});

/// Log-spaced grid helper (inclusive endpoints, points >= 1).
std::vector<double> log_grid(double lo, double hi, std::size_t points);

/// Cross product of penalty values for one model. Ridge and lasso read
/// lambda1 only; fsgl takes the full l1 x l2 x l3 product in
/// lexicographic order.
std::vector<solvers::PenaltyConfig> make_grid(solvers::Model model, std::span<const double> l1,
                                              std::span<const double> l2,
                                              std::span<const double> l3);

} // namespace mtfl::multitask

#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtfl/core/matrix.hpp"
#include "mtfl/multitask/multitask.hpp"

namespace mtfl::voting {

/// Stage-1 result for one experiment: per-feature count of tasks where
/// the weight cleared eps, the absolute weight mass (the tie key), and
/// the induced best-first ranking.
struct ExperimentVote {
    std::vector<long> task_counts;
    std::vector<double> weight_mass; // sum_t |W_it|
    std::vector<std::size_t> ranking;
};

/// Membership is |W_it| > eps; ranking sorts by count descending, ties
/// by weight mass descending, then by feature index.
ExperimentVote task_vote(const Matrix &w, double eps = 1e-6);

/// Cross-experiment accumulator. Both granularities are kept: the
/// task-level count sums per-task memberships, the experiment-level
/// count adds one per experiment with any active task.
struct VoteTable {
    std::vector<long> task_counts;
    std::vector<long> experiment_counts;
    std::size_t n_polls = 0;

    void add(const ExperimentVote &vote); // commutative, order-independent
};

/// Stage-2 Borda aggregate: a feature earns (d - position) points per
/// run (positions 1-based, so first place beats d-1 rivals). Ties in
/// total score break by feature index and are noted.
struct StabilityRanking {
    std::vector<std::size_t> order; // best-first permutation
    std::vector<double> scores;     // Borda score, indexed by feature
    std::vector<std::string> tie_notes;
};

StabilityRanking aggregate_ranking(std::span<const std::vector<std::size_t>> rankings);

/// Back-matching: among the runs whose top-p overlaps the stable top-p
/// the most, the one with the lowest test rmse. Returns an index into
/// runs.
std::size_t select_best_model(const StabilityRanking &stable,
                              std::span<const multitask::RunResult> runs, std::size_t p = 5,
                              double eps = 1e-6);

} // namespace mtfl::voting

#include "mtfl/voting/voting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mtfl/core/error.hpp"

namespace mtfl::voting {

ExperimentVote task_vote(const Matrix &w, double eps) {
    if (eps <= 0.0)
        throw ConfigError("task_vote: eps must be positive");
    const std::size_t d = w.rows(), k = w.cols();
    ExperimentVote out;
    out.task_counts.assign(d, 0);
    out.weight_mass.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            const double a = std::fabs(w(i, t));
            if (a > eps)
                ++out.task_counts[i];
            out.weight_mass[i] += a;
        }

    out.ranking.resize(d);
    std::iota(out.ranking.begin(), out.ranking.end(), 0);
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (out.task_counts[a] != out.task_counts[b])
                             return out.task_counts[a] > out.task_counts[b];
                         return out.weight_mass[a] > out.weight_mass[b];
                         // equal on both keys: stable sort keeps index order
                     });
    return out;
}

void VoteTable::add(const ExperimentVote &vote) {
    const std::size_t d = vote.task_counts.size();
    if (task_counts.empty()) {
        task_counts.assign(d, 0);
        experiment_counts.assign(d, 0);
    }
    if (task_counts.size() != d)
        throw DataError("VoteTable: inconsistent feature universe");
    for (std::size_t i = 0; i < d; ++i) {
        task_counts[i] += vote.task_counts[i];
        if (vote.task_counts[i] > 0)
            ++experiment_counts[i];
    }
    ++n_polls;
}

StabilityRanking aggregate_ranking(std::span<const std::vector<std::size_t>> rankings) {
    if (rankings.empty())
        throw ConfigError("aggregate_ranking: need at least one ranking");
    const std::size_t d = rankings.front().size();
    for (const auto &r : rankings) {
        if (r.size() != d)
            throw DataError("aggregate_ranking: inconsistent feature universe");
        std::set<std::size_t> seen(r.begin(), r.end());
        if (seen.size() != d || (d > 0 && *seen.rbegin() != d - 1))
            throw DataError("aggregate_ranking: ranking is not a permutation");
    }

    StabilityRanking out;
    out.scores.assign(d, 0.0);
    for (const auto &r : rankings)
        for (std::size_t pos = 0; pos < d; ++pos)
            out.scores[r[pos]] += static_cast<double>(d - 1 - pos); // rivals beaten

    out.order.resize(d);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
        return out.scores[a] > out.scores[b]; // stable: ties keep index order
    });

    // Record each tied block once.
    std::size_t start = 0;
    while (start < d) {
        std::size_t end = start + 1;
        while (end < d && out.scores[out.order[end]] == out.scores[out.order[start]])
            ++end;
        if (end - start > 1) {
            std::string note = "features";
            for (std::size_t i = start; i < end; ++i)
                note += " " + std::to_string(out.order[i]);
            note += " tied at score " + std::to_string(out.scores[out.order[start]]) +
                    "; broken by index";
            out.tie_notes.push_back(note);
        }
        start = end;
    }
    return out;
}

std::size_t select_best_model(const StabilityRanking &stable,
                              std::span<const multitask::RunResult> runs, std::size_t p,
                              double eps) {
    if (runs.empty())
        throw ConfigError("select_best_model: no runs");
    const std::size_t d = stable.order.size();
    if (p == 0 || p > d)
        throw ConfigError("select_best_model: p out of range");

    const std::set<std::size_t> stable_top(stable.order.begin(),
                                           stable.order.begin() + static_cast<std::ptrdiff_t>(p));
    std::size_t best = 0;
    std::size_t best_overlap = 0;
    double best_rmse = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto vote = task_vote(runs[r].weights, eps);
        std::size_t overlap = 0;
        for (std::size_t pos = 0; pos < p; ++pos)
            overlap += stable_top.count(vote.ranking[pos]);
        if (r == 0 || overlap > best_overlap ||
            (overlap == best_overlap && runs[r].test_rmse < best_rmse)) {
            best = r;
            best_overlap = overlap;
            best_rmse = runs[r].test_rmse;
        }
    }
    return best;
}

} // namespace mtfl::voting

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtfl/featureprep/featureprep.hpp"
#include "mtfl/ingest/ingest.hpp"
#include "mtfl/multitask/multitask.hpp"
#include "mtfl/voting/voting.hpp"

namespace mtfl::report {

/// One model family's complete evidence: the repeated-experiment summary
/// plus the two-stage vote over its runs and the back-matched best run.
struct ModelEvidence {
    multitask::ExperimentSummary summary;
    voting::VoteTable votes;
    voting::StabilityRanking stable;
    std::size_t best_run = 0;
};

/// Runs both voting stages over summary.runs and back-matches the run
/// whose top-p agrees most with the stable ranking (rmse breaks ties).
ModelEvidence build_evidence(multitask::ExperimentSummary summary, std::size_t top_p = 5,
                             double eps = 1e-6);

/// model,rank,feature,sector,stage1_mean_count,borda_score -- one block
/// of rows per model in stable-rank order; stage1_mean_count is the
/// task-level vote count averaged over runs.
std::string global_importance_csv(std::span<const ingest::Indicator> features,
                                  std::span<const ModelEvidence> models);

/// model,runs,rmse_mean,rmse_std,phase_prior_mean,phase_middle_mean,
/// phase_last_mean -- one row per model.
std::string model_comparison_csv(std::span<const ModelEvidence> models);

/// feature,sector,task_1..task_k -- |W| of the best run, rows in
/// stable-rank order, tasks left to right in time.
std::string local_importance_csv(std::span<const ingest::Indicator> features,
                                 const ModelEvidence &ev);

/// sequential shades |W|; diverging spreads signed W around zero.
enum class HeatScale { sequential, diverging };

std::string local_importance_svg(std::span<const ingest::Indicator> features,
                                 const ModelEvidence &ev, HeatScale scale);

struct AblationRow {
    std::string label; // "all" or "w/o <sector,...>"
    std::array<std::uint8_t, ingest::kSectorCount> sector_used{};
    std::size_t runs = 0;
    double rmse_mean = 0.0;
    double rmse_std = 0.0;
};

/// no,label,<one 0/1 column per sector>,runs,rmse_mean,rmse_std.
std::string ablation_csv(std::span<const AblationRow> rows);

/// Per-feature audit of every selector against the full universe.
struct SelectionEvidence {
    std::vector<double> pearson_r; // signed r, before the |.| ranking
    featureprep::SelectionResult pearson, fscore, rfe, forest;
    std::vector<std::size_t> selected; // hybrid result, ascending
};

/// feature,sector,pearson_r,f_stat,rfe_rank,forest_importance,
/// hybrid_selected -- rfe_rank is 1-based, 1 = kept longest.
std::string selection_csv(std::span<const ingest::Indicator> features,
                          const SelectionEvidence &ev);

struct ReportMeta {
    std::size_t window = 0;
    std::size_t group_size = 0;
    std::size_t n_runs = 0;
    std::uint64_t seed = 0;
    std::string representative; // model whose best run feeds the heatmap
};

/// Machine-readable run summary: protocol settings, feature universe,
/// per-model stats and the back-matched best-run identifier.
std::string report_json(const ReportMeta &meta, std::span<const ingest::Indicator> features,
                        std::span<const ModelEvidence> models);

} // namespace mtfl::report

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mtfl/featureprep/featureprep.hpp"
#include "mtfl/ingest/ingest.hpp"
#include "mtfl/multitask/multitask.hpp"
#include "mtfl/report/report.hpp"
#include "mtfl/seir/seir.hpp"
#include "mtfl/solvers/solvers.hpp"

namespace mtfl::pipeline {

struct GridSpec {
    double lo = 1e-3;
    double hi = 1.0;
    std::size_t points = 4;
};

/// One JSON document drives the whole run; every field has a default so
/// a config may state only what it changes. CLI flags override fields
/// after loading.
struct PipelineConfig {
    std::filesystem::path factors;
    std::filesystem::path epidemic;
    std::filesystem::path out = "out";
    std::size_t window = 42;
    std::size_t group_size = 7;
    std::vector<solvers::Model> models = {solvers::Model::ridge, solvers::Model::lasso,
                                          solvers::Model::fsgl};
    std::size_t n_runs = 100;
    std::uint64_t seed = 20200401;
    double test_fraction = 0.1;
    std::size_t cv_folds = 5;

    std::size_t filter_m = 10;   // per-filter shortlist size
    std::size_t wrapper_m = 10;  // per-wrapper shortlist size
    std::size_t fallback_m = 8;  // mean-rank fallback size
    std::size_t forest_trees = 200;
    std::size_t forest_depth = 4;
    std::size_t forest_mtry = 0; // 0 = floor(sqrt(d))
    double rfe_lambda = 1e-3;

    GridSpec l1{1e-3, 1.0, 4};
    GridSpec l2{1e-3, 1.0, 3};
    GridSpec l3{1e-3, 1.0, 3};

    std::size_t augment_count = 0;
    std::string augment_template; // empty = first region
    double augment_jitter = 0.05;
    std::vector<seir::SeirParams> augment_params; // days 0 = window - 1

    std::vector<std::vector<ingest::Sector>> ablate; // sectors dropped per mask

    report::HeatScale heatmap = report::HeatScale::sequential;
    std::size_t top_p = 5;
    solvers::SolverOptions solver; // final-refit settings
    bool strict = false;           // non-convergence becomes an error
    bool trace = false;            // verbose stage logging

    void validate() const; // throws ConfigError
};

PipelineConfig load_config(const std::filesystem::path &path);
PipelineConfig config_from_json(const std::string &text, const std::string &origin);

/// Everything the fitting stages consume, exposed so partial CLI
/// commands can stop at any stage.
struct StageData {
    ingest::FactorTable table;
    ingest::EpidemicTable epidemic;
    seir::Augmentation augmentation; // empty when augment_count == 0
    ingest::Dataset dataset;
    report::SelectionEvidence selection;
    std::vector<ingest::Indicator> features; // the selected universe
    multitask::TaskSpec task;
};

/// Stages ingest -> augment -> assemble only; selection and task fields
/// stay empty. Errors carry the failing stage's name.
StageData prepare_raw(const PipelineConfig &cfg);

/// Stages ingest -> augment -> assemble -> select -> tasks. Errors carry
/// the failing stage's name.
StageData prepare(const PipelineConfig &cfg);

struct PipelineResult {
    std::vector<std::filesystem::path> artifacts;
    std::vector<report::ModelEvidence> models; // config order
    std::string representative;
};

/// Full protocol: prepare, repeated experiments per model on shared run
/// seeds, two-stage voting, artifact emission (plus ablation when
/// configured). Deterministic for a fixed config and any worker count.
PipelineResult run_pipeline(const PipelineConfig &cfg);

/// Binary write with parent-directory creation; keeps artifacts
/// byte-stable across platforms.
void write_text(const std::filesystem::path &path, const std::string &content);

} // namespace mtfl::pipeline

#include "mtfl/pipeline/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtfl/core/error.hpp"
#include "mtfl/core/log.hpp"
#include "mtfl/core/rng.hpp"

namespace mtfl::pipeline {

namespace {

constexpr std::uint64_t kForestStream = 0xf03e57;
constexpr std::uint64_t kAugmentStream = 0xa06e47;

// Rethrows with the failing stage's name so the CLI surfaces it.
template <typename Fn> auto stage(const char *name, Fn &&fn) {
    try {
        return fn();
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("stage ") + name + ": " + e.what());
    } catch (const DataError &e) {
        throw DataError(std::string("stage ") + name + ": " + e.what());
    } catch (const SolverError &e) {
        throw SolverError(std::string("stage ") + name + ": " + e.what());
    }
}

void reject_unknown(const nlohmann::json &doc, const std::set<std::string> &known,
                    const std::string &where) {
    for (const auto &item : doc.items())
        if (!known.count(item.key()))
            throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
}

template <typename T>
void read_if(const nlohmann::json &doc, const char *key, T &field) {
    if (doc.contains(key))
        doc.at(key).get_to(field);
}

GridSpec grid_from(const nlohmann::json &doc, const std::string &where) {
    reject_unknown(doc, {"lo", "hi", "points"}, where);
    GridSpec g;
    read_if(doc, "lo", g.lo);
    read_if(doc, "hi", g.hi);
    read_if(doc, "points", g.points);
    return g;
}

seir::SeirParams seir_from(const nlohmann::json &doc, const std::string &where) {
    reject_unknown(doc, {"beta", "sigma", "gamma", "mu", "n_pop", "e0", "i0", "days", "dt"},
                   where);
    seir::SeirParams p = seir::default_params();
    read_if(doc, "beta", p.beta);
    read_if(doc, "sigma", p.sigma);
    read_if(doc, "gamma", p.gamma);
    read_if(doc, "mu", p.mu);
    read_if(doc, "n_pop", p.n_pop);
    read_if(doc, "e0", p.e0);
    read_if(doc, "i0", p.i0);
    read_if(doc, "days", p.days);
    read_if(doc, "dt", p.dt);
    return p;
}

std::vector<double> axis_values(const GridSpec &g) {
    return multitask::log_grid(g.lo, g.hi, g.points);
}

// Column-mean CFR per region: the selectors need a single target.
std::vector<double> selection_target(const Matrix &y) {
    std::vector<double> target(y.rows(), 0.0);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t t = 0; t < y.cols(); ++t)
            sum += y(i, t);
        target[i] = sum / static_cast<double>(y.cols());
    }
    return target;
}

} // namespace

void PipelineConfig::validate() const {
    if (factors.empty() || epidemic.empty())
        throw ConfigError("config: factors and epidemic paths are required");
    if (window == 0 || group_size == 0 || window % group_size != 0)
        throw ConfigError("config: window must be a positive multiple of group_size");
    if (models.empty())
        throw ConfigError("config: at least one model is required");
    if (std::set<solvers::Model>(models.begin(), models.end()).size() != models.size())
        throw ConfigError("config: duplicate model entries");
    if (n_runs == 0)
        throw ConfigError("config: runs must be at least 1");
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw ConfigError("config: test_fraction must lie in (0, 1)");
    if (cv_folds < 2)
        throw ConfigError("config: cv_folds must be at least 2");
    if (filter_m == 0 || wrapper_m == 0 || fallback_m == 0)
        throw ConfigError("config: selection sizes must be positive");
    for (const GridSpec *g : {&l1, &l2, &l3}) {
        if (!(g->lo > 0.0) || g->hi < g->lo || g->points == 0)
            throw ConfigError("config: grid axes need 0 < lo <= hi and points >= 1");
    }
    if (augment_jitter < 0.0 || augment_jitter >= 1.0)
        throw ConfigError("config: augment jitter must lie in [0, 1)");
    if (top_p == 0)
        throw ConfigError("config: top_p must be positive");
    for (const auto &mask : ablate)
        if (mask.empty())
            throw ConfigError("config: an ablation mask must drop at least one sector");
}

PipelineConfig config_from_json(const std::string &text, const std::string &origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(origin + ": " + e.what());
    }

    if (!doc.is_object())
        throw ConfigError(origin + ": config must be a JSON object");

    PipelineConfig cfg;
    try {
        reject_unknown(doc,
                       {"factors", "epidemic", "out", "window", "group_size", "models", "runs",
                        "seed", "test_fraction", "cv_folds", "selection", "grid", "augment",
                        "ablate", "heatmap", "top_p", "solver", "strict"},
                       origin);
        if (doc.contains("factors"))
            cfg.factors = doc.at("factors").get<std::string>();
        if (doc.contains("epidemic"))
            cfg.epidemic = doc.at("epidemic").get<std::string>();
        if (doc.contains("out"))
            cfg.out = doc.at("out").get<std::string>();
        read_if(doc, "window", cfg.window);
        read_if(doc, "group_size", cfg.group_size);
        if (doc.contains("models")) {
            cfg.models.clear();
            for (const auto &name : doc.at("models"))
                cfg.models.push_back(solvers::parse_model(name.get<std::string>()));
        }
        read_if(doc, "runs", cfg.n_runs);
        read_if(doc, "seed", cfg.seed);
        read_if(doc, "test_fraction", cfg.test_fraction);
        read_if(doc, "cv_folds", cfg.cv_folds);

        if (doc.contains("selection")) {
            const auto &sel = doc.at("selection");
            reject_unknown(sel,
                           {"filter_m", "wrapper_m", "fallback_m", "forest_trees",
                            "forest_depth", "forest_mtry", "rfe_lambda"},
                           origin + ".selection");
            read_if(sel, "filter_m", cfg.filter_m);
            read_if(sel, "wrapper_m", cfg.wrapper_m);
            read_if(sel, "fallback_m", cfg.fallback_m);
            read_if(sel, "forest_trees", cfg.forest_trees);
            read_if(sel, "forest_depth", cfg.forest_depth);
            read_if(sel, "forest_mtry", cfg.forest_mtry);
            read_if(sel, "rfe_lambda", cfg.rfe_lambda);
        }
        if (doc.contains("grid")) {
            const auto &grid = doc.at("grid");
            reject_unknown(grid, {"lambda1", "lambda2", "lambda3"}, origin + ".grid");
            if (grid.contains("lambda1"))
                cfg.l1 = grid_from(grid.at("lambda1"), origin + ".grid.lambda1");
            if (grid.contains("lambda2"))
                cfg.l2 = grid_from(grid.at("lambda2"), origin + ".grid.lambda2");
            if (grid.contains("lambda3"))
                cfg.l3 = grid_from(grid.at("lambda3"), origin + ".grid.lambda3");
        }
        if (doc.contains("augment")) {
            const auto &aug = doc.at("augment");
            reject_unknown(aug, {"count", "template", "jitter", "params"}, origin + ".augment");
            read_if(aug, "count", cfg.augment_count);
            read_if(aug, "template", cfg.augment_template);
            read_if(aug, "jitter", cfg.augment_jitter);
            if (aug.contains("params"))
                for (const auto &entry : aug.at("params"))
                    cfg.augment_params.push_back(seir_from(entry, origin + ".augment.params"));
        }
        if (doc.contains("ablate")) {
            for (const auto &mask : doc.at("ablate")) {
                std::vector<ingest::Sector> sectors;
                for (const auto &name : mask)
                    sectors.push_back(ingest::parse_sector(name.get<std::string>()));
                cfg.ablate.push_back(std::move(sectors));
            }
        }
        if (doc.contains("heatmap")) {
            const auto name = doc.at("heatmap").get<std::string>();
            if (name == "sequential")
                cfg.heatmap = report::HeatScale::sequential;
            else if (name == "diverging")
                cfg.heatmap = report::HeatScale::diverging;
            else
                throw ConfigError(origin + ": heatmap must be sequential or diverging");
        }
        read_if(doc, "top_p", cfg.top_p);
        if (doc.contains("solver")) {
            const auto &solver = doc.at("solver");
            reject_unknown(solver, {"tol", "max_iter"}, origin + ".solver");
            read_if(solver, "tol", cfg.solver.tol);
            read_if(solver, "max_iter", cfg.solver.max_iter);
        }
        read_if(doc, "strict", cfg.strict);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(origin + ": " + e.what());
    } catch (const DataError &e) {
        throw ConfigError(origin + ": " + e.what()); // bad sector/model names
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config: cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str(), path.string());
}

StageData prepare_raw(const PipelineConfig &cfg) {
    cfg.validate();
    StageData data;

    stage("ingest", [&] {
        data.table = ingest::load_factor_table(cfg.factors);
        data.epidemic = ingest::load_epidemic(cfg.epidemic);
        data.table = ingest::impute_missing(ingest::flag_outliers(data.table));
        log::info("ingest: ", data.table.regions.size(), " regions, ",
                  data.table.indicators.size(), " indicators");
    });

    if (cfg.augment_count > 0) {
        stage("augment", [&] {
            std::vector<seir::SeirParams> variants = cfg.augment_params;
            if (variants.empty())
                variants.push_back(seir_from(nlohmann::json::object(), "<defaults>"));
            for (auto &p : variants) {
                if (p.days == 0)
                    p.days = cfg.window - 1;
                if (p.days + 1 < cfg.window)
                    throw ConfigError("augment params cover fewer days than the window");
            }
            const std::string tmpl = cfg.augment_template.empty() ? data.table.regions.front()
                                                                  : cfg.augment_template;
            data.augmentation =
                seir::synthesize_samples(data.table, tmpl, variants, cfg.augment_count,
                                         mix_seed(cfg.seed, kAugmentStream), cfg.augment_jitter);
            seir::append_samples(data.table, data.epidemic, data.augmentation);
            log::info("augment: +", data.augmentation.samples.size(), " synthetic regions");
        });
    }

    stage("assemble", [&] {
        data.dataset = ingest::assemble_dataset(data.table, data.epidemic, cfg.window);
    });

    return data;
}

StageData prepare(const PipelineConfig &cfg) {
    StageData data = prepare_raw(cfg);

    stage("select", [&] {
        const std::size_t d = data.dataset.x.cols();
        const auto scaled = featureprep::standard_scale(data.dataset.x);
        const auto target = selection_target(data.dataset.y);
        const std::size_t fm = std::min(cfg.filter_m, d);
        const std::size_t wm = std::min(cfg.wrapper_m, d);

        data.selection.pearson_r = featureprep::pearson_scores(scaled.values, target);
        data.selection.pearson = featureprep::pearson_select(scaled.values, target, fm);
        data.selection.fscore = featureprep::fscore_select(scaled.values, target, fm);
        data.selection.rfe = featureprep::rfe_select(scaled.values, target, wm, cfg.rfe_lambda);
        featureprep::ForestConfig forest;
        forest.n_trees = cfg.forest_trees;
        forest.max_depth = cfg.forest_depth;
        forest.mtry = cfg.forest_mtry;
        forest.seed = mix_seed(cfg.seed, kForestStream);
        data.selection.forest =
            featureprep::forest_importance(scaled.values, target, wm, forest);

        const std::array<featureprep::SelectionResult, 2> filters = {data.selection.pearson,
                                                                     data.selection.fscore};
        const std::array<featureprep::SelectionResult, 2> wrappers = {data.selection.rfe,
                                                                      data.selection.forest};
        data.selection.selected =
            featureprep::hybrid_select(filters, wrappers, std::min(cfg.fallback_m, d));
        for (std::size_t f : data.selection.selected)
            data.features.push_back(data.dataset.features[f]);
        log::info("select: kept ", data.features.size(), " of ", d, " features");
    });

    stage("tasks", [&] {
        const Matrix x = data.dataset.x.take_cols(data.selection.selected);
        data.task = multitask::build_tasks(x, data.dataset.y, cfg.group_size);
    });

    return data;
}

namespace {

multitask::ExperimentOptions experiment_options(const PipelineConfig &cfg) {
    multitask::ExperimentOptions opts;
    opts.cv_folds = cfg.cv_folds;
    opts.test_fraction = cfg.test_fraction;
    opts.final_solver = cfg.solver;
    return opts;
}

std::vector<solvers::PenaltyConfig> model_grid(const PipelineConfig &cfg,
                                               solvers::Model model) {
    return multitask::make_grid(model, axis_values(cfg.l1), axis_values(cfg.l2),
                                axis_values(cfg.l3));
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig &cfg) {
    StageData data = prepare(cfg);
    PipelineResult result;

    const auto emit = [&](const std::filesystem::path &name, const std::string &content) {
        const auto path = cfg.out / name;
        stage("report", [&] { write_text(path, content); });
        result.artifacts.push_back(path);
    };

    stage("experiments", [&] {
        const auto opts = experiment_options(cfg);
        for (solvers::Model model : cfg.models) {
            const auto grid = model_grid(cfg, model);
            log::info("experiments: ", solvers::model_name(model), ", ", cfg.n_runs,
                      " runs over ", grid.size(), " grid points");
            auto summary =
                multitask::repeat_experiments(data.task, grid, cfg.n_runs, cfg.seed, opts);
            result.models.push_back(report::build_evidence(std::move(summary), cfg.top_p));
        }
    });

    if (cfg.strict) {
        stage("experiments", [&] {
            for (const auto &ev : result.models)
                for (std::size_t r = 0; r < ev.summary.runs.size(); ++r)
                    if (!ev.summary.runs[r].converged)
                        throw SolverError("run " + std::to_string(r) + " of " +
                                          solvers::model_name(ev.summary.model) +
                                          " did not converge");
        });
    }

    std::size_t rep = 0;
    for (std::size_t m = 0; m < cfg.models.size(); ++m)
        if (cfg.models[m] == solvers::Model::fsgl)
            rep = m;
    result.representative = solvers::model_name(cfg.models[rep]);

    emit("selection.csv", report::selection_csv(data.dataset.features, data.selection));
    if (!data.augmentation.samples.empty())
        emit("augmentation.json", seir::augmentation_manifest(data.augmentation));
    emit("global_importance.csv", report::global_importance_csv(data.features, result.models));
    emit("model_comparison.csv", report::model_comparison_csv(result.models));
    emit("local_importance.csv",
         report::local_importance_csv(data.features, result.models[rep]));
    emit("local_importance.svg",
         report::local_importance_svg(data.features, result.models[rep], cfg.heatmap));

    report::ReportMeta meta;
    meta.window = cfg.window;
    meta.group_size = cfg.group_size;
    meta.n_runs = cfg.n_runs;
    meta.seed = cfg.seed;
    meta.representative = result.representative;
    emit("report.json", report::report_json(meta, data.features, result.models));

    if (!cfg.ablate.empty()) {
        const auto ablation_rows = stage("ablation", [&] {
            const solvers::Model model = cfg.models[rep];
            const auto opts = experiment_options(cfg);
            const auto grid = model_grid(cfg, model);
            std::vector<report::AblationRow> rows;

            report::AblationRow base;
            base.label = "all";
            base.sector_used.fill(0);
            for (const auto &f : data.features)
                base.sector_used[static_cast<std::size_t>(f.sector)] = 1;
            base.runs = cfg.n_runs;
            base.rmse_mean = result.models[rep].summary.rmse_mean;
            base.rmse_std = result.models[rep].summary.rmse_std;
            rows.push_back(base);

            for (const auto &mask : cfg.ablate) {
                const std::set<ingest::Sector> dropped(mask.begin(), mask.end());
                std::vector<std::size_t> keep_cols;
                report::AblationRow row;
                row.sector_used.fill(0);
                for (std::size_t f = 0; f < data.features.size(); ++f) {
                    if (dropped.count(data.features[f].sector))
                        continue;
                    keep_cols.push_back(data.selection.selected[f]);
                    row.sector_used[static_cast<std::size_t>(data.features[f].sector)] = 1;
                }
                if (keep_cols.empty())
                    throw DataError("ablation mask removes every selected feature");
                std::string label = "w/o ";
                for (std::size_t s = 0; s < mask.size(); ++s)
                    label += (s ? "," : "") + ingest::sector_name(mask[s]);
                row.label = label;
                row.runs = cfg.n_runs;

                const Matrix x = data.dataset.x.take_cols(keep_cols);
                const auto task = multitask::build_tasks(x, data.dataset.y, cfg.group_size);
                const auto summary =
                    multitask::repeat_experiments(task, grid, cfg.n_runs, cfg.seed, opts);
                row.rmse_mean = summary.rmse_mean;
                row.rmse_std = summary.rmse_std;
                rows.push_back(row);
            }
            return rows;
        });
        emit("ablation.csv", report::ablation_csv(ablation_rows));
    }

    log::info("pipeline: wrote ", result.artifacts.size(), " artifacts to ",
              cfg.out.string());
    return result;
}

void write_text(const std::filesystem::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw DataError("cannot create directory " + path.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DataError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw DataError("write failed for " + path.string());
}

} // namespace mtfl::pipeline

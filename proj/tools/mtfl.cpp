#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtfl/core/csv.hpp"
#include "mtfl/core/error.hpp"
#include "mtfl/core/log.hpp"
#include "mtfl/pipeline/pipeline.hpp"

namespace {

using namespace mtfl;

// Flags land here first; only flags the user actually passed override
// config fields, so file and command line compose cleanly.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> factors;
    std::optional<std::string> epidemic;
    std::optional<std::string> out;
    std::optional<std::string> model;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> window;
    std::optional<std::size_t> group_size;
    std::optional<std::size_t> augment;
    std::optional<std::string> ablate;
    bool trace = false;
    bool strict = false;
};

std::vector<solvers::Model> parse_models(const std::string &name) {
    if (name == "all")
        return {solvers::Model::ridge, solvers::Model::lasso, solvers::Model::fsgl};
    return {solvers::parse_model(name)};
}

pipeline::PipelineConfig resolve(const Overrides &o) {
    pipeline::PipelineConfig cfg;
    if (o.config)
        cfg = pipeline::load_config(*o.config);
    if (o.factors)
        cfg.factors = *o.factors;
    if (o.epidemic)
        cfg.epidemic = *o.epidemic;
    if (o.out)
        cfg.out = *o.out;
    if (o.model)
        cfg.models = parse_models(*o.model);
    if (o.runs)
        cfg.n_runs = *o.runs;
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.window)
        cfg.window = *o.window;
    if (o.group_size)
        cfg.group_size = *o.group_size;
    if (o.augment)
        cfg.augment_count = *o.augment;
    if (o.ablate) {
        std::vector<ingest::Sector> mask;
        std::string rest = *o.ablate;
        try {
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                mask.push_back(ingest::parse_sector(rest.substr(0, comma)));
                rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
            }
        } catch (const DataError &e) {
            throw ConfigError(std::string("--ablate: ") + e.what());
        }
        cfg.ablate = {mask};
    }
    if (o.trace) {
        cfg.trace = true;
        log::set_threshold(log::Level::debug);
    }
    if (o.strict)
        cfg.strict = true;
    return cfg;
}

void register_common(CLI::App *sub, Overrides &o) {
    sub->fallthrough();
    static_cast<void>(o);
}

std::string fmt(double v) { return csv::format_number(v); }

// feature,sector,task_1..task_k with signed weights.
std::string weights_csv(std::span<const ingest::Indicator> features, const Matrix &w) {
    std::string out = "feature,sector";
    for (std::size_t t = 0; t < w.cols(); ++t)
        out += ",task_" + std::to_string(t + 1);
    out += '\n';
    for (std::size_t f = 0; f < w.rows(); ++f) {
        out += csv::escape(features[f].name) + ',' +
               ingest::sector_name(features[f].sector);
        for (std::size_t t = 0; t < w.cols(); ++t)
            out += ',' + fmt(w(f, t));
        out += '\n';
    }
    return out;
}

int cmd_ingest(const pipeline::PipelineConfig &cfg) {
    const auto data = pipeline::prepare_raw(cfg);
    std::cout << "regions: " << data.dataset.regions.size() << '\n'
              << "indicators: " << data.dataset.features.size() << '\n'
              << "window: " << cfg.window << " days in groups of " << cfg.group_size << '\n';
    if (!data.augmentation.samples.empty())
        std::cout << "synthetic regions: " << data.augmentation.samples.size() << '\n';
    return 0;
}

int cmd_select(const pipeline::PipelineConfig &cfg) {
    const auto data = pipeline::prepare(cfg);
    const auto path = cfg.out / "selection.csv";
    pipeline::write_text(path, report::selection_csv(data.dataset.features, data.selection));
    std::cout << "selected " << data.features.size() << " of "
              << data.dataset.features.size() << " features\n";
    for (const auto &f : data.features)
        std::cout << "  " << f.name << " (" << ingest::sector_name(f.sector) << ")\n";
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_fit(const pipeline::PipelineConfig &cfg) {
    if (cfg.models.size() != 1)
        throw ConfigError("fit needs exactly one --model (ridge, lasso or fsgl)");
    const auto data = pipeline::prepare(cfg);
    const auto grid = multitask::make_grid(
        cfg.models[0], multitask::log_grid(cfg.l1.lo, cfg.l1.hi, cfg.l1.points),
        multitask::log_grid(cfg.l2.lo, cfg.l2.hi, cfg.l2.points),
        multitask::log_grid(cfg.l3.lo, cfg.l3.hi, cfg.l3.points));
    multitask::ExperimentOptions opts;
    opts.cv_folds = cfg.cv_folds;
    opts.test_fraction = cfg.test_fraction;
    opts.final_solver = cfg.solver;
    const auto run = multitask::run_experiment(data.task, grid, cfg.seed, opts);

    const auto path = cfg.out / "weights.csv";
    pipeline::write_text(path, weights_csv(data.features, run.weights));
    std::cout << "model: " << solvers::model_name(cfg.models[0]) << '\n'
              << "chosen: lambda1=" << fmt(run.chosen.lambda1)
              << " lambda2=" << fmt(run.chosen.lambda2)
              << " lambda3=" << fmt(run.chosen.lambda3) << '\n'
              << "test_rmse: " << fmt(run.test_rmse) << '\n'
              << "train_rmse: " << fmt(run.train_rmse) << '\n'
              << "converged: " << (run.converged ? "yes" : "no") << '\n'
              << "wrote " << path.string() << '\n';
    if (cfg.strict && !run.converged)
        throw SolverError("fit did not converge within the iteration budget");
    return 0;
}

std::vector<report::ModelEvidence> run_families(const pipeline::PipelineConfig &cfg,
                                                const pipeline::StageData &data) {
    multitask::ExperimentOptions opts;
    opts.cv_folds = cfg.cv_folds;
    opts.test_fraction = cfg.test_fraction;
    opts.final_solver = cfg.solver;
    std::vector<report::ModelEvidence> models;
    for (solvers::Model model : cfg.models) {
        const auto grid = multitask::make_grid(
            model, multitask::log_grid(cfg.l1.lo, cfg.l1.hi, cfg.l1.points),
            multitask::log_grid(cfg.l2.lo, cfg.l2.hi, cfg.l2.points),
            multitask::log_grid(cfg.l3.lo, cfg.l3.hi, cfg.l3.points));
        auto summary = multitask::repeat_experiments(data.task, grid, cfg.n_runs, cfg.seed, opts);
        models.push_back(report::build_evidence(std::move(summary), cfg.top_p));
    }
    return models;
}

int cmd_experiment(const pipeline::PipelineConfig &cfg) {
    const auto data = pipeline::prepare(cfg);
    const auto models = run_families(cfg, data);
    const auto path = cfg.out / "model_comparison.csv";
    pipeline::write_text(path, report::model_comparison_csv(models));
    for (const auto &ev : models)
        std::cout << solvers::model_name(ev.summary.model) << ": rmse "
                  << fmt(ev.summary.rmse_mean) << " +- " << fmt(ev.summary.rmse_std) << " over "
                  << ev.summary.runs.size() << " runs\n";
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_vote(const pipeline::PipelineConfig &cfg) {
    const auto data = pipeline::prepare(cfg);
    const auto models = run_families(cfg, data);
    const auto path = cfg.out / "global_importance.csv";
    pipeline::write_text(path, report::global_importance_csv(data.features, models));
    for (const auto &ev : models) {
        std::cout << solvers::model_name(ev.summary.model) << " top features:\n";
        const std::size_t top = std::min<std::size_t>(cfg.top_p, ev.stable.order.size());
        for (std::size_t pos = 0; pos < top; ++pos) {
            const std::size_t f = ev.stable.order[pos];
            std::cout << "  " << pos + 1 << ". " << data.features[f].name << " (score "
                      << fmt(ev.stable.scores[f]) << ")\n";
        }
    }
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_run(const pipeline::PipelineConfig &cfg) {
    const auto result = pipeline::run_pipeline(cfg);
    for (const auto &path : result.artifacts)
        std::cout << "wrote " << path.string() << '\n';
    std::cout << "representative model: " << result.representative << '\n';
    return 0;
}

int cmd_simulate(const pipeline::PipelineConfig &cfg) {
    seir::SeirParams params =
        cfg.augment_params.empty() ? seir::default_params() : cfg.augment_params.front();
    if (params.days == 0)
        params.days = cfg.window;
    const auto traj = seir::simulate_seir(params);

    std::string text = "day,s,e,i,r,cum_cases,cum_deaths\n";
    for (std::size_t d = 0; d < traj.s.size(); ++d) {
        text += std::to_string(d) + ',' + fmt(traj.s[d]) + ',' + fmt(traj.e[d]) + ',' +
                fmt(traj.i[d]) + ',' + fmt(traj.r[d]) + ',' + fmt(traj.cum_cases[d]) + ',' +
                fmt(traj.cum_deaths[d]) + '\n';
    }
    const auto path = cfg.out / "seir_trajectory.csv";
    pipeline::write_text(path, text);
    std::cout << "days: " << params.days << '\n'
              << "final cumulative cases: " << fmt(traj.cum_cases.back()) << '\n'
              << "final cumulative deaths: " << fmt(traj.cum_deaths.back()) << '\n'
              << "final cfr: " << fmt(traj.cum_deaths.back() / traj.cum_cases.back()) << '\n'
              << "wrote " << path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"mtfl: multi-task factor analysis of case-fatality-rate series"};
    app.require_subcommand(1);

    Overrides o;
    app.add_option("--config", o.config, "JSON config file; flags override its fields");
    app.add_option("--factors", o.factors, "long-format factor CSV");
    app.add_option("--epidemic", o.epidemic, "cumulative cases/deaths CSV");
    app.add_option("--out", o.out, "artifact output directory (default: out)");
    app.add_option("--model", o.model, "ridge, lasso, fsgl or all (default: all)");
    app.add_option("--runs", o.runs, "repeated experiments per model (default: 100)");
    app.add_option("--seed", o.seed, "master seed; every stream derives from it");
    app.add_option("--window", o.window, "observed days per region (default: 42)");
    app.add_option("--group-size", o.group_size, "tasks per learning stage (default: 7)");
    app.add_option("--augment", o.augment, "append N simulated regions before fitting");
    app.add_option("--ablate", o.ablate, "comma-separated sectors to drop in ablation");
    app.add_flag("--trace", o.trace, "verbose stage logging to stderr");
    app.add_flag("--strict", o.strict, "treat solver non-convergence as an error");

    const auto ingest_cmd = app.add_subcommand("ingest", "load, impute and assemble the data");
    const auto select_cmd = app.add_subcommand("select", "hybrid feature selection audit");
    const auto fit_cmd = app.add_subcommand("fit", "one cross-validated fit of one model");
    const auto experiment_cmd =
        app.add_subcommand("experiment", "repeated experiments with rmse summaries");
    const auto vote_cmd =
        app.add_subcommand("vote", "two-stage stability vote over repeated experiments");
    const auto report_cmd =
        app.add_subcommand("report", "full pipeline with every artifact (alias of run)");
    const auto simulate_cmd =
        app.add_subcommand("simulate", "write one SEIR trajectory as CSV");
    const auto run_cmd = app.add_subcommand("run", "full pipeline with every artifact");
    for (CLI::App *sub : {ingest_cmd, select_cmd, fit_cmd, experiment_cmd, vote_cmd,
                          report_cmd, simulate_cmd, run_cmd})
        register_common(sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help / --version
        std::cerr << "mtfl: " << e.what() << '\n';
        return 2;
    }

    try {
        pipeline::PipelineConfig cfg = resolve(o);
        if (fit_cmd->parsed() && !o.model)
            cfg.models = {solvers::Model::fsgl};
        if (ingest_cmd->parsed())
            return cmd_ingest(cfg);
        if (select_cmd->parsed())
            return cmd_select(cfg);
        if (fit_cmd->parsed())
            return cmd_fit(cfg);
        if (experiment_cmd->parsed())
            return cmd_experiment(cfg);
        if (vote_cmd->parsed())
            return cmd_vote(cfg);
        if (simulate_cmd->parsed())
            return cmd_simulate(cfg);
        return cmd_run(cfg); // run and report
    } catch (const ConfigError &e) {
        std::cerr << "mtfl: config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError &e) {
        std::cerr << "mtfl: data error: " << e.what() << '\n';
        return 3;
    } catch (const SolverError &e) {
        std::cerr << "mtfl: solver error: " << e.what() << '\n';
        return 4;
    }
}

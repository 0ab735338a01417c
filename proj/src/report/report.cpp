#include "mtfl/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mtfl/core/csv.hpp"
#include "mtfl/core/error.hpp"
#include "mtfl/solvers/solvers.hpp"

namespace mtfl::report {

namespace {

std::string join_row(const std::vector<std::string> &fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += csv::escape(fields[i]);
    }
    line += '\n';
    return line;
}

std::string num(double v) { return csv::format_number(v); }

void check_universe(std::span<const ingest::Indicator> features, const ModelEvidence &ev) {
    const std::size_t d = features.size();
    if (ev.stable.order.size() != d || ev.votes.task_counts.size() != d)
        throw DataError("report: evidence does not match the feature universe");
    if (ev.votes.n_polls == 0)
        throw DataError("report: evidence holds no polls");
    if (ev.best_run >= ev.summary.runs.size())
        throw DataError("report: best-run index out of range");
    if (ev.summary.runs[ev.best_run].weights.rows() != d)
        throw DataError("report: weight rows do not match the feature universe");
}

struct Color {
    int r, g, b;
};

Color lerp(Color a, Color b, double t) {
    const auto ch = [&](int x, int y) {
        return static_cast<int>(std::lround(x + (y - x) * t));
    };
    return {ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b)};
}

std::string hex(Color c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

// Sequential: light to dark blue over [0, 1]. Diverging: blue below
// zero, white at zero, red above, over [-1, 1].
std::string cell_color(double w, double denom, HeatScale scale) {
    constexpr Color kLight{247, 251, 255}, kDark{8, 48, 107};
    constexpr Color kWhite{247, 247, 247}, kBlue{33, 102, 172}, kRed{178, 24, 43};
    if (scale == HeatScale::sequential)
        return hex(lerp(kLight, kDark, std::min(1.0, std::fabs(w) / denom)));
    const double u = std::clamp(w / denom, -1.0, 1.0);
    return hex(u < 0.0 ? lerp(kWhite, kBlue, -u) : lerp(kWhite, kRed, u));
}

std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

} // namespace

ModelEvidence build_evidence(multitask::ExperimentSummary summary, std::size_t top_p,
                             double eps) {
    if (summary.runs.empty())
        throw ConfigError("build_evidence: summary holds no runs");
    ModelEvidence ev;
    std::vector<std::vector<std::size_t>> rankings;
    rankings.reserve(summary.runs.size());
    for (const auto &run : summary.runs) {
        auto vote = voting::task_vote(run.weights, eps);
        ev.votes.add(vote);
        rankings.push_back(std::move(vote.ranking));
    }
    ev.stable = voting::aggregate_ranking(rankings);
    const std::size_t p = std::min(top_p, ev.stable.order.size());
    ev.best_run = voting::select_best_model(ev.stable, summary.runs, p, eps);
    ev.summary = std::move(summary);
    return ev;
}

std::string global_importance_csv(std::span<const ingest::Indicator> features,
                                  std::span<const ModelEvidence> models) {
    std::string out =
        join_row({"model", "rank", "feature", "sector", "stage1_mean_count", "borda_score"});
    for (const ModelEvidence &ev : models) {
        check_universe(features, ev);
        const std::string model = solvers::model_name(ev.summary.model);
        const double polls = static_cast<double>(ev.votes.n_polls);
        for (std::size_t pos = 0; pos < ev.stable.order.size(); ++pos) {
            const std::size_t f = ev.stable.order[pos];
            out += join_row({model, std::to_string(pos + 1), features[f].name,
                             ingest::sector_name(features[f].sector),
                             num(static_cast<double>(ev.votes.task_counts[f]) / polls),
                             num(ev.stable.scores[f])});
        }
    }
    return out;
}

std::string model_comparison_csv(std::span<const ModelEvidence> models) {
    std::string out = join_row({"model", "runs", "rmse_mean", "rmse_std", "phase_prior_mean",
                                "phase_middle_mean", "phase_last_mean"});
    for (const ModelEvidence &ev : models) {
        const auto &s = ev.summary;
        out += join_row({solvers::model_name(s.model), std::to_string(s.runs.size()),
                         num(s.rmse_mean), num(s.rmse_std), num(s.per_phase_mean[0]),
                         num(s.per_phase_mean[1]), num(s.per_phase_mean[2])});
    }
    return out;
}

std::string local_importance_csv(std::span<const ingest::Indicator> features,
                                 const ModelEvidence &ev) {
    check_universe(features, ev);
    const Matrix &w = ev.summary.runs[ev.best_run].weights;
    std::vector<std::string> head = {"feature", "sector"};
    for (std::size_t t = 0; t < w.cols(); ++t)
        head.push_back("task_" + std::to_string(t + 1));
    std::string out = join_row(head);
    for (std::size_t f : ev.stable.order) {
        std::vector<std::string> row = {features[f].name,
                                        ingest::sector_name(features[f].sector)};
        for (std::size_t t = 0; t < w.cols(); ++t)
            row.push_back(num(std::fabs(w(f, t))));
        out += join_row(row);
    }
    return out;
}

std::string local_importance_svg(std::span<const ingest::Indicator> features,
                                 const ModelEvidence &ev, HeatScale scale) {
    check_universe(features, ev);
    const Matrix &w = ev.summary.runs[ev.best_run].weights;
    const std::size_t d = w.rows(), k = w.cols();
    constexpr int kCell = 14, kLeft = 232, kTop = 48, kRight = 96, kBottom = 26;
    const int grid_w = static_cast<int>(k) * kCell;
    const int grid_h = static_cast<int>(d) * kCell;
    const int width = kLeft + grid_w + kRight;
    const int height = kTop + grid_h + kBottom;

    double max_abs = 0.0;
    for (std::size_t f = 0; f < d; ++f)
        for (std::size_t t = 0; t < k; ++t)
            max_abs = std::max(max_abs, std::fabs(w(f, t)));
    const double denom = std::max(max_abs, 1e-12);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(kLeft) +
           "\" y=\"18\" font-family=\"monospace\" font-size=\"13\">Local importance (" +
           solvers::model_name(ev.summary.model) + ")</text>\n";

    for (std::size_t pos = 0; pos < d; ++pos) {
        const std::size_t f = ev.stable.order[pos];
        const int y = kTop + static_cast<int>(pos) * kCell;
        svg += "<text x=\"" + std::to_string(kLeft - 8) + "\" y=\"" +
               std::to_string(y + kCell - 3) +
               "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" +
               xml_escape(features[f].name) + "</text>\n";
        for (std::size_t t = 0; t < k; ++t) {
            const int x = kLeft + static_cast<int>(t) * kCell;
            const std::string fill = cell_color(scale == HeatScale::sequential
                                                    ? std::fabs(w(f, t))
                                                    : w(f, t),
                                                denom, scale);
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                   "\" width=\"" + std::to_string(kCell - 1) + "\" height=\"" +
                   std::to_string(kCell - 1) + "\" fill=\"" + fill + "\"/>\n";
        }
    }

    for (std::size_t t = 0; t < k; t += 7) {
        const int x = kLeft + static_cast<int>(t) * kCell + kCell / 2;
        svg += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(kTop - 6) +
               "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">" +
               std::to_string(t + 1) + "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(kLeft + grid_w / 2) + "\" y=\"" +
           std::to_string(kTop + grid_h + 18) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">tasks (time "
           "order)</text>\n";

    // Legend: five swatches over the active range.
    const int lx = kLeft + grid_w + 20;
    for (int s = 0; s < 5; ++s) {
        const double t = static_cast<double>(s) / 4.0;
        const double value =
            scale == HeatScale::sequential ? t * denom : (2.0 * t - 1.0) * denom;
        const int y = kTop + s * (kCell + 6);
        svg += "<rect x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(y) +
               "\" width=\"" + std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) +
               "\" fill=\"" + cell_color(value, denom, scale) + "\"/>\n";
        svg += "<text x=\"" + std::to_string(lx + kCell + 6) + "\" y=\"" +
               std::to_string(y + kCell - 3) +
               "\" font-family=\"monospace\" font-size=\"10\">" + short_num(value) +
               "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
    std::vector<std::string> head = {"no", "label"};
    for (std::size_t s = 0; s < ingest::kSectorCount; ++s)
        head.push_back(ingest::sector_name(static_cast<ingest::Sector>(s)));
    head.insert(head.end(), {"runs", "rmse_mean", "rmse_std"});
    std::string out = join_row(head);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> row = {std::to_string(i + 1), rows[i].label};
        for (std::size_t s = 0; s < ingest::kSectorCount; ++s)
            row.push_back(rows[i].sector_used[s] ? "1" : "0");
        row.push_back(std::to_string(rows[i].runs));
        row.push_back(num(rows[i].rmse_mean));
        row.push_back(num(rows[i].rmse_std));
        out += join_row(row);
    }
    return out;
}

std::string selection_csv(std::span<const ingest::Indicator> features,
                          const SelectionEvidence &ev) {
    const std::size_t d = features.size();
    if (ev.pearson_r.size() != d || ev.pearson.scores.size() != d ||
        ev.fscore.scores.size() != d || ev.rfe.scores.size() != d ||
        ev.forest.scores.size() != d)
        throw DataError("selection_csv: evidence does not match the feature universe");
    std::string out = join_row({"feature", "sector", "pearson_r", "f_stat", "rfe_rank",
                                "forest_importance", "hybrid_selected"});
    for (std::size_t f = 0; f < d; ++f) {
        const bool kept = std::binary_search(ev.selected.begin(), ev.selected.end(), f);
        // rfe scores rise with survival time; invert into a 1-based rank.
        const double rfe_rank = static_cast<double>(d) - ev.rfe.scores[f] + 1.0;
        out += join_row({features[f].name, ingest::sector_name(features[f].sector),
                         num(ev.pearson_r[f]), num(ev.fscore.scores[f]), num(rfe_rank),
                         num(ev.forest.scores[f]), kept ? "1" : "0"});
    }
    return out;
}

std::string report_json(const ReportMeta &meta, std::span<const ingest::Indicator> features,
                        std::span<const ModelEvidence> models) {
    nlohmann::json doc;
    doc["window"] = meta.window;
    doc["group_size"] = meta.group_size;
    doc["runs"] = meta.n_runs;
    doc["seed"] = meta.seed;
    doc["representative"] = meta.representative;
    doc["features"] = nlohmann::json::array();
    for (const auto &f : features)
        doc["features"].push_back(
            {{"name", f.name}, {"sector", ingest::sector_name(f.sector)}});
    doc["models"] = nlohmann::json::object();
    for (const ModelEvidence &ev : models) {
        check_universe(features, ev);
        const auto &best = ev.summary.runs[ev.best_run];
        nlohmann::json entry;
        entry["rmse_mean"] = ev.summary.rmse_mean;
        entry["rmse_std"] = ev.summary.rmse_std;
        entry["per_phase_mean"] = ev.summary.per_phase_mean;
        entry["best_run"] = {{"index", ev.best_run},
                             {"seed", best.seed},
                             {"test_rmse", best.test_rmse},
                             {"train_rmse", best.train_rmse},
                             {"lambda1", best.chosen.lambda1},
                             {"lambda2", best.chosen.lambda2},
                             {"lambda3", best.chosen.lambda3},
                             {"converged", best.converged}};
        entry["top_features"] = nlohmann::json::array();
        const std::size_t top = std::min<std::size_t>(5, ev.stable.order.size());
        for (std::size_t pos = 0; pos < top; ++pos)
            entry["top_features"].push_back(features[ev.stable.order[pos]].name);
        doc["models"][solvers::model_name(ev.summary.model)] = std::move(entry);
    }
    return doc.dump(2) + "\n";
}

} // namespace mtfl::report

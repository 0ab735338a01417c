#include "mtfl/featureprep/featureprep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "mtfl/core/error.hpp"
#include "mtfl/core/log.hpp"
#include "mtfl/solvers/solvers.hpp"

namespace mtfl::featureprep {

ScaledMatrix standard_scale(const Matrix &x, std::span<const std::size_t> fit_rows) {
    if (fit_rows.empty())
        throw DataError("standard_scale: empty fit-row set");
    const std::size_t d = x.cols();
    const double n_fit = static_cast<double>(fit_rows.size());

    ScaledMatrix out;
    out.values = Matrix(x.rows(), d);
    out.means.resize(d);
    out.stds.resize(d);
    out.constant.assign(d, 0);

    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (const std::size_t i : fit_rows)
            sum += x(i, j);
        const double mean = sum / n_fit;
        double ss = 0.0;
        for (const std::size_t i : fit_rows)
            ss += (x(i, j) - mean) * (x(i, j) - mean);
        const double sd = std::sqrt(ss / n_fit);

        out.means[j] = mean;
        out.stds[j] = sd;
        if (sd <= 1e-12 * std::max(1.0, std::fabs(mean))) {
            out.stds[j] = 0.0;
            out.constant[j] = 1;
            for (std::size_t i = 0; i < x.rows(); ++i)
                out.values(i, j) = 0.0;
        } else {
            for (std::size_t i = 0; i < x.rows(); ++i)
                out.values(i, j) = (x(i, j) - mean) / sd;
        }
    }
    return out;
}

ScaledMatrix standard_scale(const Matrix &x) {
    std::vector<std::size_t> all(x.rows());
    std::iota(all.begin(), all.end(), 0);
    return standard_scale(x, all);
}

std::vector<double> pearson_scores(const Matrix &x, std::span<const double> y) {
    const std::size_t n = x.rows();
    if (n < 3)
        throw DataError("pearson_scores: need at least 3 samples");
    if (y.size() != n)
        throw DataError("pearson_scores: y length does not match row count");

    double y_mean = 0.0;
    for (const double v : y)
        y_mean += v;
    y_mean /= static_cast<double>(n);
    double y_ss = 0.0;
    for (const double v : y)
        y_ss += (v - y_mean) * (v - y_mean);

    std::vector<double> r(x.cols(), 0.0);
    if (y_ss == 0.0)
        return r; // constant target: no linear signal anywhere
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double x_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            x_mean += x(i, j);
        x_mean /= static_cast<double>(n);
        double x_ss = 0.0, cross = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = x(i, j) - x_mean;
            x_ss += dx * dx;
            cross += dx * (y[i] - y_mean);
        }
        if (x_ss == 0.0)
            continue; // constant column stays at 0
        r[j] = std::clamp(cross / std::sqrt(x_ss * y_ss), -1.0, 1.0);
    }
    return r;
}

double f_from_r(double r, std::size_t n) {
    const double r2 = r * r;
    if (r2 >= 1.0)
        return std::numeric_limits<double>::max();
    return static_cast<double>(n - 2) * r2 / (1.0 - r2);
}

std::vector<double> f_scores(const Matrix &x, std::span<const double> y) {
    auto scores = pearson_scores(x, y);
    for (double &s : scores)
        s = f_from_r(s, x.rows());
    return scores;
}

std::string method_name(Method m) {
    switch (m) {
    case Method::pearson: return "pearson";
    case Method::fscore: return "fscore";
    case Method::rfe: return "rfe";
    case Method::forest: return "forest";
    }
    throw ConfigError("unknown selection method");
}

std::vector<std::size_t> top_m(std::span<const double> scores, std::size_t m) {
    if (m > scores.size())
        throw ConfigError("top_m: m exceeds the feature count");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b]; // stable keeps index order on ties
    });
    order.resize(m);
    return order;
}

namespace {

SelectionResult from_scores(Method method, std::vector<double> scores, std::size_t m) {
    if (m == 0)
        throw ConfigError(method_name(method) + ": selection size must be positive");
    SelectionResult out;
    out.method = method;
    out.selected = top_m(scores, m);
    out.scores = std::move(scores);
    return out;
}

std::vector<double> abs_scores(std::vector<double> v) {
    for (double &x : v)
        x = std::fabs(x);
    return v;
}

} // namespace

SelectionResult pearson_select(const Matrix &x, std::span<const double> y, std::size_t m) {
    return from_scores(Method::pearson, abs_scores(pearson_scores(x, y)), m);
}

SelectionResult fscore_select(const Matrix &x, std::span<const double> y, std::size_t m) {
    return from_scores(Method::fscore, f_scores(x, y), m);
}

SelectionResult rfe_select(const Matrix &x, std::span<const double> y, std::size_t m,
                           double ridge_lambda) {
    const std::size_t d = x.cols();
    if (m == 0)
        throw ConfigError("rfe_select: selection size must be positive");
    if (m > d)
        throw ConfigError("rfe_select: m exceeds the feature count");
    if (ridge_lambda <= 0.0)
        throw ConfigError("rfe_select: ridge lambda must be positive");
    if (y.size() != x.rows())
        throw DataError("rfe_select: y length does not match row count");

    Matrix y_col(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i)
        y_col(i, 0) = y[i];

    std::vector<std::size_t> survivors(d);
    std::iota(survivors.begin(), survivors.end(), 0);
    std::vector<double> scores(d, 0.0);
    std::size_t eliminated = 0;

    auto ridge_coefs = [&](const std::vector<std::size_t> &cols) {
        const Matrix sub = x.take_cols(cols);
        return solvers::fit_ridge(sub, y_col, ridge_lambda).weights;
    };

    while (survivors.size() > m) {
        const Matrix w = ridge_coefs(survivors);
        // Drop the smallest |coefficient|; ties drop the later feature so
        // earlier canonical indices win.
        std::size_t drop = 0;
        for (std::size_t j = 1; j < survivors.size(); ++j)
            if (std::fabs(w(j, 0)) <= std::fabs(w(drop, 0)))
                drop = j;
        ++eliminated;
        scores[survivors[drop]] = static_cast<double>(eliminated);
        survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    // Survivors rank above every eliminated feature, ordered by the final
    // fit's |coefficient|.
    const Matrix w = ridge_coefs(survivors);
    std::vector<std::size_t> order(survivors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(w(a, 0)) < std::fabs(w(b, 0));
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        scores[survivors[order[pos]]] = static_cast<double>(eliminated + 1 + pos);

    SelectionResult out;
    out.method = Method::rfe;
    out.selected = top_m(scores, m);
    out.scores = std::move(scores);
    return out;
}

std::vector<std::size_t> hybrid_select(std::span<const SelectionResult> filters,
                                       std::span<const SelectionResult> wrappers,
                                       std::size_t fallback_m) {
    if (filters.size() != 2)
        throw ConfigError("hybrid_select: expected exactly 2 filter results");
    if (wrappers.size() < 2)
        throw ConfigError("hybrid_select: expected at least 2 wrapper results");
    const std::size_t d = filters[0].scores.size();
    for (const auto &r : filters)
        if (r.scores.size() != d)
            throw DataError("hybrid_select: mismatched feature universes");
    for (const auto &r : wrappers)
        if (r.scores.size() != d)
            throw DataError("hybrid_select: mismatched feature universes");

    auto as_set = [](const SelectionResult &r) {
        return std::set<std::size_t>(r.selected.begin(), r.selected.end());
    };
    auto intersect = [](const std::set<std::size_t> &a, const std::set<std::size_t> &b) {
        std::set<std::size_t> out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::inserter(out, out.begin()));
        return out;
    };

    const std::set<std::size_t> filter_part = intersect(as_set(filters[0]), as_set(filters[1]));
    std::set<std::size_t> wrapper_part = as_set(wrappers[0]);
    for (std::size_t i = 1; i < wrappers.size(); ++i)
        wrapper_part = intersect(wrapper_part, as_set(wrappers[i]));

    std::set<std::size_t> combined = filter_part;
    combined.insert(wrapper_part.begin(), wrapper_part.end());
    if (!combined.empty())
        return {combined.begin(), combined.end()};

    // Degenerate disagreement: fall back to mean rank over every input.
    log::warn("hybrid_select: empty combination; falling back to mean-rank top ",
              fallback_m);
    if (fallback_m == 0 || fallback_m > d)
        throw ConfigError("hybrid_select: fallback size out of range");
    std::vector<double> mean_rank(d, 0.0);
    auto add_ranks = [&](const SelectionResult &r) {
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return r.scores[a] > r.scores[b];
        });
        for (std::size_t pos = 0; pos < d; ++pos)
            mean_rank[order[pos]] += static_cast<double>(pos);
    };
    for (const auto &r : filters)
        add_ranks(r);
    for (const auto &r : wrappers)
        add_ranks(r);
    // Lower mean rank = better; negate for top_m.
    for (double &v : mean_rank)
        v = -v;
    auto fallback = top_m(mean_rank, fallback_m);
    std::sort(fallback.begin(), fallback.end());
    return fallback;
}

} // namespace mtfl::featureprep

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtfl/core/matrix.hpp"

namespace mtfl::featureprep {

/// Columns standardized with statistics from fit_rows only, transform
/// applied to every row (no test leakage). A column constant on the fit
/// rows is flagged and mapped to all-zeros.
struct ScaledMatrix {
    Matrix values;
    std::vector<double> means;
    std::vector<double> stds; // population std; 0 for constant columns
    std::vector<std::uint8_t> constant;
};

ScaledMatrix standard_scale(const Matrix &x, std::span<const std::size_t> fit_rows);
ScaledMatrix standard_scale(const Matrix &x); // fit on all rows

/// Pearson r per column against y; a constant column scores 0 ("no
/// linear signal"). Requires >= 3 samples.
std::vector<double> pearson_scores(const Matrix &x, std::span<const double> y);

/// Univariate regression F statistic, (n-2) r^2 / (1 - r^2); |r| = 1
/// maps to a max-double sentinel so it ranks first. Strictly increasing
/// in r^2, so the F ranking always equals the |r| ranking.
double f_from_r(double r, std::size_t n);
std::vector<double> f_scores(const Matrix &x, std::span<const double> y);

enum class Method { pearson, fscore, rfe, forest };
std::string method_name(Method m);

struct SelectionResult {
    Method method = Method::pearson;
    std::vector<std::size_t> selected; // best-first, size = requested m
    std::vector<double> scores;        // per feature (all d), higher = better
};

/// Top-m indices by score descending, ties broken by index ascending.
std::vector<std::size_t> top_m(std::span<const double> scores, std::size_t m);

SelectionResult pearson_select(const Matrix &x, std::span<const double> y, std::size_t m);
SelectionResult fscore_select(const Matrix &x, std::span<const double> y, std::size_t m);

/// Recursive feature elimination: repeatedly ridge-fit the survivors and
/// drop the smallest-|coefficient| feature until m remain. Expects
/// standardized columns so magnitudes are comparable. Scores encode
/// elimination order (survivors highest, by final |coefficient|).
SelectionResult rfe_select(const Matrix &x, std::span<const double> y, std::size_t m,
                           double ridge_lambda = 1e-3);

struct ForestConfig {
    std::size_t n_trees = 200;
    std::size_t max_depth = 4;
    double bootstrap_ratio = 1.0;
    std::size_t min_leaf = 2;
    std::size_t mtry = 0; // features tried per split; 0 = floor(sqrt(d))
    std::uint64_t seed = 0;
};

/// Bagged CART regression trees with variance-reduction splits;
/// importance = total squared-error decrease credited to each feature,
/// normalized to sum 1. Per-tree seeds make the result independent of
/// tree scheduling. Requires >= 5 samples.
std::vector<double> forest_importances(const Matrix &x, std::span<const double> y,
                                       const ForestConfig &cfg);
SelectionResult forest_importance(const Matrix &x, std::span<const double> y, std::size_t m,
                                  const ForestConfig &cfg);

/// (filter_1 ∩ filter_2) ∪ (∩ all wrappers), returned sorted ascending.
/// An empty combination falls back to the top fallback_m features by
/// mean rank across all inputs, with a warning.
std::vector<std::size_t> hybrid_select(std::span<const SelectionResult> filters,
                                       std::span<const SelectionResult> wrappers,
                                       std::size_t fallback_m);

} // namespace mtfl::featureprep

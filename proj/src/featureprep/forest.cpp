#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mtfl/core/error.hpp"
#include "mtfl/core/parallel.hpp"
#include "mtfl/core/rng.hpp"
#include "mtfl/featureprep/featureprep.hpp"

namespace mtfl::featureprep {

namespace {

/// One CART regression tree grown on a bootstrap sample. Only the
/// impurity bookkeeping matters here — the forest exists to rank
/// features, so no predictor is kept.
class TreeGrower {
  public:
    TreeGrower(const Matrix &x, std::span<const double> y, const ForestConfig &cfg,
               std::size_t mtry, std::uint64_t seed)
        : x_(x), y_(y), cfg_(cfg), mtry_(mtry), rng_(seed), importance_(x.cols(), 0.0) {}

    std::vector<double> grow() {
        const std::size_t n = x_.rows();
        const auto draws = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(cfg_.bootstrap_ratio *
                                                     static_cast<double>(n))));
        std::vector<std::size_t> samples(draws);
        for (auto &s : samples)
            s = rng_.index(n);
        split_node(samples, 0);
        return std::move(importance_);
    }

  private:
    struct Split {
        std::size_t feature = 0;
        double threshold = 0.0;
        double gain = 0.0;
        bool found = false;
    };

    double node_sse(const std::vector<std::size_t> &samples) const {
        double sum = 0.0, sum_sq = 0.0;
        for (const std::size_t i : samples) {
            sum += y_[i];
            sum_sq += y_[i] * y_[i];
        }
        return sum_sq - sum * sum / static_cast<double>(samples.size());
    }

    Split best_split(const std::vector<std::size_t> &samples, double parent_sse) {
        // Candidate features: mtry distinct indices via partial shuffle.
        std::vector<std::size_t> features(x_.cols());
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t i = 0; i < mtry_; ++i)
            std::swap(features[i], features[i + rng_.index(features.size() - i)]);

        Split best;
        std::vector<std::pair<double, double>> points(samples.size()); // (value, y)
        for (std::size_t c = 0; c < mtry_; ++c) {
            const std::size_t f = features[c];
            for (std::size_t s = 0; s < samples.size(); ++s)
                points[s] = {x_(samples[s], f), y_[samples[s]]};
            std::sort(points.begin(), points.end());

            double left_sum = 0.0, left_sq = 0.0;
            double total_sum = 0.0, total_sq = 0.0;
            for (const auto &[v, t] : points) {
                total_sum += t;
                total_sq += t * t;
            }
            const auto count = points.size();
            for (std::size_t i = 0; i + 1 < count; ++i) {
                left_sum += points[i].second;
                left_sq += points[i].second * points[i].second;
                const std::size_t n_left = i + 1, n_right = count - n_left;
                if (n_left < cfg_.min_leaf || n_right < cfg_.min_leaf)
                    continue;
                if (points[i].first == points[i + 1].first)
                    continue; // can only cut between distinct values
                const double sse_left = left_sq - left_sum * left_sum /
                                                      static_cast<double>(n_left);
                const double right_sum = total_sum - left_sum;
                const double sse_right = (total_sq - left_sq) -
                                         right_sum * right_sum /
                                             static_cast<double>(n_right);
                const double gain = parent_sse - sse_left - sse_right;
                if (gain > best.gain + 1e-12) {
                    best.feature = f;
                    best.threshold = 0.5 * (points[i].first + points[i + 1].first);
                    best.gain = gain;
                    best.found = true;
                }
            }
        }
        return best;
    }

    void split_node(std::vector<std::size_t> &samples, std::size_t depth) {
        if (depth >= cfg_.max_depth || samples.size() < 2 * cfg_.min_leaf)
            return;
        const double parent_sse = node_sse(samples);
        if (parent_sse <= 1e-12)
            return; // pure node
        const Split split = best_split(samples, parent_sse);
        if (!split.found)
            return;
        importance_[split.feature] += split.gain;

        std::vector<std::size_t> left, right;
        for (const std::size_t i : samples)
            (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
        samples.clear();
        samples.shrink_to_fit();
        split_node(left, depth + 1);
        split_node(right, depth + 1);
    }

    const Matrix &x_;
    std::span<const double> y_;
    const ForestConfig &cfg_;
    std::size_t mtry_;
    Rng rng_;
    std::vector<double> importance_;
};

} // namespace

std::vector<double> forest_importances(const Matrix &x, std::span<const double> y,
                                       const ForestConfig &cfg) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n < 5)
        throw DataError("forest_importances: need at least 5 samples");
    if (y.size() != n)
        throw DataError("forest_importances: y length does not match row count");
    if (cfg.n_trees == 0 || cfg.min_leaf == 0 || cfg.bootstrap_ratio <= 0.0)
        throw ConfigError("forest_importances: invalid forest configuration");
    std::size_t mtry = cfg.mtry;
    if (mtry == 0)
        mtry = std::max<std::size_t>(1, static_cast<std::size_t>(
                                            std::floor(std::sqrt(static_cast<double>(d)))));
    mtry = std::min(mtry, d);

    // Per-tree slots, summed in tree order: identical for any scheduling.
    std::vector<std::vector<double>> per_tree(cfg.n_trees);
    parallel_for(cfg.n_trees, [&](std::size_t t) {
        TreeGrower tree(x, y, cfg, mtry, mix_seed(cfg.seed, t));
        per_tree[t] = tree.grow();
    });

    std::vector<double> total(d, 0.0);
    for (const auto &imp : per_tree)
        for (std::size_t j = 0; j < d; ++j)
            total[j] += imp[j];
    double sum = 0.0;
    for (const double v : total)
        sum += v;
    if (sum <= 0.0)
        return std::vector<double>(d, 1.0 / static_cast<double>(d));
    for (double &v : total)
        v /= sum;
    return total;
}

SelectionResult forest_importance(const Matrix &x, std::span<const double> y, std::size_t m,
                                  const ForestConfig &cfg) {
    if (m == 0)
        throw ConfigError("forest_importance: selection size must be positive");
    SelectionResult out;
    out.method = Method::forest;
    out.scores = forest_importances(x, y, cfg);
    out.selected = top_m(out.scores, m);
    return out;
}

} // namespace mtfl::featureprep

#include "radar/error.hpp"
#include "radar/learning.hpp"
#include "radar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radar {
namespace {

struct Candidate {
    double value;
    std::uint32_t sample;
};

struct Split {
    bool found = false;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    double child_impurity = 0.0; // weighted sum wl*gl + wr*gr
};

double gini(double positive_weight, double total_weight) {
    if (total_weight <= 0.0) return 0.0;
    const double p = positive_weight / total_weight;
    return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
public:
    TreeBuilder(const SparseMatrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hyper,
                std::size_t max_features, std::uint64_t seed)
        : x_(x), y_(y), hyper_(hyper), max_features_(max_features), rng_(seed), weight_(x.rows(), 0.0),
          features_(x.cols()) {
        std::iota(features_.begin(), features_.end(), 0U);
    }

    DecisionTree build() {
        const std::size_t n = x_.rows();
        if (hyper_.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) weight_[rng_.below(n)] += 1.0;
        } else {
            std::fill(weight_.begin(), weight_.end(), 1.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (weight_[i] > 0.0) samples_.push_back(static_cast<std::uint32_t>(i));
        }

        struct Work {
            std::int32_t node;
            std::size_t begin, end;
        };
        DecisionTree tree;
        tree.nodes.emplace_back();
        std::vector<Work> stack{{0, 0, samples_.size()}};
        while (!stack.empty()) {
            const Work w = stack.back();
            stack.pop_back();

            double total = 0.0, positive = 0.0;
            for (std::size_t i = w.begin; i < w.end; ++i) {
                total += weight_[samples_[i]];
                positive += y_[samples_[i]] ? weight_[samples_[i]] : 0.0;
            }
            auto& node = tree.nodes[static_cast<std::size_t>(w.node)];
            node.weight = total;
            node.value = total > 0.0 ? positive / total : 0.0;
            node.impurity = gini(positive, total);
            if (node.impurity <= 0.0 || w.end - w.begin < 2 * hyper_.min_leaf) continue;

            const Split split = best_split(w.begin, w.end, total, positive);
            if (!split.found) continue;

            auto mid = std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(w.begin),
                                             samples_.begin() + static_cast<std::ptrdiff_t>(w.end),
                                             [&](std::uint32_t s) { return x_.at(s, split.feature) <= split.threshold; });
            const auto mid_index = static_cast<std::size_t>(mid - samples_.begin());

            const auto left = static_cast<std::int32_t>(tree.nodes.size());
            const auto right = left + 1;
            {
                auto& parent = tree.nodes[static_cast<std::size_t>(w.node)];
                parent.feature = static_cast<std::int32_t>(split.feature);
                parent.threshold = split.threshold;
                parent.left = left;
                parent.right = right;
            }
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            stack.push_back({right, mid_index, w.end});
            stack.push_back({left, w.begin, mid_index});
        }
        return tree;
    }

private:
    // Draws features without replacement until max_features non-constant ones
    // have been evaluated or all features are exhausted.
    Split best_split(std::size_t begin, std::size_t end, double total, double positive) {
        Split best;
        const std::size_t d = features_.size();
        std::size_t evaluated = 0;
        for (std::size_t drawn = 0; drawn < d && evaluated < max_features_; ++drawn) {
            const std::size_t pick = drawn + rng_.below(d - drawn);
            std::swap(features_[drawn], features_[pick]);
            const std::uint32_t f = features_[drawn];

            values_.clear();
            for (std::size_t i = begin; i < end; ++i) values_.push_back({x_.at(samples_[i], f), samples_[i]});
            std::sort(values_.begin(), values_.end(), [](const Candidate& a, const Candidate& b) {
                return a.value < b.value || (a.value == b.value && a.sample < b.sample);
            });
            if (values_.front().value == values_.back().value) continue;
            ++evaluated;

            double left_w = 0.0, left_pos = 0.0;
            const std::size_t count = values_.size();
            for (std::size_t i = 0; i + 1 < count; ++i) {
                const auto s = values_[i].sample;
                left_w += weight_[s];
                left_pos += y_[s] ? weight_[s] : 0.0;
                if (values_[i].value == values_[i + 1].value) continue;
                if (i + 1 < hyper_.min_leaf || count - i - 1 < hyper_.min_leaf) continue;
                const double right_w = total - left_w;
                const double right_pos = positive - left_pos;
                const double impurity = left_w * gini(left_pos, left_w) + right_w * gini(right_pos, right_w);
                if (!best.found || impurity < best.child_impurity) {
                    const double a = values_[i].value;
                    const double b = values_[i + 1].value;
                    double threshold = a + (b - a) / 2.0;
                    if (threshold >= b) threshold = a;
                    best = {true, f, threshold, impurity};
                }
            }
        }
        return best;
    }

    const SparseMatrix& x_;
    std::span<const std::uint8_t> y_;
    const Hyperparameters& hyper_;
    std::size_t max_features_;
    Rng rng_;
    std::vector<double> weight_;
    std::vector<std::uint32_t> samples_;
    std::vector<std::uint32_t> features_;
    std::vector<Candidate> values_;
};

} // namespace

double DecisionTree::predict(const SparseMatrix& x, std::size_t row) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x.at(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

RandomForestModel fit_random_forest(const SparseMatrix& x, std::span<const std::uint8_t> y,
                                    const Hyperparameters& hyper, std::uint64_t seed, Exec exec) {
    if (x.rows() != y.size()) throw DimensionMismatch("row and label counts differ");
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg) throw DegenerateLabels("random forest needs both classes in the training set");
    if (hyper.n_trees == 0) throw InvalidArgument("n_trees must be positive");

    const std::size_t d = x.cols();
    std::size_t max_features = hyper.max_features;
    if (max_features == 0) max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    max_features = std::clamp<std::size_t>(max_features, 1, std::max<std::size_t>(d, 1));

    RandomForestModel forest;
    forest.trees.resize(hyper.n_trees);
    parallel_for(exec, hyper.n_trees, [&](std::size_t t) {
        TreeBuilder builder(x, y, hyper, max_features, derive_seed(seed, t));
        forest.trees[t] = builder.build();
    });
    return forest;
}

std::vector<double> random_forest_proba(const RandomForestModel& forest, const SparseMatrix& rows, Exec exec) {
    std::vector<double> out(rows.rows(), 0.0);
    const double n_trees = static_cast<double>(forest.trees.size());
    parallel_for(exec, rows.rows(), [&](std::size_t i) {
        double sum = 0.0;
        for (const auto& tree : forest.trees) sum += tree.predict(rows, i);
        out[i] = std::clamp(sum / n_trees, 0.0, 1.0);
    });
    return out;
}

std::vector<double> random_forest_importance(const RandomForestModel& forest, std::size_t n_features) {
    std::vector<double> total(n_features, 0.0);
    for (const auto& tree : forest.trees) {
        const double root_weight = tree.nodes.front().weight;
        if (root_weight <= 0.0) continue;
        for (const auto& n : tree.nodes) {
            if (n.feature < 0) continue;
            const auto& l = tree.nodes[static_cast<std::size_t>(n.left)];
            const auto& r = tree.nodes[static_cast<std::size_t>(n.right)];
            const double decrease = n.weight * n.impurity - l.weight * l.impurity - r.weight * r.impurity;
            total[static_cast<std::size_t>(n.feature)] += decrease / root_weight;
        }
    }
    double sum = 0.0;
    for (auto& v : total) {
        v /= static_cast<double>(forest.trees.size());
        sum += v;
    }
    if (sum <= 0.0) {
        std::fill(total.begin(), total.end(), n_features == 0 ? 0.0 : 1.0 / static_cast<double>(n_features));
        return total;
    }
    for (auto& v : total) v /= sum;
    return total;
}

} // namespace radar

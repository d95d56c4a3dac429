#include "voiceml/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "voiceml/errors.hpp"
#include "voiceml/rng.hpp"

namespace voiceml {
namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
};

double impurity_of(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double acc = 0.0;
    for (int c : counts) {
        double p = static_cast<double>(c) / total;
        acc += p * p;
    }
    return 1.0 - acc;
}

struct Builder {
    const std::vector<std::vector<double>>& X;
    const std::vector<int>& y;
    const TreeParams& params;
    std::mt19937_64& rng;
    int n_classes;
    std::size_t n_total;
    DecisionTree tree;

    int make_leaf(const std::vector<std::size_t>& idx) {
        TreeNode node;
        node.proba.assign(n_classes, 0.0);
        for (std::size_t i : idx) node.proba[y[i]] += 1.0;
        for (double& p : node.proba) p /= static_cast<double>(idx.size());
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size() - 1);
    }

    std::vector<int> sample_features() {
        const int m = static_cast<int>(X[0].size());
        int take = params.n_features_per_split;
        if (take <= 0 || take >= m) {
            std::vector<int> all(m);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        // Partial Fisher-Yates, then sorted so the lowest-index tie-break is
        // independent of draw order.
        std::vector<int> pool(m);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < take; ++i) {
            std::size_t j = i + uniform_index(rng, pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(take);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    SplitChoice best_split(const std::vector<std::size_t>& idx,
                           const std::vector<int>& features) {
        const int n = static_cast<int>(idx.size());
        std::vector<int> total_counts(n_classes, 0);
        for (std::size_t i : idx) ++total_counts[y[i]];
        const double parent_imp = impurity_of(total_counts, n);

        SplitChoice best;
        std::vector<std::pair<double, int>> vals(idx.size());
        std::vector<int> left_counts(n_classes);
        for (int f : features) {
            for (std::size_t k = 0; k < idx.size(); ++k)
                vals[k] = {X[idx[k]][f], y[idx[k]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            std::fill(left_counts.begin(), left_counts.end(), 0);
            int n_left = 0;
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
                ++left_counts[vals[k].second];
                ++n_left;
                if (vals[k].first == vals[k + 1].first) continue;
                double thr = vals[k].first + 0.5 * (vals[k + 1].first - vals[k].first);
                int n_right = n - n_left;
                double imp_l = 0.0, imp_r = 0.0;
                double sq_l = 0.0, sq_r = 0.0;
                for (int c = 0; c < n_classes; ++c) {
                    double cl = left_counts[c];
                    double cr = total_counts[c] - left_counts[c];
                    sq_l += cl * cl;
                    sq_r += cr * cr;
                }
                imp_l = 1.0 - sq_l / (static_cast<double>(n_left) * n_left);
                imp_r = 1.0 - sq_r / (static_cast<double>(n_right) * n_right);
                double gain = parent_imp -
                              (n_left * imp_l + n_right * imp_r) / static_cast<double>(n);
                if (!best.found || gain > best.gain + 1e-15 ||
                    (std::abs(gain - best.gain) <= 1e-15 &&
                     (f < best.feature ||
                      (f == best.feature && thr < best.threshold)))) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = thr;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build(const std::vector<std::size_t>& idx, int depth) {
        bool pure = true;
        for (std::size_t k = 1; k < idx.size(); ++k)
            if (y[idx[k]] != y[idx[0]]) {
                pure = false;
                break;
            }
        if (pure || (params.max_depth >= 0 && depth >= params.max_depth) ||
            static_cast<int>(idx.size()) < params.min_samples_split)
            return make_leaf(idx);

        SplitChoice split = best_split(idx, sample_features());
        if (!split.found) {
            // Retry on the full feature set so subsampling alone cannot force
            // a premature impure leaf; give up only if no feature separates.
            if (params.n_features_per_split > 0 &&
                params.n_features_per_split < static_cast<int>(X[0].size())) {
                std::vector<int> all(X[0].size());
                std::iota(all.begin(), all.end(), 0);
                split = best_split(idx, all);
            }
            if (!split.found) return make_leaf(idx);
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (X[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);

        tree.split_gains[split.feature] += std::max(0.0, split.gain) *
            static_cast<double>(idx.size()) / static_cast<double>(n_total);

        TreeNode node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        tree.nodes.push_back(node);
        int self = static_cast<int>(tree.nodes.size() - 1);
        int left = build(left_idx, depth + 1);
        int right = build(right_idx, depth + 1);
        tree.nodes[self].left = left;
        tree.nodes[self].right = right;
        return self;
    }
};

}  // namespace

double gini_impurity(const std::vector<int>& counts, int total) {
    return impurity_of(counts, total);
}

const std::vector<double>& DecisionTree::predict_proba(const std::vector<double>& x) const {
    int node = 0;
    while (!nodes[node].is_leaf())
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    return nodes[node].proba;
}

int DecisionTree::predict(const std::vector<double>& x) const {
    const std::vector<double>& p = predict_proba(x);
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
        if (p[c] > p[best]) best = c;
    return best;
}

DecisionTree fit_tree(const std::vector<std::vector<double>>& X,
                      const std::vector<int>& y, const TreeParams& params,
                      std::mt19937_64& rng, int n_classes) {
    if (X.empty()) throw ArgumentError("fit_tree: empty dataset");
    if (X.size() != y.size()) throw ArgumentError("fit_tree: X and y sizes differ");
    const std::size_t m = X[0].size();
    if (m == 0) throw ArgumentError("fit_tree: zero-dimensional features");
    for (const auto& row : X)
        if (row.size() != m) throw ArgumentError("fit_tree: ragged feature matrix");
    int max_label = 0;
    for (int label : y) {
        if (label < 0) throw ArgumentError("fit_tree: negative class label");
        max_label = std::max(max_label, label);
    }
    if (n_classes <= 0) n_classes = max_label + 1;
    if (max_label >= n_classes) throw ArgumentError("fit_tree: label exceeds n_classes");
    if (params.min_samples_split < 2)
        throw ArgumentError("fit_tree: min_samples_split must be >= 2");

    Builder builder{X, y, params, rng, n_classes, X.size(), {}};
    builder.tree.n_classes = n_classes;
    builder.tree.n_features = static_cast<int>(m);
    builder.tree.split_gains.assign(m, 0.0);
    std::vector<std::size_t> idx(X.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    builder.build(idx, 0);
    return std::move(builder.tree);
}

}  // namespace voiceml

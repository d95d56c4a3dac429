#include "voiceml/forest.hpp"

#include <algorithm>
#include <cmath>

#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"
#include "voiceml/rng.hpp"

namespace voiceml {

int RandomForest::predict(const std::vector<double>& x) const {
    std::vector<int> votes;
    for (const DecisionTree& t : trees) {
        int c = t.predict(x);
        if (c >= static_cast<int>(votes.size())) votes.resize(c + 1, 0);
        ++votes[c];
    }
    int best = 0;
    for (int c = 1; c < static_cast<int>(votes.size()); ++c)
        if (votes[c] > votes[best]) best = c;
    return best;
}

RandomForest fit_forest(const std::vector<std::vector<double>>& X,
                        const std::vector<int>& y, int n_trees,
                        const TreeParams& params, std::uint64_t seed,
                        int n_classes, int jobs) {
    if (n_trees <= 0) throw ArgumentError("fit_forest: n_trees must be >= 1");
    if (X.empty()) throw ArgumentError("fit_forest: empty dataset");
    if (X.size() != y.size()) throw ArgumentError("fit_forest: X and y sizes differ");
    const std::size_t n = X.size();
    const std::size_t m = X[0].size();

    TreeParams tree_params = params;
    tree_params.n_features_per_split =
        std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m))));

    if (n_classes <= 0) {
        int max_label = 0;
        for (int label : y) max_label = std::max(max_label, label);
        n_classes = max_label + 1;
    }

    RandomForest forest;
    forest.n_trees = n_trees;
    forest.seed = seed;
    forest.trees.resize(n_trees);

    parallel_for(static_cast<std::size_t>(n_trees), jobs, [&](std::size_t t) {
        std::mt19937_64 eng = make_engine(derive_seed(seed, t));
        std::vector<std::vector<double>> bx(n);
        std::vector<int> by(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(eng, n));
            bx[i] = X[j];
            by[i] = y[j];
        }
        forest.trees[t] = fit_tree(bx, by, tree_params, eng, n_classes);
    });

    // Mean over trees of each tree's normalized gain vector, renormalized.
    forest.importances.assign(m, 0.0);
    for (const DecisionTree& tree : forest.trees) {
        double total = 0.0;
        for (double g : tree.split_gains) total += g;
        if (total <= 0.0) continue;
        for (std::size_t f = 0; f < m; ++f)
            forest.importances[f] += tree.split_gains[f] / total;
    }
    double total = 0.0;
    for (double v : forest.importances) total += v;
    if (total <= 0.0) {
        forest.importances.assign(m, 1.0 / static_cast<double>(m));
    } else {
        for (double& v : forest.importances) v /= total;
    }
    return forest;
}

std::vector<bool> select_mask(const std::vector<double>& importances,
                              double threshold) {
    if (importances.empty()) throw ArgumentError("select_mask: empty importances");
    std::vector<bool> mask(importances.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < importances.size(); ++i) {
        if (importances[i] > threshold) {
            mask[i] = true;
            any = true;
        }
    }
    if (!any) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < importances.size(); ++i)
            if (importances[i] > importances[best]) best = i;
        mask[best] = true;
    }
    return mask;
}

}  // namespace voiceml

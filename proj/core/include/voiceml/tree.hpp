#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace voiceml {

struct TreeParams {
    int max_depth = -1;          // -1 = unlimited; 0 = root leaf only
    int min_samples_split = 2;
    int n_features_per_split = 0;  // 0 = all features
};

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> proba;  // leaves only; class-probability vector

    bool is_leaf() const { return left < 0; }
};

struct DecisionTree {
    int n_classes = 0;
    int n_features = 0;
    std::vector<TreeNode> nodes;
    // Sum over split nodes of (n_node/n_root) * Gini gain, per feature.
    std::vector<double> split_gains;

    const std::vector<double>& predict_proba(const std::vector<double>& x) const;
    int predict(const std::vector<double>& x) const;  // argmax, ties -> lowest class
};

double gini_impurity(const std::vector<int>& counts, int total);

// CART with midpoint thresholds; gain ties broken by lowest feature index,
// then lowest threshold. Impure nodes split even at zero gain whenever any
// candidate feature still separates the rows, so an unlimited-depth tree
// reaches 100% training accuracy on any consistent dataset.
DecisionTree fit_tree(const std::vector<std::vector<double>>& X,
                      const std::vector<int>& y, const TreeParams& params,
                      std::mt19937_64& rng, int n_classes = 0);

}  // namespace voiceml

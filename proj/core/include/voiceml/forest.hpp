#pragma once

#include <cstdint>
#include <vector>

#include "voiceml/tree.hpp"

namespace voiceml {

struct RandomForest {
    std::vector<DecisionTree> trees;
    int n_trees = 0;
    std::uint64_t seed = 0;
    // Non-negative, sums to 1 (uniform if no tree ever split).
    std::vector<double> importances;

    int predict(const std::vector<double>& x) const;  // majority vote, ties -> lowest class
};

// Bootstrap resamples of size n; sqrt(m) features per split (floor, min 1);
// per-tree RNG streams derived from (seed, tree index) so fitting order and
// parallelism cannot change the result.
RandomForest fit_forest(const std::vector<std::vector<double>>& X,
                        const std::vector<int>& y, int n_trees,
                        const TreeParams& params, std::uint64_t seed,
                        int n_classes = 0, int jobs = 1);

// mask[i] = importances[i] > threshold; if nothing passes, keep the single
// highest-importance feature (ties -> lowest index).
std::vector<bool> select_mask(const std::vector<double>& importances,
                              double threshold);

}  // namespace voiceml

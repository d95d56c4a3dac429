#pragma once

#include <vector>

namespace voiceml {

struct GbtParams {
    int n_estimators = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
};

// Regression tree over (gradient, hessian) targets; leaf weight -G/(H+1).
struct RegTreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;

    bool is_leaf() const { return left < 0; }
};

struct RegTree {
    std::vector<RegTreeNode> nodes;
    double eval(const std::vector<double>& x) const;
};

struct GbtModel {
    int n_classes = 0;
    int n_features = 0;
    double learning_rate = 0.1;
    // rounds x classes
    std::vector<std::vector<RegTree>> rounds;
    // Training log-loss measured after each round (diagnostic).
    std::vector<double> train_log_loss;
};

// Multiclass softmax cross-entropy boosting: per round one second-order
// regression tree per class on (p - y, p(1-p)), lambda = 1, scores shrunk by
// learning_rate. Deterministic (no subsampling of rows or columns).
GbtModel fit_gbt(const std::vector<std::vector<double>>& X,
                 const std::vector<int>& y, const GbtParams& params,
                 int n_classes = 0);

std::vector<double> gbt_predict_proba(const GbtModel& model,
                                      const std::vector<double>& x);
int gbt_predict(const GbtModel& model, const std::vector<double>& x);

}  // namespace voiceml

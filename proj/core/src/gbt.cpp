#include "voiceml/gbt.hpp"

#include <algorithm>
#include <cmath>

#include "voiceml/errors.hpp"

namespace voiceml {
namespace {

constexpr double kLambda = 1.0;

struct RegBuilder {
    const std::vector<std::vector<double>>& X;
    const std::vector<double>& g;
    const std::vector<double>& h;
    int max_depth;
    RegTree tree;

    int make_leaf(double G, double H) {
        RegTreeNode node;
        node.weight = -G / (H + kLambda);
        tree.nodes.push_back(node);
        return static_cast<int>(tree.nodes.size() - 1);
    }

    int build(const std::vector<std::size_t>& idx, int depth) {
        double G = 0.0, H = 0.0;
        for (std::size_t i : idx) {
            G += g[i];
            H += h[i];
        }
        if ((max_depth >= 0 && depth >= max_depth) || idx.size() < 2)
            return make_leaf(G, H);

        const int m = static_cast<int>(X[0].size());
        const double parent_obj = G * G / (H + kLambda);
        int best_f = -1;
        double best_thr = 0.0, best_gain = 0.0;
        std::vector<std::pair<double, std::size_t>> vals(idx.size());
        for (int f = 0; f < m; ++f) {
            for (std::size_t k = 0; k < idx.size(); ++k) vals[k] = {X[idx[k]][f], idx[k]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;
            double GL = 0.0, HL = 0.0;
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
                GL += g[vals[k].second];
                HL += h[vals[k].second];
                if (vals[k].first == vals[k + 1].first) continue;
                double thr = vals[k].first + 0.5 * (vals[k + 1].first - vals[k].first);
                double GR = G - GL, HR = H - HL;
                double gain = 0.5 * (GL * GL / (HL + kLambda) + GR * GR / (HR + kLambda) -
                                     parent_obj);
                if (gain > best_gain + 1e-15 ||
                    (best_f >= 0 && std::abs(gain - best_gain) <= 1e-15 &&
                     (f < best_f || (f == best_f && thr < best_thr)))) {
                    best_f = f;
                    best_thr = thr;
                    best_gain = gain;
                }
            }
        }
        if (best_f < 0 || best_gain <= 0.0) return make_leaf(G, H);

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (X[i][best_f] <= best_thr ? left_idx : right_idx).push_back(i);

        RegTreeNode node;
        node.feature = best_f;
        node.threshold = best_thr;
        tree.nodes.push_back(node);
        int self = static_cast<int>(tree.nodes.size() - 1);
        int left = build(left_idx, depth + 1);
        int right = build(right_idx, depth + 1);
        tree.nodes[self].left = left;
        tree.nodes[self].right = right;
        return self;
    }
};

RegTree fit_reg_tree(const std::vector<std::vector<double>>& X,
                     const std::vector<double>& g, const std::vector<double>& h,
                     int max_depth) {
    RegBuilder builder{X, g, h, max_depth, {}};
    std::vector<std::size_t> idx(X.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    builder.build(idx, 0);
    return std::move(builder.tree);
}

void softmax_row(const double* scores, int k, double* out) {
    double hi = scores[0];
    for (int c = 1; c < k; ++c) hi = std::max(hi, scores[c]);
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
        out[c] = std::exp(scores[c] - hi);
        sum += out[c];
    }
    for (int c = 0; c < k; ++c) out[c] /= sum;
}

}  // namespace

double RegTree::eval(const std::vector<double>& x) const {
    int node = 0;
    while (!nodes[node].is_leaf())
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    return nodes[node].weight;
}

GbtModel fit_gbt(const std::vector<std::vector<double>>& X,
                 const std::vector<int>& y, const GbtParams& params,
                 int n_classes) {
    if (X.empty()) throw ArgumentError("fit_gbt: empty dataset");
    if (X.size() != y.size()) throw ArgumentError("fit_gbt: X and y sizes differ");
    if (params.n_estimators <= 0) throw ArgumentError("fit_gbt: n_estimators must be >= 1");
    if (params.max_depth < 0) throw ArgumentError("fit_gbt: max_depth must be >= 0");
    if (!(params.learning_rate > 0.0) || params.learning_rate > 1.0)
        throw ArgumentError("fit_gbt: learning_rate must be in (0, 1]");

    const std::size_t n = X.size();
    int max_label = 0;
    for (int label : y) {
        if (label < 0) throw ArgumentError("fit_gbt: negative class label");
        max_label = std::max(max_label, label);
    }
    if (n_classes <= 0) n_classes = max_label + 1;
    if (max_label >= n_classes) throw ArgumentError("fit_gbt: label exceeds n_classes");
    const int k = n_classes;

    GbtModel model;
    model.n_classes = k;
    model.n_features = static_cast<int>(X[0].size());
    model.learning_rate = params.learning_rate;

    std::vector<double> scores(n * k, 0.0);
    std::vector<double> proba(n * k, 0.0);
    std::vector<double> g(n), h(n);

    for (int round = 0; round < params.n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) softmax_row(&scores[i * k], k, &proba[i * k]);
        std::vector<RegTree> round_trees;
        round_trees.reserve(k);
        for (int c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                double p = proba[i * k + c];
                g[i] = p - (y[i] == c ? 1.0 : 0.0);
                h[i] = p * (1.0 - p);
            }
            RegTree tree = fit_reg_tree(X, g, h, params.max_depth);
            for (std::size_t i = 0; i < n; ++i)
                scores[i * k + c] += params.learning_rate * tree.eval(X[i]);
            round_trees.push_back(std::move(tree));
        }
        model.rounds.push_back(std::move(round_trees));

        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            softmax_row(&scores[i * k], k, &proba[i * k]);
            loss -= std::log(std::max(proba[i * k + y[i]], 1e-300));
        }
        model.train_log_loss.push_back(loss / static_cast<double>(n));
    }
    return model;
}

std::vector<double> gbt_predict_proba(const GbtModel& model,
                                      const std::vector<double>& x) {
    const int k = model.n_classes;
    std::vector<double> scores(k, 0.0);
    for (const std::vector<RegTree>& round : model.rounds)
        for (int c = 0; c < k; ++c) scores[c] += model.learning_rate * round[c].eval(x);
    std::vector<double> proba(k, 0.0);
    softmax_row(scores.data(), k, proba.data());
    return proba;
}

int gbt_predict(const GbtModel& model, const std::vector<double>& x) {
    std::vector<double> p = gbt_predict_proba(model, x);
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c)
        if (p[c] > p[best]) best = c;
    return best;
}

}  // namespace voiceml

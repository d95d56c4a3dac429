#include "voiceml/metrics.hpp"

#include "voiceml/errors.hpp"
#include "voiceml/features.hpp"

namespace voiceml {

double weighted_score(double sensitivity, double specificity, double uar) {
    return 0.4 * sensitivity + 0.2 * specificity + 0.4 * uar;
}

Metrics evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw ArgumentError("evaluate: prediction/truth length mismatch");
    if (pred.empty()) throw ArgumentError("evaluate: empty input");

    const int normal = static_cast<int>(ClassLabel::Normal);
    long tp = 0, fn = 0, tn = 0, fp = 0;
    std::vector<long> per_class_total(kNumClasses, 0), per_class_hit(kNumClasses, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= kNumClasses)
            throw ArgumentError("evaluate: truth label out of range");
        if (pred[i] < 0 || pred[i] >= kNumClasses)
            throw ArgumentError("evaluate: predicted label out of range");
        const bool truth_pos = truth[i] != normal;
        const bool pred_pos = pred[i] != normal;
        if (truth_pos) {
            pred_pos ? ++tp : ++fn;
        } else {
            pred_pos ? ++fp : ++tn;
        }
        ++per_class_total[truth[i]];
        if (pred[i] == truth[i]) ++per_class_hit[truth[i]];
    }

    Metrics m;
    m.sensitivity = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
    m.specificity = tn + fp == 0 ? 1.0 : static_cast<double>(tn) / (tn + fp);
    double recall_sum = 0.0;
    int present = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        if (per_class_total[c] == 0) continue;
        recall_sum += static_cast<double>(per_class_hit[c]) / per_class_total[c];
        ++present;
    }
    m.uar = present == 0 ? 1.0 : recall_sum / present;
    m.weighted = weighted_score(m.sensitivity, m.specificity, m.uar);
    return m;
}

}  // namespace voiceml

#pragma once

#include <vector>

namespace voiceml {

struct Metrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double uar = 0.0;
    double weighted = 0.0;
};

// 0.4*sensitivity + 0.2*specificity + 0.4*uar.
double weighted_score(double sensitivity, double specificity, double uar);

// Binary rates collapse the 4-class labels to pathological (any disorder)
// vs Normal; uar averages the per-class recalls of classes present in truth.
// Vacuous rates (0/0) count as 1.
Metrics evaluate(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace voiceml

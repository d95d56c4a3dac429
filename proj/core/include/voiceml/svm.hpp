#pragma once

#include <cstdint>
#include <vector>

namespace voiceml {

struct SvmParams {
    double C = 1.0;
    double gamma_raw = -1.0;  // as sampled; <= 0 resolves to 1/n_features
    double gamma = 0.0;       // resolved; > 0 when set explicitly
    double tol = 1e-3;
    long max_passes = 1000000;  // SMO iteration guard
};

struct BinarySvm {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coef;  // alpha_i * y_i, one per support vector
    double bias = 0.0;
    double gamma = 0.0;

    double decision(const std::vector<double>& x) const;
};

struct OvoMachine {
    int class_a = 0;  // mapped to +1
    int class_b = 0;  // mapped to -1
    bool skipped = false;
    BinarySvm svm;
};

struct OvoSvm {
    int n_classes = 0;
    std::vector<OvoMachine> machines;  // C(K,2), ordered (a,b) with a < b

    int predict(const std::vector<double>& x) const;
};

// gamma_raw > 0 -> gamma_raw; otherwise 1/n_features (zero counts as negative).
double resolve_gamma(double gamma_raw, int n_features);

double rbf(const std::vector<double>& x, const std::vector<double>& z, double gamma);

// Soft-margin dual via maximal-violating-pair SMO; stops when the KKT
// violation gap m(alpha) - M(alpha) < tol, bias = midpoint of the gap.
BinarySvm smo_train(const std::vector<std::vector<double>>& X,
                    const std::vector<int>& y,  // -1 / +1
                    const SvmParams& params);

// One machine per unordered class pair on that pair's samples; pairs with an
// empty side are recorded as skipped and ignored at prediction time.
OvoSvm fit_ovo(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
               const SvmParams& params, int n_classes = 0, int jobs = 1);

int ovo_predict(const OvoSvm& model, const std::vector<double>& x);

}  // namespace voiceml

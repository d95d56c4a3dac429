#include "voiceml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"

namespace voiceml {

double resolve_gamma(double gamma_raw, int n_features) {
    if (n_features < 1) throw ArgumentError("resolve_gamma: n_features must be >= 1");
    if (gamma_raw > 0.0) return gamma_raw;
    return 1.0 / static_cast<double>(n_features);
}

double rbf(const std::vector<double>& x, const std::vector<double>& z, double gamma) {
    if (x.size() != z.size()) throw ArgumentError("rbf: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - z[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

double BinarySvm::decision(const std::vector<double>& x) const {
    double acc = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
        acc += dual_coef[i] * rbf(support_vectors[i], x, gamma);
    return acc;
}

BinarySvm smo_train(const std::vector<std::vector<double>>& X,
                    const std::vector<int>& y, const SvmParams& params) {
    const std::size_t n = X.size();
    if (n < 2) throw ArgumentError("smo_train: need at least 2 samples");
    if (y.size() != n) throw ArgumentError("smo_train: X and y sizes differ");
    bool has_pos = false, has_neg = false;
    for (int label : y) {
        if (label == 1) has_pos = true;
        else if (label == -1) has_neg = true;
        else throw ArgumentError("smo_train: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg) throw ArgumentError("smo_train: single-class input");
    const double C = params.C;
    if (!(C > 0.0)) throw ArgumentError("smo_train: C must be positive");
    const double gamma =
        params.gamma > 0.0 ? params.gamma
                           : resolve_gamma(params.gamma_raw, static_cast<int>(X[0].size()));
    if (!(params.tol > 0.0)) throw ArgumentError("smo_train: tol must be positive");

    // Dense kernel cache (desk-scale n).
    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        K[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = rbf(X[i], X[j], gamma);
            K[i * n + j] = v;
            K[j * n + i] = v;
        }
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> u(n, 0.0);  // sum_j alpha_j y_j K_ij (decision minus bias)
    double gap = std::numeric_limits<double>::infinity();
    double m_up = 0.0, m_low = 0.0;

    // Bound membership uses a small epsilon so an alpha parked one ulp inside
    // a box face cannot be re-selected forever with vanishing step sizes.
    const double bound_eps = 1e-12 * C;
    auto at_lower = [&](std::size_t i) { return alpha[i] <= bound_eps; };
    auto at_upper = [&](std::size_t i) { return alpha[i] >= C - bound_eps; };
    auto in_up = [&](std::size_t i) {
        return (y[i] == 1 && !at_upper(i)) || (y[i] == -1 && !at_lower(i));
    };
    auto in_low = [&](std::size_t i) {
        return (y[i] == -1 && !at_upper(i)) || (y[i] == 1 && !at_lower(i));
    };

    long iter = 0;
    for (;; ++iter) {
        std::ptrdiff_t i = -1, j = -1;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            double v = y[k] - u[k];
            if (in_up(k) && v > m_up) {
                m_up = v;
                i = static_cast<std::ptrdiff_t>(k);
            }
            if (in_low(k) && v < m_low) {
                m_low = v;
                j = static_cast<std::ptrdiff_t>(k);
            }
        }
        gap = m_up - m_low;
        if (gap < params.tol || i < 0 || j < 0 || i == j) break;
        if (iter >= params.max_passes)
            throw ConvergenceError("smo_train: iteration guard exceeded", gap);

        const std::size_t a = static_cast<std::size_t>(i);
        const std::size_t b = static_cast<std::size_t>(j);
        double eta = K[a * n + a] + K[b * n + b] - 2.0 * K[a * n + b];
        eta = std::max(eta, 1e-12);
        double delta = gap / eta;

        // Box limits for alpha_a += y_a*delta, alpha_b -= y_b*delta.
        double max_a = y[a] == 1 ? C - alpha[a] : alpha[a];
        double max_b = y[b] == 1 ? alpha[b] : C - alpha[b];
        delta = std::min(delta, std::min(max_a, max_b));

        alpha[a] = std::clamp(alpha[a] + y[a] * delta, 0.0, C);
        alpha[b] = std::clamp(alpha[b] - y[b] * delta, 0.0, C);
        for (std::size_t k = 0; k < n; ++k) u[k] += delta * (K[a * n + k] - K[b * n + k]);
    }

    BinarySvm model;
    model.gamma = gamma;
    model.bias = 0.5 * (m_up + m_low);
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] > bound_eps) {
            model.support_vectors.push_back(X[k]);
            model.dual_coef.push_back(alpha[k] * y[k]);
        }
    }
    return model;
}

OvoSvm fit_ovo(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
               const SvmParams& params, int n_classes, int jobs) {
    if (X.empty()) throw ArgumentError("fit_ovo: empty dataset");
    if (X.size() != y.size()) throw ArgumentError("fit_ovo: X and y sizes differ");
    int max_label = 0;
    for (int label : y) {
        if (label < 0) throw ArgumentError("fit_ovo: negative class label");
        max_label = std::max(max_label, label);
    }
    if (n_classes <= 0) n_classes = max_label + 1;
    if (max_label >= n_classes) throw ArgumentError("fit_ovo: label exceeds n_classes");
    int present = 0;
    std::vector<int> counts(n_classes, 0);
    for (int label : y) ++counts[label];
    for (int c : counts)
        if (c > 0) ++present;
    if (present < 2) throw ArgumentError("fit_ovo: need at least 2 classes present");

    OvoSvm model;
    model.n_classes = n_classes;
    for (int a = 0; a < n_classes; ++a)
        for (int b = a + 1; b < n_classes; ++b) {
            OvoMachine machine;
            machine.class_a = a;
            machine.class_b = b;
            machine.skipped = counts[a] == 0 || counts[b] == 0;
            model.machines.push_back(std::move(machine));
        }

    parallel_for(model.machines.size(), jobs, [&](std::size_t k) {
        OvoMachine& machine = model.machines[k];
        if (machine.skipped) return;
        std::vector<std::vector<double>> px;
        std::vector<int> py;
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (y[i] == machine.class_a) {
                px.push_back(X[i]);
                py.push_back(1);
            } else if (y[i] == machine.class_b) {
                px.push_back(X[i]);
                py.push_back(-1);
            }
        }
        machine.svm = smo_train(px, py, params);
    });
    return model;
}

int ovo_predict(const OvoSvm& model, const std::vector<double>& x) {
    std::vector<int> votes(model.n_classes, 0);
    std::vector<double> magnitude(model.n_classes, 0.0);
    for (const OvoMachine& machine : model.machines) {
        if (machine.skipped) continue;
        double d = machine.svm.decision(x);
        votes[d >= 0.0 ? machine.class_a : machine.class_b] += 1;
        magnitude[machine.class_a] += std::abs(d);
        magnitude[machine.class_b] += std::abs(d);
    }
    int best = 0;
    for (int c = 1; c < model.n_classes; ++c) {
        if (votes[c] > votes[best] ||
            (votes[c] == votes[best] && magnitude[c] > magnitude[best]))
            best = c;
    }
    return best;
}

int OvoSvm::predict(const std::vector<double>& x) const { return ovo_predict(*this, x); }

}  // namespace voiceml

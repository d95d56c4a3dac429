#include "voiceml/savgol.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "voiceml/errors.hpp"

namespace voiceml {

SgFilter sg_filter(int half_width, int poly_order, int deriv_order) {
    if (half_width < 1)
        throw ArgumentError("sg_filter: half_width must be >= 1");
    if (deriv_order < 0 || poly_order < deriv_order)
        throw ArgumentError("sg_filter: need poly_order >= deriv_order >= 0");
    if (2 * half_width + 1 <= poly_order)
        throw ArgumentError("sg_filter: window 2M+1 must exceed poly_order (M=" +
                            std::to_string(half_width) +
                            ", p=" + std::to_string(poly_order) + ")");

    const int w = 2 * half_width + 1;
    // Vandermonde design matrix over offsets m in [-M, M].
    Eigen::MatrixXd a(w, poly_order + 1);
    for (int m = -half_width; m <= half_width; ++m)
        for (int k = 0; k <= poly_order; ++k)
            a(m + half_width, k) = std::pow(static_cast<double>(m), k);

    // Weights = deriv! * row `deriv` of (A^T A)^-1 A^T: convolving them with
    // the window evaluates the fitted polynomial's deriv-th derivative at
    // the center.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(poly_order + 1);
    e(deriv_order) = 1.0;
    const Eigen::VectorXd z = (a.transpose() * a).ldlt().solve(e);
    Eigen::VectorXd wvec = a * z;

    double fact = 1.0;
    for (int k = 2; k <= deriv_order; ++k) fact *= k;

    SgFilter f;
    f.half_width = half_width;
    f.poly_order = poly_order;
    f.deriv_order = deriv_order;
    f.weights.resize(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i)
        f.weights[static_cast<std::size_t>(i)] = fact * wvec(i);
    return f;
}

std::vector<double> SgFilter::apply(const std::vector<double>& row) const {
    const auto n = static_cast<std::int64_t>(row.size());
    std::vector<double> out(row.size(), 0.0);
    if (n == 0) return out;
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int m = -half_width; m <= half_width; ++m) {
            const std::int64_t j = std::clamp<std::int64_t>(i + m, 0, n - 1);
            acc += weights[static_cast<std::size_t>(m + half_width)] *
                   row[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

MfccMatrix delta(const MfccMatrix& mat, int width, int poly_order) {
    if (width < 3 || width % 2 == 0)
        throw ArgumentError("delta: width must be odd and >= 3, got " +
                            std::to_string(width));
    const SgFilter f = sg_filter(width / 2, poly_order, 1);

    MfccMatrix out = MfccMatrix::zeros(mat.rows, mat.cols);
    std::vector<double> row(static_cast<std::size_t>(mat.cols));
    for (int r = 0; r < mat.rows; ++r) {
        for (int c = 0; c < mat.cols; ++c) row[static_cast<std::size_t>(c)] = mat.at(r, c);
        const auto d = f.apply(row);
        for (int c = 0; c < mat.cols; ++c) out.at(r, c) = d[static_cast<std::size_t>(c)];
    }
    return out;
}

}  // namespace voiceml

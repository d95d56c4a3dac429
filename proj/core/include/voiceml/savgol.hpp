#pragma once

#include <vector>

#include "voiceml/mfcc.hpp"

namespace voiceml {

// Savitzky-Golay convolution weights: the filter output at position n is
// sum_m weights[m + M] * f[n + m], which equals the deriv-th derivative at
// the window center of the least-squares polynomial fit of order poly_order
// over the 2M+1 window samples. Exact on polynomials of degree <= poly_order.
struct SgFilter {
    int half_width = 0;   // M
    int poly_order = 0;   // p, requires 2M+1 > p >= deriv_order
    int deriv_order = 0;
    std::vector<double> weights;  // length 2M+1

    // Correlates one row with the weights; out-of-range samples take the
    // nearest in-range value (replication padding). Output length == input.
    std::vector<double> apply(const std::vector<double>& row) const;
};

SgFilter sg_filter(int half_width, int poly_order, int deriv_order);

// Row-wise first temporal derivative of an MFCC matrix:
// sg_filter((width-1)/2, poly_order, 1) applied per coefficient row with
// replication padding. width must be odd and >= 3.
MfccMatrix delta(const MfccMatrix& mat, int width, int poly_order);

}  // namespace voiceml

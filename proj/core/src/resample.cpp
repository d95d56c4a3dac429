#include "voiceml/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "voiceml/errors.hpp"

namespace voiceml {

namespace {

constexpr int kHalfWidth = 32;
constexpr double kKaiserBeta = 12.0;

// Modified Bessel function of the first kind, order zero (power series).
double bessel_i0(double x) {
    const double half = 0.5 * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

double kaiser(double u) {  // u in [-1, 1]
    const double t = 1.0 - u * u;
    if (t <= 0.0) return 0.0;
    return bessel_i0(kKaiserBeta * std::sqrt(t)) / bessel_i0(kKaiserBeta);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// One kernel tap for source offset (k - t) at cutoff fc (fractions of the
// source Nyquist).
double tap(double offset, double fc) {
    return fc * sinc(fc * offset) * kaiser(offset / kHalfWidth);
}

}  // namespace

AudioClip resample(const AudioClip& clip, std::uint32_t target_rate) {
    if (target_rate == 0)
        throw ArgumentError("resample: target_rate must be positive");
    if (clip.sample_rate == 0)
        throw ArgumentError("resample: clip has zero sample_rate");
    if (target_rate == clip.sample_rate) return clip;

    const std::size_t n_in = clip.samples.size();
    const double ratio =
        static_cast<double>(target_rate) / static_cast<double>(clip.sample_rate);
    const auto n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_in) * ratio));
    const double fc = std::min(1.0, ratio);

    AudioClip out;
    out.sample_rate = target_rate;
    out.samples.resize(n_out, 0.0);
    if (n_in == 0 || n_out == 0) return out;

    // Output j maps to source time j * M / L with L/M in lowest terms, so
    // the fractional phase cycles through at most L values; precompute one
    // kernel per phase when that stays small.
    const std::uint64_t g = std::gcd<std::uint64_t>(clip.sample_rate, target_rate);
    const std::uint64_t up = target_rate / g;    // L
    const std::uint64_t down = clip.sample_rate / g;  // M

    std::vector<std::vector<double>> phase_kernels;
    const bool cached = up <= 8192;
    if (cached) {
        phase_kernels.resize(up);
        for (std::uint64_t r = 0; r < up; ++r) {
            const double frac = static_cast<double>(r) / static_cast<double>(up);
            auto& k = phase_kernels[r];
            k.resize(2 * kHalfWidth + 1);
            for (int m = -kHalfWidth; m <= kHalfWidth; ++m)
                k[static_cast<std::size_t>(m + kHalfWidth)] =
                    tap(static_cast<double>(m) - frac, fc);
        }
    }

    for (std::size_t j = 0; j < n_out; ++j) {
        const std::uint64_t num = static_cast<std::uint64_t>(j) * down;
        const auto base = static_cast<std::int64_t>(num / up);
        double acc = 0.0;
        if (cached) {
            const auto& k = phase_kernels[num % up];
            for (int m = -kHalfWidth; m <= kHalfWidth; ++m) {
                const std::int64_t src = base + m;
                if (src < 0 || src >= static_cast<std::int64_t>(n_in)) continue;
                acc += k[static_cast<std::size_t>(m + kHalfWidth)] *
                       clip.samples[static_cast<std::size_t>(src)];
            }
        } else {
            const double t = static_cast<double>(j) / ratio;
            for (int m = -kHalfWidth; m <= kHalfWidth; ++m) {
                const std::int64_t src = base + m;
                if (src < 0 || src >= static_cast<std::int64_t>(n_in)) continue;
                acc += tap(static_cast<double>(src) - t, fc) *
                       clip.samples[static_cast<std::size_t>(src)];
            }
        }
        out.samples[j] = acc;
    }
    return out;
}

}  // namespace voiceml

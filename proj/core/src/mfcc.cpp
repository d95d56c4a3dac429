#include "voiceml/mfcc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "voiceml/errors.hpp"

namespace voiceml {

namespace {

constexpr double kMelBreakHz = 1000.0;
constexpr double kMelPerHz = 3.0 / 200.0;         // linear region slope
constexpr double kMelBreak = kMelBreakHz * kMelPerHz;  // 15.0
const double kLogStep = std::log(6.4) / 27.0;

// numpy-style 'reflect' (edge sample not repeated); valid for any i.
std::size_t reflect_index(std::int64_t i, std::size_t n) {
    if (n == 1) return 0;
    const auto period = static_cast<std::int64_t>(2 * n - 2);
    std::int64_t j = ((i % period) + period) % period;
    if (j >= static_cast<std::int64_t>(n)) j = period - j;
    return static_cast<std::size_t>(j);
}

}  // namespace

void MfccConfig::validate() const {
    if (sample_rate == 0) throw ConfigError("mfcc: sample_rate must be positive");
    if (hop <= 0) throw ConfigError("mfcc: hop must be positive");
    if (n_fft <= 0 || !detail::is_pow2(static_cast<std::size_t>(n_fft)))
        throw ConfigError("mfcc: n_fft must be a positive power of two, got " +
                          std::to_string(n_fft));
    const int n_bins = n_fft / 2 + 1;
    if (n_mfcc <= 0 || n_mfcc > n_mels || n_mels > n_bins)
        throw ConfigError("mfcc: need 0 < n_mfcc <= n_mels <= n_fft/2+1");
    const double top = effective_fmax();
    if (fmin < 0.0 || fmin >= top || top > 0.5 * sample_rate)
        throw ConfigError("mfcc: need 0 <= fmin < fmax <= sample_rate/2");
    if (log_floor <= 0.0) throw ConfigError("mfcc: log_floor must be positive");
}

double hz_to_mel(double f) {
    if (f < 0.0) throw ArgumentError("hz_to_mel: negative frequency");
    if (f < kMelBreakHz) return f * kMelPerHz;
    return kMelBreak + std::log(f / kMelBreakHz) / kLogStep;
}

double mel_to_hz(double m) {
    if (m < 0.0) throw ArgumentError("mel_to_hz: negative mel value");
    if (m < kMelBreak) return m / kMelPerHz;
    return kMelBreakHz * std::exp(kLogStep * (m - kMelBreak));
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const MfccConfig& cfg) {
    cfg.validate();
    if (clip.samples.empty()) throw ArgumentError("frame_signal: empty clip");

    const std::size_t len = clip.samples.size();
    const int pad = cfg.n_fft / 2;
    const std::size_t n_frames = 1 + len / static_cast<std::size_t>(cfg.hop);

    std::vector<double> window(static_cast<std::size_t>(cfg.n_fft));
    for (int k = 0; k < cfg.n_fft; ++k)
        window[static_cast<std::size_t>(k)] =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / cfg.n_fft);

    std::vector<std::vector<double>> frames(n_frames);
    for (std::size_t t = 0; t < n_frames; ++t) {
        auto& frame = frames[t];
        frame.resize(static_cast<std::size_t>(cfg.n_fft));
        const std::int64_t start =
            static_cast<std::int64_t>(t) * cfg.hop - pad;  // in the unpadded signal
        for (int k = 0; k < cfg.n_fft; ++k) {
            const double s = clip.samples[reflect_index(start + k, len)];
            frame[static_cast<std::size_t>(k)] = s * window[static_cast<std::size_t>(k)];
        }
    }
    return frames;
}

std::vector<double> power_spectrum(const std::vector<double>& frame) {
    const std::size_t n = frame.size();
    if (!detail::is_pow2(n))
        throw ArgumentError("power_spectrum: frame length must be a power of two");
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = frame[i];
    detail::fft_pow2(buf);
    std::vector<double> out(n / 2 + 1);
    for (std::size_t b = 0; b <= n / 2; ++b) out[b] = std::norm(buf[b]);
    return out;
}

std::vector<double> mel_filterbank(const MfccConfig& cfg) {
    cfg.validate();
    const int n_bins = cfg.n_fft / 2 + 1;
    const double mel_lo = hz_to_mel(cfg.fmin);
    const double mel_hi = hz_to_mel(cfg.effective_fmax());

    // n_mels + 2 edge points, uniform in mel
    std::vector<double> hz(static_cast<std::size_t>(cfg.n_mels) + 2);
    for (int i = 0; i < cfg.n_mels + 2; ++i) {
        const double m = mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);
        hz[static_cast<std::size_t>(i)] = mel_to_hz(m);
    }

    std::vector<double> bank(static_cast<std::size_t>(cfg.n_mels) * n_bins, 0.0);
    const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
    for (int f = 0; f < cfg.n_mels; ++f) {
        const double left = hz[static_cast<std::size_t>(f)];
        const double center = hz[static_cast<std::size_t>(f) + 1];
        const double right = hz[static_cast<std::size_t>(f) + 2];
        const double enorm = 2.0 / (right - left);
        bool any = false;
        for (int b = 0; b < n_bins; ++b) {
            const double fb = b * bin_hz;
            const double up = (fb - left) / (center - left);
            const double down = (right - fb) / (right - center);
            const double w = std::max(0.0, std::min(up, down));
            if (w > 0.0) {
                bank[static_cast<std::size_t>(f) * n_bins + b] = w * enorm;
                any = true;
            }
        }
        if (!any)
            throw ConfigError("mel_filterbank: filter " + std::to_string(f) +
                              " covers no FFT bin; lower n_mels or raise n_fft");
    }
    return bank;
}

std::vector<double> dct_matrix(int n) {
    if (n <= 0) throw ArgumentError("dct_matrix: n must be positive");
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    const double s0 = std::sqrt(1.0 / n);
    const double sk = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            g[static_cast<std::size_t>(k) * n + j] =
                (k == 0 ? s0 : sk) *
                std::cos(std::numbers::pi * k * (2.0 * j + 1.0) / (2.0 * n));
    return g;
}

MfccMatrix mfcc(const AudioClip& clip, const MfccConfig& cfg) {
    cfg.validate();
    if (clip.sample_rate != cfg.sample_rate)
        throw ArgumentError("mfcc: clip rate " + std::to_string(clip.sample_rate) +
                            " does not match config rate " +
                            std::to_string(cfg.sample_rate));

    const auto frames = frame_signal(clip, cfg);
    const auto bank = mel_filterbank(cfg);
    const auto dct = dct_matrix(cfg.n_mels);
    const int n_bins = cfg.n_fft / 2 + 1;

    // Nonzero span per filter; triangles touch only a contiguous bin range.
    std::vector<std::pair<int, int>> span(static_cast<std::size_t>(cfg.n_mels));
    for (int f = 0; f < cfg.n_mels; ++f) {
        int lo = n_bins, hi = -1;
        for (int b = 0; b < n_bins; ++b) {
            if (bank[static_cast<std::size_t>(f) * n_bins + b] != 0.0) {
                lo = std::min(lo, b);
                hi = std::max(hi, b);
            }
        }
        span[static_cast<std::size_t>(f)] = {lo, hi};
    }

    MfccMatrix out = MfccMatrix::zeros(cfg.n_mfcc, static_cast<int>(frames.size()));
    std::vector<double> logmel(static_cast<std::size_t>(cfg.n_mels));
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto spec = power_spectrum(frames[t]);
        for (int f = 0; f < cfg.n_mels; ++f) {
            double e = 0.0;
            const auto [lo, hi] = span[static_cast<std::size_t>(f)];
            for (int b = lo; b <= hi; ++b)
                e += bank[static_cast<std::size_t>(f) * n_bins + b] * spec[static_cast<std::size_t>(b)];
            logmel[static_cast<std::size_t>(f)] = std::log(std::max(e, cfg.log_floor));
        }
        for (int k = 0; k < cfg.n_mfcc; ++k) {
            double acc = 0.0;
            for (int f = 0; f < cfg.n_mels; ++f)
                acc += dct[static_cast<std::size_t>(k) * cfg.n_mels + f] * logmel[static_cast<std::size_t>(f)];
            out.at(k, static_cast<int>(t)) = acc;
        }
    }
    return out;
}

}  // namespace voiceml

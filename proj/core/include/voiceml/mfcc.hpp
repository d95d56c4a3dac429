#pragma once

#include <cstdint>
#include <vector>

#include "voiceml/audio.hpp"

namespace voiceml {

struct MfccConfig {
    std::uint32_t sample_rate = 22050;
    int n_fft = 2048;  // power of two
    int hop = 512;
    int n_mels = 128;
    int n_mfcc = 15;  // d
    double fmin = 0.0;
    double fmax = 0.0;  // 0 means sample_rate / 2
    double log_floor = 1e-10;

    double effective_fmax() const {
        return fmax > 0.0 ? fmax : 0.5 * static_cast<double>(sample_rate);
    }
    // Throws ConfigError when any invariant fails.
    void validate() const;
};

// L x N coefficient matrix (L = n_mfcc rows, N = frames), row-major.
struct MfccMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // rows * cols

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const {
        return values[static_cast<std::size_t>(r) * cols + c];
    }
    static MfccMatrix zeros(int r, int c) {
        MfccMatrix m;
        m.rows = r;
        m.cols = c;
        m.values.assign(static_cast<std::size_t>(r) * c, 0.0);
        return m;
    }
};

// Slaney-style mel scale: linear below 1 kHz, logarithmic above.
double hz_to_mel(double f);
double mel_to_hz(double m);

// Center-padded (reflection, n_fft/2 per side) Hann-windowed frames.
// Frame t covers [t*hop, t*hop + n_fft) of the padded signal;
// count N = 1 + floor(len / hop).
std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              const MfccConfig& cfg);

// Squared DFT magnitude, bins 0 .. n_fft/2. frame.size() must be a power of
// two.
std::vector<double> power_spectrum(const std::vector<double>& frame);

// Triangular filters with centers uniformly spaced on the mel scale, each
// scaled by 2 / (f_{c+1} - f_{c-1}). Returned row-major,
// n_mels x (n_fft/2 + 1).
std::vector<double> mel_filterbank(const MfccConfig& cfg);

// Orthonormal DCT-II matrix, n x n, row-major.
std::vector<double> dct_matrix(int n);

// Full chain: frames -> power spectra -> mel energies -> ln(max(e, floor))
// -> orthonormal DCT-II -> first n_mfcc coefficients.
MfccMatrix mfcc(const AudioClip& clip, const MfccConfig& cfg);

}  // namespace voiceml

#pragma once

#include <cstdint>
#include <vector>

namespace voiceml {

// Mono sample buffer. Samples are dimensionless amplitudes, nominally in
// [-1, 1] (PCM16 decodes as value / 32768).
struct AudioClip {
    std::vector<double> samples;
    std::uint32_t sample_rate = 0;  // Hz, > 0

    double duration_s() const {
        return sample_rate ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
    }
};

}  // namespace voiceml

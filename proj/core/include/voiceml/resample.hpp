#pragma once

#include <cstdint>

#include "voiceml/audio.hpp"

namespace voiceml {

// Band-limited resampling with a Kaiser-windowed sinc kernel (half-width 32
// taps per side). Output length is round(len * target / source). Returns the
// input unchanged when target_rate == clip.sample_rate.
AudioClip resample(const AudioClip& clip, std::uint32_t target_rate);

}  // namespace voiceml

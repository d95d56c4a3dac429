#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voiceml/audio.hpp"

namespace voiceml {

// Decodes a RIFF/WAVE container holding 16-bit PCM, 1 or 2 channels.
// Stereo is averaged down to mono; samples are scaled by 1/32768.
// Throws DataError naming the offending chunk on malformed input or
// unsupported codec / bit depth.
AudioClip decode_wav(const std::vector<std::uint8_t>& bytes);

// PCM16 mono encoder used by the corpus generator. Samples are clamped to
// [-1, 1] and scaled by 32768.
std::vector<std::uint8_t> encode_wav16(const AudioClip& clip);

AudioClip read_wav_file(const std::string& path);
void write_wav_file(const std::string& path, const AudioClip& clip);

}  // namespace voiceml

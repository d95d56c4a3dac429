#include "voiceml/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "voiceml/errors.hpp"

namespace voiceml {

namespace {

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) |
           (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t read_u16(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xff));
    b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    b.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    b.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xff));
    b.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

bool tag_is(const std::vector<std::uint8_t>& b, std::size_t at, const char* tag) {
    return b[at] == static_cast<std::uint8_t>(tag[0]) &&
           b[at + 1] == static_cast<std::uint8_t>(tag[1]) &&
           b[at + 2] == static_cast<std::uint8_t>(tag[2]) &&
           b[at + 3] == static_cast<std::uint8_t>(tag[3]);
}

}  // namespace

AudioClip decode_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF"))
        throw DataError("wav: missing RIFF header");
    if (!tag_is(bytes, 8, "WAVE"))
        throw DataError("wav: RIFF form type is not WAVE");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t data_at = 0, data_len = 0;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::size_t chunk_at = pos;
        const std::uint32_t chunk_len = read_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (tag_is(bytes, chunk_at, "fmt ")) {
            if (body + 16 > bytes.size() || chunk_len < 16)
                throw DataError("wav: truncated 'fmt ' chunk");
            format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            rate = read_u32(bytes, body + 4);
            bits = read_u16(bytes, body + 14);
            have_fmt = true;
        } else if (tag_is(bytes, chunk_at, "data")) {
            data_at = body;
            data_len = chunk_len;
            have_data = true;
            if (body + data_len > bytes.size())
                throw DataError("wav: truncated 'data' chunk");
        }
        // chunks are word-aligned
        pos = body + chunk_len + (chunk_len & 1);
    }

    if (!have_fmt) throw DataError("wav: missing 'fmt ' chunk");
    if (!have_data) throw DataError("wav: missing 'data' chunk");
    if (format != 1)
        throw DataError("wav: 'fmt ' chunk declares non-PCM codec " +
                        std::to_string(format));
    if (bits != 16)
        throw DataError("wav: 'fmt ' chunk declares unsupported bit depth " +
                        std::to_string(bits));
    if (channels != 1 && channels != 2)
        throw DataError("wav: 'fmt ' chunk declares unsupported channel count " +
                        std::to_string(channels));
    if (rate == 0) throw DataError("wav: 'fmt ' chunk declares zero sample rate");

    const std::size_t frame_bytes = 2u * channels;
    if (data_len % frame_bytes != 0)
        throw DataError("wav: 'data' chunk length is not a whole frame count");
    const std::size_t frames = data_len / frame_bytes;

    AudioClip clip;
    clip.sample_rate = rate;
    clip.samples.resize(frames);
    constexpr double kScale = 1.0 / 32768.0;
    for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t at = data_at + i * frame_bytes;
        const auto s0 = static_cast<std::int16_t>(read_u16(bytes, at));
        if (channels == 1) {
            clip.samples[i] = s0 * kScale;
        } else {
            const auto s1 = static_cast<std::int16_t>(read_u16(bytes, at + 2));
            clip.samples[i] = 0.5 * (s0 + s1) * kScale;
        }
    }
    return clip;
}

std::vector<std::uint8_t> encode_wav16(const AudioClip& clip) {
    if (clip.sample_rate == 0)
        throw ArgumentError("encode_wav16: sample_rate must be positive");
    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
    const std::uint32_t data_len = n * 2;

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_len);
    for (const char* c = "RIFF"; *c; ++c) out.push_back(*c);
    put_u32(out, 36 + data_len);
    for (const char* c = "WAVEfmt "; *c; ++c) out.push_back(*c);
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, clip.sample_rate);
    put_u32(out, clip.sample_rate * 2);  // byte rate
    put_u16(out, 2);                     // block align
    put_u16(out, 16);                    // bits
    for (const char* c = "data"; *c; ++c) out.push_back(*c);
    put_u32(out, data_len);
    for (std::uint32_t i = 0; i < n; ++i) {
        double v = std::lround(clip.samples[i] * 32768.0);
        v = std::clamp(v, -32768.0, 32767.0);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
    return out;
}

AudioClip read_wav_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return decode_wav(bytes);
}

void write_wav_file(const std::string& path, const AudioClip& clip) {
    const auto bytes = encode_wav16(clip);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace voiceml

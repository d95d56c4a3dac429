#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "voiceml/errors.hpp"
#include "voiceml/mfcc.hpp"
#include "voiceml/resample.hpp"
#include "voiceml/rng.hpp"
#include "voiceml/savgol.hpp"
#include "voiceml/wav.hpp"

using namespace voiceml;

namespace {

constexpr double kPi = 3.14159265358979323846;

AudioClip sine_clip(double freq, std::uint32_t rate, double seconds, double amp = 0.8) {
    AudioClip clip;
    clip.sample_rate = rate;
    const std::size_t n = static_cast<std::size_t>(std::llround(seconds * rate));
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        clip.samples[i] = amp * std::sin(2.0 * kPi * freq * i / rate);
    return clip;
}

AudioClip noise_clip(std::uint32_t rate, double seconds, std::uint64_t seed) {
    AudioClip clip;
    clip.sample_rate = rate;
    auto eng = make_engine(seed);
    const std::size_t n = static_cast<std::size_t>(std::llround(seconds * rate));
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) clip.samples[i] = 0.3 * gaussian(eng);
    return clip;
}

}  // namespace

TEST_CASE("wav PCM16 round-trip recovers quantized samples") {
    AudioClip clip;
    clip.sample_rate = 44100;
    clip.samples = {0.0, 0.5, -0.5};
    AudioClip back = decode_wav(encode_wav16(clip));
    REQUIRE(back.sample_rate == 44100u);
    REQUIRE(back.samples.size() == 3);
    CHECK(back.samples[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(back.samples[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(back.samples[2] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("wav decode keeps the header-declared sample rate") {
    AudioClip clip = sine_clip(440.0, 44100, 0.05);
    AudioClip back = decode_wav(encode_wav16(clip));
    CHECK(back.sample_rate == 44100u);
    CHECK(back.samples.size() == clip.samples.size());
}

TEST_CASE("wav decode rejects a truncated data chunk") {
    AudioClip clip = sine_clip(440.0, 8000, 0.01);
    std::vector<std::uint8_t> bytes = encode_wav16(clip);
    bytes.resize(bytes.size() - 10);
    CHECK_THROWS_AS(decode_wav(bytes), DataError);
}

TEST_CASE("wav file write/read round-trip") {
    const std::string path = "tmp_roundtrip.wav";
    AudioClip clip = sine_clip(200.0, 22050, 0.02);
    write_wav_file(path, clip);
    AudioClip back = read_wav_file(path);
    REQUIRE(back.samples.size() == clip.samples.size());
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        CHECK(std::abs(back.samples[i] - clip.samples[i]) <= 0.5 / 32768.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_wav_file(path), IoError);
}

TEST_CASE("resample is the identity at the source rate") {
    AudioClip clip = sine_clip(1000.0, 22050, 0.1);
    AudioClip out = resample(clip, 22050);
    CHECK(out.samples == clip.samples);
}

TEST_CASE("resample halves the length for 2:1") {
    AudioClip clip = sine_clip(1000.0, 44100, 1.0);
    AudioClip out = resample(clip, 22050);
    CHECK(out.sample_rate == 22050u);
    CHECK(std::abs(static_cast<long>(out.samples.size()) - 22050L) <= 1);
}

TEST_CASE("resampled 1 kHz sine matches the analytic sine") {
    const double amp = 0.8;
    AudioClip clip = sine_clip(1000.0, 44100, 1.0, amp);
    AudioClip out = resample(clip, 22050);
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 200; i + 200 < out.samples.size(); ++i) {
        const double ref = amp * std::sin(2.0 * kPi * 1000.0 * i / 22050.0);
        err2 += (out.samples[i] - ref) * (out.samples[i] - ref);
        ref2 += ref * ref;
    }
    CHECK(std::sqrt(err2 / ref2) < 1e-3);
}

TEST_CASE("frame count is 1 + floor(len / hop)") {
    MfccConfig cfg;
    AudioClip clip;
    clip.sample_rate = cfg.sample_rate;
    clip.samples.assign(22050, 0.0);
    CHECK(frame_signal(clip, cfg).size() == 44);

    clip.samples.assign(512, 0.1);
    CHECK(frame_signal(clip, cfg).size() == 2);
}

TEST_CASE("zero clip gives zero frames and zero spectra") {
    MfccConfig cfg;
    AudioClip clip;
    clip.sample_rate = cfg.sample_rate;
    clip.samples.assign(4096, 0.0);
    auto frames = frame_signal(clip, cfg);
    for (const auto& frame : frames)
        for (double v : frame) CHECK(v == 0.0);
    auto spec = power_spectrum(frames[0]);
    REQUIRE(spec.size() == static_cast<std::size_t>(cfg.n_fft / 2 + 1));
    for (double v : spec) CHECK(v == 0.0);
}

TEST_CASE("power spectrum of a unit impulse is flat 1.0") {
    std::vector<double> frame(64, 0.0);
    frame[0] = 1.0;
    for (double v : power_spectrum(frame)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("windowed exact-bin sine obeys Parseval and concentrates energy") {
    const int n = 256, bin = 5;
    const double amp = 0.7;
    std::vector<double> window(n), frame(n);
    double window_energy = 0.0;
    for (int t = 0; t < n; ++t) {
        window[t] = 0.5 - 0.5 * std::cos(2.0 * kPi * t / n);  // periodic Hann
        frame[t] = window[t] * amp * std::sin(2.0 * kPi * bin * t / n);
        window_energy += window[t] * window[t];
    }
    std::vector<double> spec = power_spectrum(frame);
    double total = spec[0] + spec[n / 2];
    for (int k = 1; k < n / 2; ++k) total += 2.0 * spec[k];  // two-sided energy
    CHECK(total == doctest::Approx(window_energy * amp * amp * n / 2.0).epsilon(1e-6));

    double near = 0.0;
    for (int k = bin - 2; k <= bin + 2; ++k) near += spec[k];
    double onesided = 0.0;
    for (double v : spec) onesided += v;
    CHECK(near / onesided > 0.99);
}

TEST_CASE("mel scale fixed points and inverse") {
    CHECK(hz_to_mel(0.0) == 0.0);
    CHECK(hz_to_mel(1000.0) == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(mel_to_hz(hz_to_mel(4321.0)) == doctest::Approx(4321.0).epsilon(1e-12));
    CHECK(std::abs(mel_to_hz(hz_to_mel(4321.0)) - 4321.0) < 1e-9);
}

TEST_CASE("mel filterbank rows are non-negative and non-empty") {
    MfccConfig cfg;
    std::vector<double> fb = mel_filterbank(cfg);
    const int bins = cfg.n_fft / 2 + 1;
    REQUIRE(fb.size() == static_cast<std::size_t>(cfg.n_mels) * bins);
    for (int r = 0; r < cfg.n_mels; ++r) {
        double row_max = 0.0;
        for (int b = 0; b < bins; ++b) {
            CHECK(fb[static_cast<std::size_t>(r) * bins + b] >= 0.0);
            row_max = std::max(row_max, fb[static_cast<std::size_t>(r) * bins + b]);
        }
        CHECK(row_max > 0.0);
    }
}

TEST_CASE("three linear-region filters center at 250/500/750 Hz") {
    MfccConfig cfg;
    cfg.n_mels = 3;
    cfg.n_mfcc = 3;
    cfg.fmin = 0.0;
    cfg.fmax = 1000.0;
    std::vector<double> fb = mel_filterbank(cfg);
    const int bins = cfg.n_fft / 2 + 1;
    const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
    const double expected[3] = {250.0, 500.0, 750.0};
    for (int r = 0; r < 3; ++r) {
        int arg = 0;
        for (int b = 1; b < bins; ++b)
            if (fb[static_cast<std::size_t>(r) * bins + b] >
                fb[static_cast<std::size_t>(r) * bins + arg])
                arg = b;
        CHECK(std::abs(arg * bin_hz - expected[r]) <= bin_hz);
    }
}

TEST_CASE("filter centers are uniformly spaced in mel") {
    MfccConfig cfg;
    cfg.n_mels = 40;
    std::vector<double> fb = mel_filterbank(cfg);
    const int bins = cfg.n_fft / 2 + 1;
    const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
    std::vector<double> centers(cfg.n_mels);
    for (int r = 0; r < cfg.n_mels; ++r) {
        int arg = 0;
        for (int b = 1; b < bins; ++b)
            if (fb[static_cast<std::size_t>(r) * bins + b] >
                fb[static_cast<std::size_t>(r) * bins + arg])
                arg = b;
        centers[r] = hz_to_mel(arg * bin_hz);
    }
    const double step =
        (hz_to_mel(cfg.effective_fmax()) - hz_to_mel(cfg.fmin)) / (cfg.n_mels + 1);
    for (int r = 0; r + 1 < cfg.n_mels; ++r)
        CHECK(centers[r + 1] - centers[r] == doctest::Approx(step).epsilon(0.25));
}

TEST_CASE("DCT matrix is orthonormal") {
    const int n = 32;
    std::vector<double> d = dct_matrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += d[i * n + k] * d[j * n + k];
            CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("DCT of a constant vector loads only coefficient 0") {
    const int n = 16;
    const double c = 2.5;
    std::vector<double> d = dct_matrix(n);
    for (int i = 0; i < n; ++i) {
        double out = 0.0;
        for (int k = 0; k < n; ++k) out += d[i * n + k] * c;
        if (i == 0)
            CHECK(out == doctest::Approx(std::sqrt(static_cast<double>(n)) * c));
        else
            CHECK(std::abs(out) < 1e-9);
    }
}

TEST_CASE("DCT round-trip reproduces a random vector") {
    const int n = 64;
    std::vector<double> d = dct_matrix(n);
    auto eng = make_engine(5);
    std::vector<double> v(n), y(n, 0.0), back(n, 0.0);
    for (double& x : v) x = gaussian(eng);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) y[i] += d[i * n + k] * v[k];
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) back[k] += d[i * n + k] * y[i];
    for (int k = 0; k < n; ++k) CHECK(back[k] == doctest::Approx(v[k]).epsilon(1e-9));
}

TEST_CASE("silent clip yields the constant-floor cepstrum") {
    MfccConfig cfg;
    AudioClip clip;
    clip.sample_rate = cfg.sample_rate;
    clip.samples.assign(22050, 0.0);
    MfccMatrix m = mfcc(clip, cfg);
    REQUIRE(m.rows == cfg.n_mfcc);
    REQUIRE(m.cols == 44);
    const double c0 = std::sqrt(static_cast<double>(cfg.n_mels)) * std::log(cfg.log_floor);
    for (int t = 0; t < m.cols; ++t) {
        CHECK(m.at(0, t) == doctest::Approx(c0).epsilon(1e-9));
        for (int r = 1; r < m.rows; ++r) CHECK(std::abs(m.at(r, t)) < 1e-9);
        for (int r = 0; r < m.rows; ++r) CHECK(m.at(r, t) == m.at(r, 0));
    }
}

TEST_CASE("scaling a broadband clip shifts only coefficient 0") {
    MfccConfig cfg;
    AudioClip clip = noise_clip(cfg.sample_rate, 0.4, 99);
    AudioClip loud = clip;
    for (double& v : loud.samples) v *= 2.0;
    MfccMatrix a = mfcc(clip, cfg);
    MfccMatrix b = mfcc(loud, cfg);
    const double shift = std::sqrt(static_cast<double>(cfg.n_mels)) * std::log(4.0);
    for (int t = 0; t < a.cols; ++t) {
        CHECK(b.at(0, t) - a.at(0, t) == doctest::Approx(shift).epsilon(1e-6));
        for (int r = 1; r < a.rows; ++r)
            CHECK(b.at(r, t) == doctest::Approx(a.at(r, t)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("frame-count formula holds for random (len, hop) pairs") {
    auto eng = make_engine(41);
    for (int trial = 0; trial < 100; ++trial) {
        MfccConfig cfg;
        cfg.hop = 1 + static_cast<int>(uniform_index(eng, 2048));
        const std::size_t len = 1 + uniform_index(eng, 40000);
        AudioClip clip;
        clip.sample_rate = cfg.sample_rate;
        clip.samples.assign(len, 0.01);
        const std::size_t expect = 1 + len / static_cast<std::size_t>(cfg.hop);
        CHECK(frame_signal(clip, cfg).size() == expect);
    }
}

TEST_CASE("mfcc config validation rejects bad settings") {
    MfccConfig cfg;
    cfg.n_fft = 1000;  // not a power of two
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = MfccConfig{};
    cfg.hop = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = MfccConfig{};
    cfg.n_mfcc = 200;  // > n_mels
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = MfccConfig{};
    cfg.fmax = 20000.0;  // > sr/2
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_NOTHROW(MfccConfig{}.validate());
}

TEST_CASE("classic Savitzky-Golay weights") {
    SgFilter d1 = sg_filter(1, 1, 1);
    REQUIRE(d1.weights.size() == 3);
    CHECK(d1.weights[0] == doctest::Approx(-0.5));
    CHECK(d1.weights[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(d1.weights[2] == doctest::Approx(0.5));

    SgFilter s2 = sg_filter(2, 2, 0);
    const double expect[5] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
    for (int i = 0; i < 5; ++i) CHECK(s2.weights[i] == doctest::Approx(expect[i]));

    double center = 0.0;
    const double parabola[5] = {4.0, 1.0, 0.0, 1.0, 4.0};  // f(m) = m^2
    for (int i = 0; i < 5; ++i) center += s2.weights[i] * parabola[i];
    CHECK(std::abs(center) < 1e-12);
}

TEST_CASE("weight moments: deriv 0 sums to 1, deriv 1 sums to 0") {
    for (int M = 1; M <= 4; ++M)
        for (int p = 1; p <= std::min(4, 2 * M); ++p) {
            double s0 = 0.0, s1 = 0.0;
            for (double w : sg_filter(M, p, 0).weights) s0 += w;
            for (double w : sg_filter(M, p, 1).weights) s1 += w;
            CHECK(s0 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(s1) < 1e-12);
        }
}

TEST_CASE("sg_filter rejects invalid orders") {
    CHECK_THROWS_AS(sg_filter(0, 1, 1), ArgumentError);
    CHECK_THROWS_AS(sg_filter(1, 3, 0), ArgumentError);  // 2M+1 <= p
    CHECK_THROWS_AS(sg_filter(2, 1, 2), ArgumentError);  // deriv > p
    CHECK_THROWS_AS(sg_filter(2, -1, 0), ArgumentError);
}

TEST_CASE("delta of constant rows is zero") {
    MfccMatrix m = MfccMatrix::zeros(4, 30);
    for (int r = 0; r < 4; ++r)
        for (int t = 0; t < 30; ++t) m.at(r, t) = 1.5 * r - 2.0;
    MfccMatrix d = delta(m, 9, 1);
    for (double v : d.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("delta recovers the slope of a ramp on interior frames") {
    MfccMatrix m = MfccMatrix::zeros(2, 40);
    for (int t = 0; t < 40; ++t) {
        m.at(0, t) = 3.0 * t;
        m.at(1, t) = -0.5 * t + 7.0;
    }
    MfccMatrix d = delta(m, 9, 1);
    for (int t = 4; t < 36; ++t) {
        CHECK(d.at(0, t) == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(d.at(1, t) == doctest::Approx(-0.5).epsilon(1e-9));
    }
    CHECK(d.at(0, 0) < 3.0);
    CHECK(d.at(0, 39) < 3.0);
}

TEST_CASE("delta is exactly antisymmetric") {
    auto eng = make_engine(17);
    MfccMatrix m = MfccMatrix::zeros(5, 25);
    for (double& v : m.values) v = gaussian(eng);
    MfccMatrix neg = m;
    for (double& v : neg.values) v = -v;
    MfccMatrix da = delta(m, 9, 1);
    MfccMatrix db = delta(neg, 9, 1);
    for (std::size_t i = 0; i < da.values.size(); ++i) CHECK(da.values[i] == -db.values[i]);
}

TEST_CASE("delta validates width") {
    MfccMatrix m = MfccMatrix::zeros(2, 20);
    CHECK_THROWS_AS(delta(m, 8, 1), ArgumentError);
    CHECK_THROWS_AS(delta(m, 1, 1), ArgumentError);
}

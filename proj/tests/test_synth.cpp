#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "voiceml/errors.hpp"
#include "voiceml/features.hpp"
#include "voiceml/synth.hpp"

using namespace voiceml;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

CorpusSpec tiny_spec() {
    CorpusSpec spec;
    spec.duration_s = 0.5;
    for (int c = 0; c < kNumClasses; ++c) spec.regimes[c].count = 3;
    return spec;
}

}  // namespace

TEST_CASE("duration and rate fix the sample count") {
    VoiceParams p;
    p.formants = default_formants();
    AudioClip clip = synth_vowel(p, 1);
    CHECK(clip.samples.size() == 132300);
    CHECK(clip.sample_rate == 44100u);
}

TEST_CASE("clean-voice autocorrelation peaks at the pitch period") {
    VoiceParams p;
    p.f0 = 150.0;  // period = 294 samples at 44100 Hz
    p.jitter = 0.0;
    p.shimmer = 0.0;
    p.hnr_db = std::numeric_limits<double>::infinity();
    p.formants = default_formants();
    p.duration_s = 1.0;
    AudioClip clip = synth_vowel(p, 9);

    const std::size_t start = 4000;
    const std::size_t window = 20000;
    double best = -1.0;
    int best_lag = 0;
    for (int lag = 200; lag <= 400; ++lag) {
        double acc = 0.0;
        for (std::size_t i = start; i < start + window; ++i)
            acc += clip.samples[i] * clip.samples[i + lag];
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    CHECK(std::abs(best_lag - 294) <= 1);
}

TEST_CASE("synthesis is deterministic in (params, seed)") {
    VoiceParams p;
    p.jitter = 0.05;
    p.shimmer = 0.05;
    p.hnr_db = 15.0;
    p.formants = default_formants();
    p.duration_s = 0.2;
    AudioClip a = synth_vowel(p, 33);
    AudioClip b = synth_vowel(p, 33);
    CHECK(a.samples == b.samples);
    AudioClip c = synth_vowel(p, 34);
    CHECK(a.samples != c.samples);
}

TEST_CASE("output is peak-normalized to 0.9") {
    VoiceParams p;
    p.formants = default_formants();
    p.duration_s = 0.2;
    AudioClip clip = synth_vowel(p, 2);
    double peak = 0.0;
    for (double v : clip.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("voice parameter validation") {
    VoiceParams p;
    p.formants = default_formants();
    p.f0 = 500.0;
    CHECK_THROWS_AS(synth_vowel(p, 1), ArgumentError);
    p = VoiceParams{};
    p.jitter = 0.3;
    CHECK_THROWS_AS(synth_vowel(p, 1), ArgumentError);
    p = VoiceParams{};
    p.shimmer = -0.1;
    CHECK_THROWS_AS(synth_vowel(p, 1), ArgumentError);
    p = VoiceParams{};
    p.hnr_db = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(synth_vowel(p, 1), ArgumentError);
    p = VoiceParams{};
    p.duration_s = 0.0;
    CHECK_THROWS_AS(synth_vowel(p, 1), ArgumentError);
}

TEST_CASE("corpus generation writes every planned clip") {
    TempDir dir("tmp_corpus_a");
    const std::string manifest = gen_corpus(tiny_spec(), dir.path.string(), 2);
    std::vector<ManifestEntry> entries = read_manifest(manifest);
    REQUIRE(entries.size() == 12);
    std::set<ClassLabel> labels;
    for (const ManifestEntry& entry : entries) {
        labels.insert(entry.label);
        CHECK(std::filesystem::exists(dir.path / entry.path));
    }
    CHECK(labels.size() == 4);
}

TEST_CASE("zero-count classes vanish from the manifest") {
    TempDir dir("tmp_corpus_b");
    CorpusSpec spec = tiny_spec();
    spec.regimes[static_cast<int>(ClassLabel::Normal)].count = 0;
    const std::string manifest = gen_corpus(spec, dir.path.string());
    for (const ManifestEntry& entry : read_manifest(manifest))
        CHECK(entry.label != ClassLabel::Normal);
}

TEST_CASE("fixed seed reproduces the corpus byte for byte") {
    TempDir a("tmp_corpus_c1");
    TempDir b("tmp_corpus_c2");
    CorpusSpec spec = tiny_spec();
    gen_corpus(spec, a.path.string(), 3);
    gen_corpus(spec, b.path.string(), 1);
    CHECK(slurp(a.path / "manifest.csv") == slurp(b.path / "manifest.csv"));
    CHECK(slurp(a.path / "normal_000.wav") == slurp(b.path / "normal_000.wav"));
    CHECK(slurp(a.path / "vocal_palsy_002.wav") == slurp(b.path / "vocal_palsy_002.wav"));
}

TEST_CASE("corpus spec validation") {
    CorpusSpec spec = tiny_spec();
    spec.regimes[0].f0 = {300.0, 100.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = tiny_spec();
    spec.formants.clear();
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = tiny_spec();
    spec.regimes[2].count = -1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

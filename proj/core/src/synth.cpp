#include "voiceml/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"
#include "voiceml/rng.hpp"
#include "voiceml/wav.hpp"

namespace voiceml {

std::vector<Formant> default_formants() {
    return {{700.0, 130.0}, {1220.0, 160.0}, {2600.0, 250.0}};
}

AudioClip synth_vowel(const VoiceParams& p, std::uint64_t seed) {
    if (p.f0 < 60.0 || p.f0 > 400.0)
        throw ArgumentError("synth_vowel: f0 must lie in [60, 400] Hz");
    if (p.jitter < 0.0 || p.jitter > 0.2)
        throw ArgumentError("synth_vowel: jitter must lie in [0, 0.2]");
    if (p.shimmer < 0.0 || p.shimmer > 0.2)
        throw ArgumentError("synth_vowel: shimmer must lie in [0, 0.2]");
    if (!(p.duration_s > 0.0)) throw ArgumentError("synth_vowel: duration must be positive");
    if (p.sample_rate == 0) throw ArgumentError("synth_vowel: zero sample rate");
    if (std::isnan(p.hnr_db)) throw ArgumentError("synth_vowel: hnr_db is NaN");

    const std::size_t n =
        static_cast<std::size_t>(std::llround(p.duration_s * p.sample_rate));
    std::mt19937_64 eng = make_engine(seed);

    // Glottal pulse train with per-cycle period and amplitude perturbation.
    std::vector<double> signal(n, 0.0);
    const double period = static_cast<double>(p.sample_rate) / p.f0;
    double t = 0.0;
    while (t < static_cast<double>(n)) {
        const double amp = 1.0 + p.shimmer * gaussian(eng);
        const std::size_t pos = static_cast<std::size_t>(std::llround(t));
        if (pos < n) signal[pos] += amp;
        double step = period * (1.0 + p.jitter * gaussian(eng));
        if (step < 1.0) step = 1.0;
        t += step;
    }

    // Cascaded two-pole resonators (Klatt coefficients).
    const double dt = 1.0 / static_cast<double>(p.sample_rate);
    for (const Formant& formant : p.formants) {
        const double c = -std::exp(-2.0 * M_PI * formant.bandwidth_hz * dt);
        const double b =
            2.0 * std::exp(-M_PI * formant.bandwidth_hz * dt) *
            std::cos(2.0 * M_PI * formant.hz * dt);
        const double a = 1.0 - b - c;
        double y1 = 0.0, y2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = a * signal[i] + b * y1 + c * y2;
            y2 = y1;
            y1 = y;
            signal[i] = y;
        }
    }

    // Additive white noise scaled to the requested harmonics-to-noise ratio.
    if (!std::isinf(p.hnr_db)) {
        double harmonic_power = 0.0;
        for (double v : signal) harmonic_power += v * v;
        harmonic_power /= static_cast<double>(n);
        std::vector<double> noise(n);
        double noise_power = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            noise[i] = gaussian(eng);
            noise_power += noise[i] * noise[i];
        }
        noise_power /= static_cast<double>(n);
        if (harmonic_power > 0.0 && noise_power > 0.0) {
            const double target = harmonic_power / std::pow(10.0, p.hnr_db / 10.0);
            const double scale = std::sqrt(target / noise_power);
            for (std::size_t i = 0; i < n; ++i) signal[i] += scale * noise[i];
        }
    }

    double peak = 0.0;
    for (double v : signal) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        const double scale = 0.9 / peak;
        for (double& v : signal) v *= scale;
    }

    AudioClip clip;
    clip.samples = std::move(signal);
    clip.sample_rate = p.sample_rate;
    return clip;
}

CorpusSpec::CorpusSpec() {
    regimes[static_cast<int>(ClassLabel::Normal)] =
        {50, {140, 220}, {0.001, 0.005}, {0.01, 0.03}, {25, 35}};
    regimes[static_cast<int>(ClassLabel::Neoplasm)] =
        {40, {120, 200}, {0.02, 0.04}, {0.04, 0.08}, {8, 14}};
    regimes[static_cast<int>(ClassLabel::Phonotrauma)] =
        {60, {130, 210}, {0.008, 0.015}, {0.10, 0.18}, {15, 22}};
    regimes[static_cast<int>(ClassLabel::VocalPalsy)] =
        {50, {100, 180}, {0.08, 0.15}, {0.03, 0.06}, {5, 10}};
}

void CorpusSpec::validate() const {
    if (sample_rate == 0) throw ConfigError("corpus: zero sample rate");
    if (!(duration_s > 0.0)) throw ConfigError("corpus: duration must be positive");
    if (formants.empty()) throw ConfigError("corpus: no formants");
    for (int c = 0; c < kNumClasses; ++c) {
        const ClassRegime& r = regimes[c];
        if (r.count < 0) throw ConfigError("corpus: negative count for " + label_name(static_cast<ClassLabel>(c)));
        for (const ParamRange& range : {r.f0, r.jitter, r.shimmer, r.hnr_db})
            if (!(range.lo <= range.hi))
                throw ConfigError("corpus: inverted range for " +
                                  label_name(static_cast<ClassLabel>(c)));
    }
}

namespace {

double draw_range(std::mt19937_64& eng, const ParamRange& range) {
    if (range.lo == range.hi) return range.lo;
    return uniform_real(eng, range.lo, range.hi);
}

}  // namespace

std::string gen_corpus(const CorpusSpec& spec, const std::string& out_dir, int jobs) {
    spec.validate();
    std::filesystem::path base(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(base, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

    struct Job {
        std::string filename;
        ClassLabel label;
        std::uint64_t file_seed;
    };
    std::vector<Job> plan;
    char buf[64];
    std::uint64_t next_index = 0;
    for (int c = 0; c < kNumClasses; ++c) {
        const ClassLabel label = static_cast<ClassLabel>(c);
        for (int i = 0; i < spec.regimes[c].count; ++i) {
            std::snprintf(buf, sizeof buf, "%s_%03d.wav", label_name(label).c_str(), i);
            plan.push_back({buf, label, derive_seed(spec.seed, next_index)});
            ++next_index;
        }
    }

    parallel_for(plan.size(), jobs, [&](std::size_t i) {
        const Job& job = plan[i];
        const ClassRegime& regime = spec.regimes[static_cast<int>(job.label)];
        std::mt19937_64 eng = make_engine(derive_seed(job.file_seed, 0));
        VoiceParams p;
        p.f0 = draw_range(eng, regime.f0);
        p.jitter = draw_range(eng, regime.jitter);
        p.shimmer = draw_range(eng, regime.shimmer);
        p.hnr_db = draw_range(eng, regime.hnr_db);
        p.formants = spec.formants;
        p.duration_s = spec.duration_s;
        p.sample_rate = spec.sample_rate;
        AudioClip clip = synth_vowel(p, derive_seed(job.file_seed, 1));
        write_wav_file((base / job.filename).string(), clip);
    });

    std::vector<ManifestEntry> entries;
    entries.reserve(plan.size());
    for (const Job& job : plan) entries.push_back({job.filename, job.label});
    const std::string manifest_path = (base / "manifest.csv").string();
    std::snprintf(buf, sizeof buf, "seed: %llu",
                  static_cast<unsigned long long>(spec.seed));
    write_manifest(manifest_path, entries, buf);
    return manifest_path;
}

}  // namespace voiceml

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voiceml/audio.hpp"
#include "voiceml/features.hpp"

namespace voiceml {

struct Formant {
    double hz = 0.0;
    double bandwidth_hz = 0.0;
};

struct VoiceParams {
    double f0 = 150.0;        // [60, 400]
    double jitter = 0.0;      // [0, 0.2] cycle-to-cycle period perturbation
    double shimmer = 0.0;     // [0, 0.2] per-cycle amplitude perturbation
    double hnr_db = 25.0;     // +inf = noiseless
    std::vector<Formant> formants;
    double duration_s = 3.0;
    std::uint32_t sample_rate = 44100;
};

// Standard /a/ vowel resonances.
std::vector<Formant> default_formants();

// Jittered/shimmered pulse train -> cascaded two-pole resonators -> additive
// white noise at hnr_db -> peak normalization to 0.9.
AudioClip synth_vowel(const VoiceParams& p, std::uint64_t seed);

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct ClassRegime {
    int count = 0;
    ParamRange f0;
    ParamRange jitter;
    ParamRange shimmer;
    ParamRange hnr_db;
};

struct CorpusSpec {
    std::uint64_t seed = 7;
    std::uint32_t sample_rate = 44100;
    double duration_s = 3.0;
    std::vector<Formant> formants = default_formants();
    ClassRegime regimes[kNumClasses];

    CorpusSpec();  // default class regimes, counts 50/40/60/50
    void validate() const;
};

// Writes one PCM16 WAV per clip plus a manifest; returns the manifest path.
// Per-file parameters and synthesis streams derive from (seed, file index),
// so generation order and parallelism never change the bytes.
std::string gen_corpus(const CorpusSpec& spec, const std::string& out_dir,
                       int jobs = 1);

}  // namespace voiceml

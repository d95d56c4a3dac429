#pragma once

#include <cstdint>
#include <string>

#include "voiceml/features.hpp"
#include "voiceml/shac.hpp"
#include "voiceml/synth.hpp"

namespace voiceml::cli {

// Defaults reproduce the published protocol: 22050 Hz front end, d = 15
// (45-dim vectors), 5-fold CV, SHAC budget 1000 / batch 100 / 10 classifiers.
struct RunConfig {
    ExtractOptions extract;
    int cv_k = 5;
    ShacConfig shac;
    std::uint64_t tune_seed = 11;
    std::uint64_t eval_seed = 23;
    std::uint64_t train_seed = 42;
    bool svm_standardize = false;

    // Unknown sections or keys are rejected with the offending name.
    static RunConfig load(const std::string& path);
    static RunConfig defaults();
};

CorpusSpec load_corpus_spec(const std::string& path);

}  // namespace voiceml::cli

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "voiceml/gbt.hpp"

namespace voiceml {

struct SpaceParam {
    enum class Kind { Discrete, Uniform };
    std::string name;
    Kind kind = Kind::Uniform;
    std::vector<double> values;  // Discrete
    double lo = 0.0, hi = 1.0;   // Uniform
};

struct SearchSpace {
    std::vector<SpaceParam> params;

    void validate() const;  // unique names, lo < hi, non-empty value lists
};

// One value per space parameter; continuous entries 3-decimal rounded.
using HyperparamSample = std::vector<double>;

struct ShacConfig {
    int budget = 1000;
    int batch = 100;
    int max_classifiers = 10;
    int final_batch = 100;
    int reject_cap = 10000;
};

struct ShacEvaluation {
    HyperparamSample sample;
    double score = 0.0;
    int stage = 0;               // -1 = final candidate batch
    bool cascade_fallback = false;  // accepted via reject_cap exhaustion
};

struct ScoredSample {
    HyperparamSample sample;
    double score = 0.0;
};

struct ShacResult {
    std::vector<ShacEvaluation> evaluated;  // chronological, <= budget entries
    std::vector<GbtModel> cascade;
    std::vector<ScoredSample> candidates;  // score > mean + sigma of final batch, descending
    int n_stages = 0;
    bool reused_last_stage = false;  // final batch = last stage (budget exhausted)
};

HyperparamSample sample_uniform(const SearchSpace& space, std::mt19937_64& rng);

// Indices of scores strictly above mean + 1 population sigma, sorted by
// descending score (stable).
std::vector<std::size_t> select_candidates(const std::vector<double>& scores);

using Objective = std::function<double(const HyperparamSample&)>;

// Cascade search: uniform stages filtered by per-stage GBT classifiers
// (depth 3, 50 rounds) trained on above/below-median labels. Objective calls
// within a stage may run on `jobs` workers; results do not depend on jobs.
ShacResult run_shac(const SearchSpace& space, const Objective& objective,
                    const ShacConfig& cfg, std::uint64_t seed, int jobs = 1);

// Delimited history log: stage, sample values, score, accepted-by-cascade.
void export_history(const ShacResult& result, const SearchSpace& space,
                    const std::string& path);

}  // namespace voiceml

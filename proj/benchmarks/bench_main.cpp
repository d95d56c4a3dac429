#include <benchmark/benchmark.h>

#include <vector>

#include "voiceml/forest.hpp"
#include "voiceml/mfcc.hpp"
#include "voiceml/pipeline.hpp"
#include "voiceml/rng.hpp"
#include "voiceml/savgol.hpp"
#include "voiceml/svm.hpp"
#include "voiceml/synth.hpp"

namespace {

voiceml::AudioClip bench_clip() {
    voiceml::VoiceParams vp;
    vp.duration_s = 3.0;
    vp.sample_rate = 22050;
    return voiceml::synth_vowel(vp, 123);
}

void make_blobs(std::size_t n, std::size_t dim, int n_classes, std::uint64_t seed,
                std::vector<std::vector<double>>& X, std::vector<int>& y) {
    auto eng = voiceml::make_engine(seed);
    X.assign(n, std::vector<double>(dim));
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % n_classes);
        y[i] = c;
        for (std::size_t j = 0; j < dim; ++j)
            X[i][j] = 2.0 * c + voiceml::gaussian(eng);
    }
}

void BM_Mfcc(benchmark::State& state) {
    const voiceml::AudioClip clip = bench_clip();
    voiceml::MfccConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(voiceml::mfcc(clip, cfg));
}
BENCHMARK(BM_Mfcc)->Unit(benchmark::kMillisecond);

void BM_Delta(benchmark::State& state) {
    const voiceml::AudioClip clip = bench_clip();
    const voiceml::MfccMatrix coeffs = voiceml::mfcc(clip, voiceml::MfccConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(voiceml::delta(coeffs, 9, 1));
}
BENCHMARK(BM_Delta)->Unit(benchmark::kMicrosecond);

void BM_SmoTrain(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<std::vector<double>> X;
    std::vector<int> blob_y;
    make_blobs(n, 12, 2, 99, X, blob_y);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = blob_y[i] == 0 ? 1 : -1;
    voiceml::SvmParams params;
    params.C = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(voiceml::smo_train(X, y, params));
}
BENCHMARK(BM_SmoTrain)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_FitForest(benchmark::State& state) {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_blobs(200, 45, 4, 7, X, y);
    voiceml::TreeParams params;
    for (auto _ : state)
        benchmark::DoNotOptimize(voiceml::fit_forest(X, y, 50, params, 17, 4, 1));
}
BENCHMARK(BM_FitForest)->Unit(benchmark::kMillisecond);

void BM_Objective(benchmark::State& state) {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_blobs(120, 45, 4, 21, X, y);
    voiceml::FeatureTable table;
    table.d = 15;
    for (std::size_t i = 0; i < X.size(); ++i) {
        voiceml::FeatureRow row;
        row.clip_id = "b" + std::to_string(i);
        row.features.values = X[i];
        row.features.d = 15;
        row.label = static_cast<voiceml::ClassLabel>(y[i]);
        table.rows.push_back(std::move(row));
    }
    voiceml::PipelineHyperparams hp;
    hp.rf_trees = 20;
    for (auto _ : state)
        benchmark::DoNotOptimize(voiceml::cross_validate(table, hp, 5, 11, 1));
}
BENCHMARK(BM_Objective)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voiceml/features.hpp"
#include "voiceml/forest.hpp"
#include "voiceml/gbt.hpp"
#include "voiceml/metrics.hpp"
#include "voiceml/shac.hpp"
#include "voiceml/svm.hpp"

namespace voiceml {

enum class ModelKind { SvmPipeline, Gbt };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct PipelineHyperparams {
    ModelKind kind = ModelKind::SvmPipeline;
    // svm-pipeline: RF selection stage + OvO RBF SVM
    int rf_trees = 100;
    int rf_depth = -1;  // -1 = unlimited
    double sel_threshold = 0.01;
    double svm_C = 1.0;
    double gamma_raw = -1.0;
    bool standardize = false;
    // gbt baseline (full features, no selection stage)
    int gbt_estimators = 100;
    int gbt_depth = 3;
    double gbt_lr = 0.1;
};

struct FoldSplit {
    std::vector<std::vector<std::size_t>> folds;
    std::uint64_t seed = 0;
};

// Stratified: per-class seeded shuffle, then round-robin over folds.
FoldSplit make_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

struct MetricReport {
    Metrics mean;
    double std_dev = 0.0;  // population std of per-fold weighted scores
    std::vector<Metrics> folds;
};

struct TrainedPipeline {
    ModelKind kind = ModelKind::SvmPipeline;
    int d = 0;
    std::vector<bool> mask;  // over the 3d input features
    std::vector<double> importances;
    bool standardize = false;
    std::vector<double> feat_mean, feat_std;  // masked dimension, if standardize
    OvoSvm svm;
    GbtModel gbt;
    PipelineHyperparams hp;
    std::string fingerprint;  // of the extraction options
    std::uint64_t train_seed = 0;

    int n_selected() const;
    int predict(const std::vector<double>& x) const;
};

// fit_forest -> importances -> select_mask -> classifier on masked features;
// gamma resolved against the post-mask dimensionality. The gbt baseline
// trains on all features (mask all-true).
TrainedPipeline train_pipeline(const std::vector<std::vector<double>>& X,
                               const std::vector<int>& y,
                               const PipelineHyperparams& hp, std::uint64_t seed);

void table_to_xy(const FeatureTable& table, std::vector<std::vector<double>>& X,
                 std::vector<int>& y);

MetricReport cross_validate(const FeatureTable& table, const PipelineHyperparams& hp,
                            int k, std::uint64_t seed, int jobs = 1);

struct CandidateEval {
    PipelineHyperparams hp;
    HyperparamSample sample;
    double tune_score = 0.0;  // objective score (tune_seed folds)
    double eval_score = 0.0;  // re-evaluated score (eval_seed folds)
};

struct TuneResult {
    PipelineHyperparams best;
    HyperparamSample best_sample;
    double best_tune_score = 0.0;
    double best_eval_score = 0.0;
    bool fallback = false;  // candidate set was empty; best evaluated sample used
    std::vector<CandidateEval> candidates;
    ShacResult shac;
};

SearchSpace make_svm_space();
SearchSpace make_gbt_space();
PipelineHyperparams hp_from_sample(ModelKind kind, const SearchSpace& space,
                                   const HyperparamSample& sample);

// SHAC over the model kind's space; objective = cross_validate(..., k,
// tune_seed).weighted; candidates re-ranked on eval_seed folds. A sample
// whose training fails scores 0 (documented: rounding may land on an open
// bound, e.g. C = 0.000).
TuneResult tune(const FeatureTable& table, ModelKind kind, const ShacConfig& cfg,
                std::uint64_t tune_seed, std::uint64_t eval_seed, int k = 5,
                int jobs = 1);

void save_model(const std::string& path, const TrainedPipeline& pipeline,
                const ExtractOptions& opt);
TrainedPipeline load_model(const std::string& path, ExtractOptions* opt_out = nullptr);

std::string options_fingerprint(const ExtractOptions& opt);

}  // namespace voiceml

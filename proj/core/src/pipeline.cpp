#include "voiceml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"
#include "voiceml/rng.hpp"

namespace voiceml {

std::string model_kind_name(ModelKind kind) {
    return kind == ModelKind::SvmPipeline ? "svm-pipeline" : "gbt";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "svm-pipeline") return ModelKind::SvmPipeline;
    if (name == "gbt") return ModelKind::Gbt;
    throw ConfigError("unknown model kind '" + name + "' (svm-pipeline|gbt)");
}

FoldSplit make_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
    if (k < 2) throw ArgumentError("make_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > labels.size())
        throw ArgumentError("make_folds: k exceeds sample count");
    int max_label = 0;
    for (int label : labels) {
        if (label < 0) throw ArgumentError("make_folds: negative label");
        max_label = std::max(max_label, label);
    }

    FoldSplit split;
    split.seed = seed;
    split.folds.assign(k, {});
    for (int c = 0; c <= max_label; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        if (members.empty()) continue;
        std::mt19937_64 eng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(c)));
        shuffle_inplace(members, eng);
        for (std::size_t i = 0; i < members.size(); ++i)
            split.folds[i % k].push_back(members[i]);
    }
    for (auto& fold : split.folds) std::sort(fold.begin(), fold.end());
    return split;
}

int TrainedPipeline::n_selected() const {
    int count = 0;
    for (bool b : mask)
        if (b) ++count;
    return count;
}

namespace {

std::vector<double> apply_mask(const std::vector<bool>& mask,
                               const std::vector<double>& x) {
    std::vector<double> out;
    out.reserve(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(x[i]);
    return out;
}

}  // namespace

int TrainedPipeline::predict(const std::vector<double>& x) const {
    if (x.size() != mask.size())
        throw ArgumentError("pipeline predict: feature dimension mismatch");
    std::vector<double> z = apply_mask(mask, x);
    if (standardize)
        for (std::size_t i = 0; i < z.size(); ++i)
            z[i] = (z[i] - feat_mean[i]) / feat_std[i];
    if (kind == ModelKind::SvmPipeline) return ovo_predict(svm, z);
    return gbt_predict(gbt, z);
}

TrainedPipeline train_pipeline(const std::vector<std::vector<double>>& X,
                               const std::vector<int>& y,
                               const PipelineHyperparams& hp, std::uint64_t seed) {
    if (X.empty()) throw ArgumentError("train_pipeline: empty dataset");
    const std::size_t m = X[0].size();

    TrainedPipeline pipeline;
    pipeline.kind = hp.kind;
    pipeline.hp = hp;
    pipeline.train_seed = seed;
    pipeline.standardize = hp.standardize && hp.kind == ModelKind::SvmPipeline;

    if (hp.kind == ModelKind::Gbt) {
        pipeline.mask.assign(m, true);
        GbtParams params;
        params.n_estimators = hp.gbt_estimators;
        params.max_depth = hp.gbt_depth;
        params.learning_rate = hp.gbt_lr;
        pipeline.gbt = fit_gbt(X, y, params, kNumClasses);
        return pipeline;
    }

    TreeParams tree_params;
    tree_params.max_depth = hp.rf_depth;
    tree_params.min_samples_split = 2;
    RandomForest forest =
        fit_forest(X, y, hp.rf_trees, tree_params, seed, kNumClasses);
    pipeline.importances = forest.importances;
    pipeline.mask = select_mask(forest.importances, hp.sel_threshold);

    std::vector<std::vector<double>> masked(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) masked[i] = apply_mask(pipeline.mask, X[i]);
    const int dim = static_cast<int>(masked[0].size());

    if (pipeline.standardize) {
        pipeline.feat_mean.assign(dim, 0.0);
        pipeline.feat_std.assign(dim, 0.0);
        for (const auto& row : masked)
            for (int f = 0; f < dim; ++f) pipeline.feat_mean[f] += row[f];
        for (int f = 0; f < dim; ++f) pipeline.feat_mean[f] /= static_cast<double>(masked.size());
        for (const auto& row : masked)
            for (int f = 0; f < dim; ++f) {
                double d = row[f] - pipeline.feat_mean[f];
                pipeline.feat_std[f] += d * d;
            }
        for (int f = 0; f < dim; ++f) {
            pipeline.feat_std[f] = std::sqrt(pipeline.feat_std[f] / masked.size());
            if (pipeline.feat_std[f] <= 0.0) pipeline.feat_std[f] = 1.0;
        }
        for (auto& row : masked)
            for (int f = 0; f < dim; ++f)
                row[f] = (row[f] - pipeline.feat_mean[f]) / pipeline.feat_std[f];
    }

    SvmParams params;
    params.C = hp.svm_C;
    params.gamma_raw = hp.gamma_raw;
    params.gamma = resolve_gamma(hp.gamma_raw, dim);
    pipeline.svm = fit_ovo(masked, y, params, kNumClasses);
    return pipeline;
}

void table_to_xy(const FeatureTable& table, std::vector<std::vector<double>>& X,
                 std::vector<int>& y) {
    X.clear();
    y.clear();
    X.reserve(table.rows.size());
    y.reserve(table.rows.size());
    for (const FeatureRow& row : table.rows) {
        X.push_back(row.features.values);
        y.push_back(static_cast<int>(row.label));
    }
}

MetricReport cross_validate(const FeatureTable& table, const PipelineHyperparams& hp,
                            int k, std::uint64_t seed, int jobs) {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    table_to_xy(table, X, y);
    FoldSplit split = make_folds(y, k, seed);

    MetricReport report;
    report.folds.resize(k);
    parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
        std::vector<bool> held(X.size(), false);
        for (std::size_t i : split.folds[f]) held[i] = true;
        std::vector<std::vector<double>> tx;
        std::vector<int> ty;
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (!held[i]) {
                tx.push_back(X[i]);
                ty.push_back(y[i]);
            }
        }
        TrainedPipeline model = train_pipeline(tx, ty, hp, derive_seed(seed, f));
        std::vector<int> pred, truth;
        for (std::size_t i : split.folds[f]) {
            pred.push_back(model.predict(X[i]));
            truth.push_back(y[i]);
        }
        report.folds[f] = evaluate(pred, truth);
    });

    double sum_w = 0.0;
    for (const Metrics& fm : report.folds) {
        report.mean.sensitivity += fm.sensitivity;
        report.mean.specificity += fm.specificity;
        report.mean.uar += fm.uar;
        sum_w += fm.weighted;
    }
    report.mean.sensitivity /= k;
    report.mean.specificity /= k;
    report.mean.uar /= k;
    report.mean.weighted = sum_w / k;
    double var = 0.0;
    for (const Metrics& fm : report.folds) {
        double d = fm.weighted - report.mean.weighted;
        var += d * d;
    }
    report.std_dev = std::sqrt(var / k);
    return report;
}

SearchSpace make_svm_space() {
    SearchSpace space;
    space.params.push_back({"rf_trees", SpaceParam::Kind::Discrete, {10, 20, 50, 100}, 0, 0});
    space.params.push_back(
        {"rf_depth", SpaceParam::Kind::Discrete, {3, 4, 5, 6, 7, 8, -1}, 0, 0});
    space.params.push_back({"sel_threshold", SpaceParam::Kind::Uniform, {}, 0.0, 0.5});
    space.params.push_back({"svm_C", SpaceParam::Kind::Uniform, {}, 0.0, 25.0});
    space.params.push_back({"gamma_raw", SpaceParam::Kind::Uniform, {}, -1.0, 1.0});
    return space;
}

SearchSpace make_gbt_space() {
    SearchSpace space;
    space.params.push_back(
        {"n_estimators", SpaceParam::Kind::Discrete, {10, 25, 50, 100, 200}, 0, 0});
    space.params.push_back({"max_depth", SpaceParam::Kind::Discrete, {3, 4, 5, 6, 7, 8}, 0, 0});
    space.params.push_back({"learning_rate", SpaceParam::Kind::Uniform, {}, 0.01, 0.2});
    return space;
}

PipelineHyperparams hp_from_sample(ModelKind kind, const SearchSpace& space,
                                   const HyperparamSample& sample) {
    if (sample.size() != space.params.size())
        throw ArgumentError("hp_from_sample: sample size does not match space");
    PipelineHyperparams hp;
    hp.kind = kind;
    for (std::size_t p = 0; p < space.params.size(); ++p) {
        const std::string& name = space.params[p].name;
        double v = sample[p];
        if (name == "rf_trees") hp.rf_trees = static_cast<int>(v);
        else if (name == "rf_depth") hp.rf_depth = static_cast<int>(v);
        else if (name == "sel_threshold") hp.sel_threshold = v;
        else if (name == "svm_C") hp.svm_C = v;
        else if (name == "gamma_raw") hp.gamma_raw = v;
        else if (name == "n_estimators") hp.gbt_estimators = static_cast<int>(v);
        else if (name == "max_depth") hp.gbt_depth = static_cast<int>(v);
        else if (name == "learning_rate") hp.gbt_lr = v;
        else throw ArgumentError("hp_from_sample: unknown parameter '" + name + "'");
    }
    return hp;
}

TuneResult tune(const FeatureTable& table, ModelKind kind, const ShacConfig& cfg,
                std::uint64_t tune_seed, std::uint64_t eval_seed, int k, int jobs) {
    if (tune_seed == eval_seed)
        throw ArgumentError("tune: tune_seed and eval_seed must differ");
    SearchSpace space = kind == ModelKind::SvmPipeline ? make_svm_space() : make_gbt_space();

    auto score_with = [&](const HyperparamSample& sample, std::uint64_t seed) {
        PipelineHyperparams hp = hp_from_sample(kind, space, sample);
        try {
            return cross_validate(table, hp, k, seed, 1).mean.weighted;
        } catch (const ArgumentError&) {
            return 0.0;  // open-bound samples (e.g. C = 0.000) score worst
        } catch (const ConvergenceError&) {
            return 0.0;
        }
    };

    TuneResult result;
    result.shac = run_shac(
        space, [&](const HyperparamSample& s) { return score_with(s, tune_seed); }, cfg,
        tune_seed, jobs);

    std::vector<ScoredSample> pool = result.shac.candidates;
    if (pool.empty()) {
        result.fallback = true;
        std::size_t best = 0;
        for (std::size_t i = 1; i < result.shac.evaluated.size(); ++i)
            if (result.shac.evaluated[i].score > result.shac.evaluated[best].score)
                best = i;
        pool.push_back(
            {result.shac.evaluated[best].sample, result.shac.evaluated[best].score});
    }

    result.candidates.resize(pool.size());
    parallel_for(pool.size(), jobs, [&](std::size_t i) {
        CandidateEval ce;
        ce.sample = pool[i].sample;
        ce.hp = hp_from_sample(kind, space, pool[i].sample);
        ce.tune_score = pool[i].score;
        ce.eval_score = score_with(pool[i].sample, eval_seed);
        result.candidates[i] = std::move(ce);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.candidates.size(); ++i)
        if (result.candidates[i].eval_score > result.candidates[best].eval_score) best = i;
    result.best = result.candidates[best].hp;
    result.best_sample = result.candidates[best].sample;
    result.best_tune_score = result.candidates[best].tune_score;
    result.best_eval_score = result.candidates[best].eval_score;
    return result;
}

std::string options_fingerprint(const ExtractOptions& opt) {
    nlohmann::json j;
    j["sample_rate"] = opt.mfcc.sample_rate;
    j["n_fft"] = opt.mfcc.n_fft;
    j["hop"] = opt.mfcc.hop;
    j["n_mels"] = opt.mfcc.n_mels;
    j["n_mfcc"] = opt.mfcc.n_mfcc;
    j["fmin"] = opt.mfcc.fmin;
    j["fmax"] = opt.mfcc.fmax;
    j["log_floor"] = opt.mfcc.log_floor;
    j["delta_width"] = opt.delta_width;
    j["delta_poly"] = opt.delta_poly;
    j["layout"] = layout_to_string(opt.layout);
    const std::string text = j.dump();
    std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

namespace {

nlohmann::json hp_to_json(const PipelineHyperparams& hp) {
    nlohmann::json j;
    j["kind"] = model_kind_name(hp.kind);
    if (hp.kind == ModelKind::SvmPipeline) {
        j["rf_trees"] = hp.rf_trees;
        j["rf_depth"] = hp.rf_depth;
        j["sel_threshold"] = hp.sel_threshold;
        j["svm_C"] = hp.svm_C;
        j["gamma_raw"] = hp.gamma_raw;
        j["standardize"] = hp.standardize;
    } else {
        j["n_estimators"] = hp.gbt_estimators;
        j["max_depth"] = hp.gbt_depth;
        j["learning_rate"] = hp.gbt_lr;
    }
    return j;
}

PipelineHyperparams hp_from_json(const nlohmann::json& j) {
    PipelineHyperparams hp;
    hp.kind = parse_model_kind(j.at("kind").get<std::string>());
    if (hp.kind == ModelKind::SvmPipeline) {
        hp.rf_trees = j.at("rf_trees").get<int>();
        hp.rf_depth = j.at("rf_depth").get<int>();
        hp.sel_threshold = j.at("sel_threshold").get<double>();
        hp.svm_C = j.at("svm_C").get<double>();
        hp.gamma_raw = j.at("gamma_raw").get<double>();
        hp.standardize = j.value("standardize", false);
    } else {
        hp.gbt_estimators = j.at("n_estimators").get<int>();
        hp.gbt_depth = j.at("max_depth").get<int>();
        hp.gbt_lr = j.at("learning_rate").get<double>();
    }
    return hp;
}

nlohmann::json reg_tree_to_json(const RegTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const RegTreeNode& n : tree.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.weight});
    return nodes;
}

RegTree reg_tree_from_json(const nlohmann::json& j) {
    RegTree tree;
    for (const nlohmann::json& n : j) {
        RegTreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.weight = n.at(4).get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

}  // namespace

void save_model(const std::string& path, const TrainedPipeline& pipeline,
                const ExtractOptions& opt) {
    nlohmann::json j;
    j["format"] = "voiceml-model";
    j["version"] = 1;
    j["kind"] = model_kind_name(pipeline.kind);
    j["d"] = opt.mfcc.n_mfcc;
    std::vector<int> mask_int(pipeline.mask.size());
    for (std::size_t i = 0; i < pipeline.mask.size(); ++i)
        mask_int[i] = pipeline.mask[i] ? 1 : 0;
    j["mask"] = mask_int;
    j["importances"] = pipeline.importances;
    j["hyperparams"] = hp_to_json(pipeline.hp);
    nlohmann::json opts;
    opts["sample_rate"] = opt.mfcc.sample_rate;
    opts["n_fft"] = opt.mfcc.n_fft;
    opts["hop"] = opt.mfcc.hop;
    opts["n_mels"] = opt.mfcc.n_mels;
    opts["n_mfcc"] = opt.mfcc.n_mfcc;
    opts["fmin"] = opt.mfcc.fmin;
    opts["fmax"] = opt.mfcc.fmax;
    opts["log_floor"] = opt.mfcc.log_floor;
    opts["delta_width"] = opt.delta_width;
    opts["delta_poly"] = opt.delta_poly;
    opts["layout"] = layout_to_string(opt.layout);
    j["extract_options"] = std::move(opts);
    j["fingerprint"] = options_fingerprint(opt);
    j["provenance"] = {{"train_seed", pipeline.train_seed}};
    j["standardize"] = pipeline.standardize;
    if (pipeline.standardize) {
        j["feat_mean"] = pipeline.feat_mean;
        j["feat_std"] = pipeline.feat_std;
    }

    if (pipeline.kind == ModelKind::SvmPipeline) {
        nlohmann::json machines = nlohmann::json::array();
        for (const OvoMachine& machine : pipeline.svm.machines) {
            nlohmann::json mj;
            mj["a"] = machine.class_a;
            mj["b"] = machine.class_b;
            mj["skipped"] = machine.skipped;
            if (!machine.skipped) {
                mj["gamma"] = machine.svm.gamma;
                mj["bias"] = machine.svm.bias;
                mj["dual_coef"] = machine.svm.dual_coef;
                mj["support"] = machine.svm.support_vectors;
            }
            machines.push_back(std::move(mj));
        }
        j["svm"] = {{"n_classes", pipeline.svm.n_classes},
                    {"machines", std::move(machines)}};
    } else {
        nlohmann::json rounds = nlohmann::json::array();
        for (const std::vector<RegTree>& round : pipeline.gbt.rounds) {
            nlohmann::json per_class = nlohmann::json::array();
            for (const RegTree& tree : round) per_class.push_back(reg_tree_to_json(tree));
            rounds.push_back(std::move(per_class));
        }
        j["gbt"] = {{"n_classes", pipeline.gbt.n_classes},
                    {"n_features", pipeline.gbt.n_features},
                    {"learning_rate", pipeline.gbt.learning_rate},
                    {"rounds", std::move(rounds)}};
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing model '" + path + "'");
}

TrainedPipeline load_model(const std::string& path, ExtractOptions* opt_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw DataError("model '" + path + "' is not valid JSON: " + err.what());
    }
    try {
        if (j.at("format").get<std::string>() != "voiceml-model")
            throw DataError("model '" + path + "' has wrong format tag");
        if (j.at("version").get<int>() != 1)
            throw DataError("model '" + path + "' has unsupported version");

        TrainedPipeline pipeline;
        pipeline.kind = parse_model_kind(j.at("kind").get<std::string>());
        pipeline.d = j.at("d").get<int>();
        for (int b : j.at("mask").get<std::vector<int>>()) pipeline.mask.push_back(b != 0);
        pipeline.importances = j.at("importances").get<std::vector<double>>();
        pipeline.hp = hp_from_json(j.at("hyperparams"));
        pipeline.fingerprint = j.at("fingerprint").get<std::string>();
        pipeline.train_seed = j.at("provenance").at("train_seed").get<std::uint64_t>();
        pipeline.standardize = j.value("standardize", false);
        if (pipeline.standardize) {
            pipeline.feat_mean = j.at("feat_mean").get<std::vector<double>>();
            pipeline.feat_std = j.at("feat_std").get<std::vector<double>>();
        }

        if (opt_out) {
            const nlohmann::json& opts = j.at("extract_options");
            ExtractOptions opt;
            opt.mfcc.sample_rate = opts.at("sample_rate").get<std::uint32_t>();
            opt.mfcc.n_fft = opts.at("n_fft").get<int>();
            opt.mfcc.hop = opts.at("hop").get<int>();
            opt.mfcc.n_mels = opts.at("n_mels").get<int>();
            opt.mfcc.n_mfcc = opts.at("n_mfcc").get<int>();
            opt.mfcc.fmin = opts.at("fmin").get<double>();
            opt.mfcc.fmax = opts.at("fmax").get<double>();
            opt.mfcc.log_floor = opts.at("log_floor").get<double>();
            opt.delta_width = opts.at("delta_width").get<int>();
            opt.delta_poly = opts.at("delta_poly").get<int>();
            opt.layout = parse_layout(opts.at("layout").get<std::string>());
            *opt_out = opt;
        }

        if (pipeline.kind == ModelKind::SvmPipeline) {
            const nlohmann::json& sj = j.at("svm");
            pipeline.svm.n_classes = sj.at("n_classes").get<int>();
            for (const nlohmann::json& mj : sj.at("machines")) {
                OvoMachine machine;
                machine.class_a = mj.at("a").get<int>();
                machine.class_b = mj.at("b").get<int>();
                machine.skipped = mj.at("skipped").get<bool>();
                if (!machine.skipped) {
                    machine.svm.gamma = mj.at("gamma").get<double>();
                    machine.svm.bias = mj.at("bias").get<double>();
                    machine.svm.dual_coef = mj.at("dual_coef").get<std::vector<double>>();
                    machine.svm.support_vectors =
                        mj.at("support").get<std::vector<std::vector<double>>>();
                }
                pipeline.svm.machines.push_back(std::move(machine));
            }
        } else {
            const nlohmann::json& gj = j.at("gbt");
            pipeline.gbt.n_classes = gj.at("n_classes").get<int>();
            pipeline.gbt.n_features = gj.at("n_features").get<int>();
            pipeline.gbt.learning_rate = gj.at("learning_rate").get<double>();
            for (const nlohmann::json& round : gj.at("rounds")) {
                std::vector<RegTree> per_class;
                for (const nlohmann::json& tree : round)
                    per_class.push_back(reg_tree_from_json(tree));
                pipeline.gbt.rounds.push_back(std::move(per_class));
            }
        }
        return pipeline;
    } catch (const nlohmann::json::exception& err) {
        throw DataError("model '" + path + "' is malformed: " + err.what());
    }
}

}  // namespace voiceml

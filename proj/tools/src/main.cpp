#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"
#include "voiceml/pipeline.hpp"
#include "voiceml/synth.hpp"
#include "voiceml/wav.hpp"

namespace vc = voiceml::cli;
using namespace voiceml;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string basename_of(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

nlohmann::json hp_params_json(const PipelineHyperparams& hp) {
    nlohmann::json j;
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

PipelineHyperparams load_hparams(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open hyperparameters '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw DataError("hyperparameters '" + path + "' are not valid JSON: " + err.what());
    }
    try {
        if (j.at("format").get<std::string>() != "voiceml-hparams")
            throw DataError("hyperparameters '" + path + "' have wrong format tag");
        if (j.at("version").get<int>() != 1)
            throw DataError("hyperparameters '" + path + "' have unsupported version");
        PipelineHyperparams hp;
        hp.kind = parse_model_kind(j.at("kind").get<std::string>());
        const nlohmann::json& p = j.at("params");
        if (hp.kind == ModelKind::SvmPipeline) {
            hp.rf_trees = p.at("rf_trees").get<int>();
            hp.rf_depth = p.at("rf_depth").get<int>();
            hp.sel_threshold = p.at("sel_threshold").get<double>();
            hp.svm_C = p.at("svm_C").get<double>();
            hp.gamma_raw = p.at("gamma_raw").get<double>();
            hp.standardize = p.value("standardize", false);
        } else {
            hp.gbt_estimators = p.at("n_estimators").get<int>();
            hp.gbt_depth = p.at("max_depth").get<int>();
            hp.gbt_lr = p.at("learning_rate").get<double>();
        }
        return hp;
    } catch (const nlohmann::json::exception& err) {
        throw DataError("hyperparameters '" + path + "' are malformed: " + err.what());
    }
}

std::string report_text(const MetricReport& report, int k, ModelKind kind,
                        std::uint64_t seed, const std::string& cache_name,
                        const PipelineHyperparams& hp) {
    std::string out;
    out += std::to_string(k) + "-Fold Cross Validation Scores (" +
           model_kind_name(kind) + ")\n\n";
    out += "Fold      Sensitivity  Specificity  Recall   Scores\n";
    char line[160];
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const Metrics& m = report.folds[f];
        std::snprintf(line, sizeof line, "%-9zu %11.4f %12.4f %7.4f %8.4f\n", f + 1,
                      m.sensitivity, m.specificity, m.uar, m.weighted);
        out += line;
    }
    std::snprintf(line, sizeof line, "%-9s %11.4f %12.4f %7.4f %8.4f\n", "Mean",
                  report.mean.sensitivity, report.mean.specificity, report.mean.uar,
                  report.mean.weighted);
    out += line;
    std::snprintf(line, sizeof line, "%-9s %11.4f\n", "Std. Dev", report.std_dev);
    out += line;

    out += "\n[machine]\n";
    out += "format = voiceml-report\nversion = 1\n";
    out += "kind = " + model_kind_name(kind) + "\n";
    out += "k = " + std::to_string(k) + "\n";
    out += "seed = " + std::to_string(seed) + "\n";
    out += "cache = " + cache_name + "\n";
    out += "hyperparams = " + hp_params_json(hp).dump() + "\n";
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const Metrics& m = report.folds[f];
        const std::string tag = "fold_" + std::to_string(f + 1) + "_";
        out += tag + "sensitivity = " + fmt("%.6f", m.sensitivity) + "\n";
        out += tag + "specificity = " + fmt("%.6f", m.specificity) + "\n";
        out += tag + "recall = " + fmt("%.6f", m.uar) + "\n";
        out += tag + "score = " + fmt("%.6f", m.weighted) + "\n";
    }
    out += "mean_sensitivity = " + fmt("%.6f", report.mean.sensitivity) + "\n";
    out += "mean_specificity = " + fmt("%.6f", report.mean.specificity) + "\n";
    out += "mean_recall = " + fmt("%.6f", report.mean.uar) + "\n";
    out += "mean_score = " + fmt("%.6f", report.mean.weighted) + "\n";
    out += "std_dev = " + fmt("%.6f", report.std_dev) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

struct Args {
    std::string config_path;
    std::string spec_path;
    std::string out_path;
    std::string log_path;
    std::string manifest_path;
    std::string cache_path;
    std::string hparams_path;
    std::string model_path;
    std::string input_path;
    std::string kind = "svm-pipeline";
    int jobs = 1;
    int d = 0;
    int k = 0;
    int budget = 0;
    long long seed = -1;
    long long tune_seed = -1;
    long long eval_seed = -1;
};

vc::RunConfig config_for(const Args& args) {
    return args.config_path.empty() ? vc::RunConfig::defaults()
                                    : vc::RunConfig::load(args.config_path);
}

int cmd_synth(const Args& args) {
    CorpusSpec spec =
        args.spec_path.empty() ? CorpusSpec{} : vc::load_corpus_spec(args.spec_path);
    if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
    const std::string manifest = gen_corpus(spec, args.out_path, args.jobs);
    int total = 0;
    for (const ClassRegime& regime : spec.regimes) total += regime.count;
    std::cout << "wrote " << total << " clips, manifest " << manifest << "\n";
    return 0;
}

int cmd_extract(const Args& args) {
    vc::RunConfig cfg = config_for(args);
    if (args.d > 0) cfg.extract.mfcc.n_mfcc = args.d;
    FeatureTable table = batch_extract(args.manifest_path, cfg.extract, args.jobs);
    save_feature_cache(args.out_path, table, cfg.extract);
    std::cout << "extracted " << table.rows.size() << " rows x " << table.dim()
              << " dims to " << args.out_path << "\n";
    return 0;
}

int cmd_tune(const Args& args) {
    vc::RunConfig cfg = config_for(args);
    ShacConfig shac = cfg.shac;
    if (args.budget > 0) shac.budget = std::min(args.budget, cfg.shac.budget);
    const std::uint64_t tune_seed =
        args.tune_seed >= 0 ? static_cast<std::uint64_t>(args.tune_seed) : cfg.tune_seed;
    const std::uint64_t eval_seed =
        args.eval_seed >= 0 ? static_cast<std::uint64_t>(args.eval_seed) : cfg.eval_seed;
    const ModelKind kind = parse_model_kind(args.kind);

    FeatureTable table = load_feature_cache(args.cache_path);
    TuneResult result = tune(table, kind, shac, tune_seed, eval_seed, cfg.cv_k, args.jobs);

    nlohmann::json j;
    j["format"] = "voiceml-hparams";
    j["version"] = 1;
    j["kind"] = model_kind_name(kind);
    PipelineHyperparams best = result.best;
    best.standardize = cfg.svm_standardize;
    j["params"] = hp_params_json(best);
    j["score"] = {{"tune_weighted", result.best_tune_score},
                  {"eval_weighted", result.best_eval_score}};
    j["provenance"] = {{"tune_seed", tune_seed},
                       {"eval_seed", eval_seed},
                       {"budget", shac.budget},
                       {"k", cfg.cv_k},
                       {"evaluations", result.shac.evaluated.size()},
                       {"candidates", result.candidates.size()},
                       {"fallback", result.fallback}};
    write_text_file(args.out_path, j.dump(2) + "\n");

    if (!args.log_path.empty()) {
        const SearchSpace space =
            kind == ModelKind::SvmPipeline ? make_svm_space() : make_gbt_space();
        export_history(result.shac, space, args.log_path);
    }
    std::cout << "best " << model_kind_name(kind)
              << " weighted score (eval folds): " << fmt("%.6f", result.best_eval_score)
              << (result.fallback ? " [fallback: empty candidate set]" : "") << "\n";
    return 0;
}

int cmd_train(const Args& args) {
    vc::RunConfig cfg = config_for(args);
    const std::uint64_t seed =
        args.seed >= 0 ? static_cast<std::uint64_t>(args.seed) : cfg.train_seed;
    ExtractOptions opt;
    FeatureTable table = load_feature_cache(args.cache_path, &opt);
    PipelineHyperparams hp = load_hparams(args.hparams_path);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    table_to_xy(table, X, y);
    TrainedPipeline pipeline = train_pipeline(X, y, hp, seed);
    pipeline.d = opt.mfcc.n_mfcc;
    pipeline.fingerprint = options_fingerprint(opt);
    save_model(args.out_path, pipeline, opt);
    std::cout << "trained " << model_kind_name(hp.kind) << " on " << table.rows.size()
              << " rows (" << pipeline.n_selected() << "/" << table.dim()
              << " features selected), model " << args.out_path << "\n";
    return 0;
}

int cmd_evaluate(const Args& args) {
    vc::RunConfig cfg = config_for(args);
    const int k = args.k > 0 ? args.k : cfg.cv_k;
    const std::uint64_t seed =
        args.seed >= 0 ? static_cast<std::uint64_t>(args.seed) : cfg.eval_seed;
    FeatureTable table = load_feature_cache(args.cache_path);
    PipelineHyperparams hp = load_hparams(args.hparams_path);
    MetricReport report = cross_validate(table, hp, k, seed, args.jobs);
    const std::string text =
        report_text(report, k, hp.kind, seed, basename_of(args.cache_path), hp);
    write_text_file(args.out_path, text);
    std::cout << text.substr(0, text.find("\n[machine]"));
    return 0;
}

int cmd_predict(const Args& args) {
    ExtractOptions opt;
    TrainedPipeline pipeline = load_model(args.model_path, &opt);
    std::string output;
    std::string lower = args.input_path;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.size() >= 4 && lower.substr(lower.size() - 4) == ".wav") {
        AudioClip clip = read_wav_file(args.input_path);
        FeatureVector fv = extract(clip, opt);
        output = label_name(static_cast<ClassLabel>(pipeline.predict(fv.values))) + "\n";
    } else {
        std::vector<ManifestEntry> entries = read_manifest(args.input_path);
        std::filesystem::path base = std::filesystem::path(args.input_path).parent_path();
        std::vector<std::string> lines(entries.size());
        parallel_for(entries.size(), args.jobs, [&](std::size_t i) {
            AudioClip clip = read_wav_file((base / entries[i].path).string());
            FeatureVector fv = extract(clip, opt);
            lines[i] = entries[i].path + "," +
                       label_name(static_cast<ClassLabel>(pipeline.predict(fv.values)));
        });
        for (const std::string& line : lines) output += line + "\n";
    }
    std::cout << output;
    if (!args.out_path.empty()) write_text_file(args.out_path, output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sustained-vowel voice-disorder classification toolkit"};
    app.require_subcommand(1);
    Args args;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--jobs", args.jobs, "worker threads (results are identical for any value)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--config", args.config_path, "run configuration file");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic vowel corpus");
    synth->add_option("--out", args.out_path, "output directory")->required();
    synth->add_option("--spec", args.spec_path, "corpus spec file");
    synth->add_option("--seed", args.seed, "corpus seed (overrides spec)");
    add_common(synth);

    CLI::App* extract = app.add_subcommand("extract", "extract features from a manifest");
    extract->add_option("--manifest", args.manifest_path, "input manifest")->required();
    extract->add_option("--out", args.out_path, "feature cache output")->required();
    extract->add_option("--d", args.d, "MFCC coefficient count")->check(CLI::PositiveNumber);
    add_common(extract);

    CLI::App* tune_cmd = app.add_subcommand("tune", "search hyperparameters with SHAC");
    tune_cmd->add_option("--cache", args.cache_path, "feature cache")->required();
    tune_cmd->add_option("--out", args.out_path, "best-hyperparameters output")->required();
    tune_cmd->add_option("--log", args.log_path, "search history CSV");
    tune_cmd->add_option("--kind", args.kind, "model kind: svm-pipeline | gbt");
    tune_cmd->add_option("--budget", args.budget, "evaluation budget (capped at config)")
        ->check(CLI::PositiveNumber);
    tune_cmd->add_option("--tune-seed", args.tune_seed, "tuning-fold seed");
    tune_cmd->add_option("--eval-seed", args.eval_seed, "evaluation-fold seed");
    add_common(tune_cmd);

    CLI::App* train = app.add_subcommand("train", "train a pipeline on the full cache");
    train->add_option("--cache", args.cache_path, "feature cache")->required();
    train->add_option("--hparams", args.hparams_path, "hyperparameters file")->required();
    train->add_option("--out", args.out_path, "model output")->required();
    train->add_option("--seed", args.seed, "training seed");
    add_common(train);

    CLI::App* evaluate_cmd =
        app.add_subcommand("evaluate", "cross-validate and write a report");
    evaluate_cmd->add_option("--cache", args.cache_path, "feature cache")->required();
    evaluate_cmd->add_option("--hparams", args.hparams_path, "hyperparameters file")
        ->required();
    evaluate_cmd->add_option("--out", args.out_path, "report output")->required();
    evaluate_cmd->add_option("--k", args.k, "fold count")->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--seed", args.seed, "fold seed");
    add_common(evaluate_cmd);

    CLI::App* predict = app.add_subcommand("predict", "classify a WAV or manifest");
    predict->add_option("--model", args.model_path, "trained model")->required();
    predict->add_option("--input", args.input_path, "WAV file or manifest")->required();
    predict->add_option("--out", args.out_path, "write predictions here too");
    add_common(predict);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(synth)) return cmd_synth(args);
        if (app.got_subcommand(extract)) return cmd_extract(args);
        if (app.got_subcommand(tune_cmd)) return cmd_tune(args);
        if (app.got_subcommand(train)) return cmd_train(args);
        if (app.got_subcommand(evaluate_cmd)) return cmd_evaluate(args);
        if (app.got_subcommand(predict)) return cmd_predict(args);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const ArgumentError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return 3;
    } catch (const ConvergenceError& err) {
        std::cerr << "convergence error: " << err.what() << "\n";
        return 4;
    } catch (const IoError& err) {
        std::cerr << "io error: " << err.what() << "\n";
        return 5;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}

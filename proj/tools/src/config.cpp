#include "config.hpp"

#include <cstdlib>

#include "ini.hpp"
#include "voiceml/errors.hpp"

namespace voiceml::cli {
namespace {

[[noreturn]] void unknown_key(const std::string& origin, const std::string& section,
                              const IniFile::Entry& entry) {
    throw ConfigError(origin + ":" + std::to_string(entry.line) + ": unknown key '" +
                      entry.key + "' in section [" + section + "]");
}

int to_int(const IniFile::Entry& entry, const std::string& origin) {
    return static_cast<int>(to_long(entry, origin));
}

std::vector<Formant> parse_formants(const IniFile::Entry& entry,
                                    const std::string& origin) {
    std::vector<Formant> formants;
    std::string rest = entry.value;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string item = comma == std::string::npos ? rest : rest.substr(0, comma);
        rest = comma == std::string::npos ? std::string() : rest.substr(comma + 1);
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(entry.line) +
                              ": formants must be 'hz:bw,hz:bw,...'");
        char* end = nullptr;
        Formant f;
        f.hz = std::strtod(item.substr(0, colon).c_str(), &end);
        f.bandwidth_hz = std::strtod(item.substr(colon + 1).c_str(), &end);
        if (f.hz <= 0.0 || f.bandwidth_hz <= 0.0)
            throw ConfigError(origin + ":" + std::to_string(entry.line) +
                              ": formant entries must be positive");
        formants.push_back(f);
    }
    if (formants.empty())
        throw ConfigError(origin + ":" + std::to_string(entry.line) + ": empty formant list");
    return formants;
}

}  // namespace

RunConfig RunConfig::defaults() { return RunConfig{}; }

RunConfig RunConfig::load(const std::string& path) {
    RunConfig cfg;
    const IniFile ini = IniFile::parse_file(path);
    for (const auto& [section, entries] : ini.sections) {
        if (section == "dsp") {
            for (const auto& e : entries) {
                if (e.key == "sample_rate")
                    cfg.extract.mfcc.sample_rate = static_cast<std::uint32_t>(to_long(e, path));
                else if (e.key == "n_fft") cfg.extract.mfcc.n_fft = to_int(e, path);
                else if (e.key == "hop") cfg.extract.mfcc.hop = to_int(e, path);
                else if (e.key == "n_mels") cfg.extract.mfcc.n_mels = to_int(e, path);
                else if (e.key == "fmin") cfg.extract.mfcc.fmin = to_double(e, path);
                else if (e.key == "fmax") cfg.extract.mfcc.fmax = to_double(e, path);
                else if (e.key == "log_floor") cfg.extract.mfcc.log_floor = to_double(e, path);
                else unknown_key(path, section, e);
            }
        } else if (section == "features") {
            for (const auto& e : entries) {
                if (e.key == "d") cfg.extract.mfcc.n_mfcc = to_int(e, path);
                else if (e.key == "delta_width") cfg.extract.delta_width = to_int(e, path);
                else if (e.key == "delta_poly") cfg.extract.delta_poly = to_int(e, path);
                else if (e.key == "layout") cfg.extract.layout = parse_layout(e.value);
                else unknown_key(path, section, e);
            }
        } else if (section == "cv") {
            for (const auto& e : entries) {
                if (e.key == "k") cfg.cv_k = to_int(e, path);
                else unknown_key(path, section, e);
            }
        } else if (section == "shac") {
            for (const auto& e : entries) {
                if (e.key == "budget") cfg.shac.budget = to_int(e, path);
                else if (e.key == "batch") cfg.shac.batch = to_int(e, path);
                else if (e.key == "max_classifiers") cfg.shac.max_classifiers = to_int(e, path);
                else if (e.key == "final_batch") cfg.shac.final_batch = to_int(e, path);
                else if (e.key == "reject_cap") cfg.shac.reject_cap = to_int(e, path);
                else unknown_key(path, section, e);
            }
        } else if (section == "seeds") {
            for (const auto& e : entries) {
                if (e.key == "tune") cfg.tune_seed = static_cast<std::uint64_t>(to_long(e, path));
                else if (e.key == "eval")
                    cfg.eval_seed = static_cast<std::uint64_t>(to_long(e, path));
                else if (e.key == "train")
                    cfg.train_seed = static_cast<std::uint64_t>(to_long(e, path));
                else unknown_key(path, section, e);
            }
        } else if (section == "svm") {
            for (const auto& e : entries) {
                if (e.key == "standardize") cfg.svm_standardize = to_bool(e, path);
                else unknown_key(path, section, e);
            }
        } else {
            throw ConfigError(path + ": unknown section [" + section + "]");
        }
    }
    cfg.extract.mfcc.validate();
    return cfg;
}

CorpusSpec load_corpus_spec(const std::string& path) {
    CorpusSpec spec;
    const IniFile ini = IniFile::parse_file(path);
    for (const auto& [section, entries] : ini.sections) {
        if (section == "corpus") {
            for (const auto& e : entries) {
                if (e.key == "seed") spec.seed = static_cast<std::uint64_t>(to_long(e, path));
                else if (e.key == "sample_rate")
                    spec.sample_rate = static_cast<std::uint32_t>(to_long(e, path));
                else if (e.key == "duration_s") spec.duration_s = to_double(e, path);
                else if (e.key == "formants") spec.formants = parse_formants(e, path);
                else unknown_key(path, section, e);
            }
            continue;
        }
        ClassLabel label;
        try {
            label = parse_label(section);
        } catch (const DataError&) {
            throw ConfigError(path + ": unknown section [" + section + "]");
        }
        ClassRegime& regime = spec.regimes[static_cast<int>(label)];
        for (const auto& e : entries) {
            if (e.key == "count") regime.count = to_int(e, path);
            else if (e.key == "f0") {
                auto [lo, hi] = to_range(e, path);
                regime.f0 = {lo, hi};
            } else if (e.key == "jitter") {
                auto [lo, hi] = to_range(e, path);
                regime.jitter = {lo, hi};
            } else if (e.key == "shimmer") {
                auto [lo, hi] = to_range(e, path);
                regime.shimmer = {lo, hi};
            } else if (e.key == "hnr_db") {
                auto [lo, hi] = to_range(e, path);
                regime.hnr_db = {lo, hi};
            } else {
                unknown_key(path, section, e);
            }
        }
    }
    spec.validate();
    return spec;
}

}  // namespace voiceml::cli

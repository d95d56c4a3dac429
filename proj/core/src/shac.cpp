#include "voiceml/shac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"
#include "voiceml/rng.hpp"

namespace voiceml {
namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

// Classifier features: discrete params as their list index, uniform raw.
std::vector<double> encode(const SearchSpace& space, const HyperparamSample& s) {
    std::vector<double> x(s.size());
    for (std::size_t p = 0; p < s.size(); ++p) {
        const SpaceParam& param = space.params[p];
        if (param.kind == SpaceParam::Kind::Discrete) {
            std::size_t idx = 0;
            for (std::size_t v = 0; v < param.values.size(); ++v)
                if (param.values[v] == s[p]) {
                    idx = v;
                    break;
                }
            x[p] = static_cast<double>(idx);
        } else {
            x[p] = s[p];
        }
    }
    return x;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Cascade {
    const SearchSpace& space;
    std::vector<GbtModel> classifiers;

    bool accepts(const HyperparamSample& s) const {
        if (classifiers.empty()) return true;
        std::vector<double> x = encode(space, s);
        for (const GbtModel& clf : classifiers)
            if (!(gbt_predict_proba(clf, x)[1] > 0.5)) return false;
        return true;
    }

    double vote_margin(const HyperparamSample& s) const {
        std::vector<double> x = encode(space, s);
        double margin = 0.0;
        for (const GbtModel& clf : classifiers)
            margin += gbt_predict_proba(clf, x)[1] - 0.5;
        return margin;
    }
};

struct Draw {
    HyperparamSample sample;
    bool fallback = false;
};

Draw draw_passing(const SearchSpace& space, const Cascade& cascade,
                  std::mt19937_64& rng, int reject_cap) {
    Draw best_rejected;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < reject_cap; ++attempt) {
        HyperparamSample s = sample_uniform(space, rng);
        if (cascade.accepts(s)) return {std::move(s), false};
        double margin = cascade.vote_margin(s);
        if (margin > best_margin) {
            best_margin = margin;
            best_rejected.sample = std::move(s);
        }
    }
    best_rejected.fallback = true;
    return best_rejected;
}

}  // namespace

void SearchSpace::validate() const {
    if (params.empty()) throw ConfigError("search space has no parameters");
    std::set<std::string> names;
    for (const SpaceParam& p : params) {
        if (p.name.empty()) throw ConfigError("search space parameter with empty name");
        if (!names.insert(p.name).second)
            throw ConfigError("duplicate search space parameter '" + p.name + "'");
        if (p.kind == SpaceParam::Kind::Discrete) {
            if (p.values.empty())
                throw ConfigError("discrete parameter '" + p.name + "' has no values");
        } else if (!(p.lo < p.hi)) {
            throw ConfigError("uniform parameter '" + p.name + "' needs lo < hi");
        }
    }
}

HyperparamSample sample_uniform(const SearchSpace& space, std::mt19937_64& rng) {
    HyperparamSample s(space.params.size());
    for (std::size_t p = 0; p < space.params.size(); ++p) {
        const SpaceParam& param = space.params[p];
        if (param.kind == SpaceParam::Kind::Discrete) {
            s[p] = param.values[uniform_index(rng, param.values.size())];
        } else {
            s[p] = round3(uniform_real(rng, param.lo, param.hi));
        }
    }
    return s;
}

std::vector<std::size_t> select_candidates(const std::vector<double>& scores) {
    if (scores.empty()) throw ArgumentError("select_candidates: empty score list");
    double mean = 0.0;
    for (double v : scores) mean += v;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double v : scores) var += (v - mean) * (v - mean);
    var /= static_cast<double>(scores.size());
    const double threshold = mean + std::sqrt(var);

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] > threshold) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

ShacResult run_shac(const SearchSpace& space, const Objective& objective,
                    const ShacConfig& cfg, std::uint64_t seed, int jobs) {
    space.validate();
    if (cfg.batch < 1) throw ConfigError("shac: batch must be >= 1");
    if (cfg.budget < cfg.batch) throw ConfigError("shac: budget must be >= batch");
    if (cfg.max_classifiers < 1) throw ConfigError("shac: max_classifiers must be >= 1");
    if (cfg.final_batch < 1) throw ConfigError("shac: final_batch must be >= 1");
    if (cfg.reject_cap < 1) throw ConfigError("shac: reject_cap must be >= 1");

    std::mt19937_64 rng = make_engine(seed);
    ShacResult result;
    Cascade cascade{space, {}};
    int remaining = cfg.budget;

    auto evaluate_batch = [&](std::vector<Draw>& draws, int stage) {
        std::vector<double> scores(draws.size());
        parallel_for(draws.size(), jobs,
                     [&](std::size_t i) { scores[i] = objective(draws[i].sample); });
        std::size_t first = result.evaluated.size();
        for (std::size_t i = 0; i < draws.size(); ++i) {
            ShacEvaluation ev;
            ev.sample = draws[i].sample;
            ev.score = scores[i];
            ev.stage = stage;
            ev.cascade_fallback = draws[i].fallback;
            result.evaluated.push_back(std::move(ev));
        }
        return std::pair<std::size_t, std::size_t>{first, result.evaluated.size()};
    };

    std::pair<std::size_t, std::size_t> last_stage_range{0, 0};
    while (remaining >= cfg.batch &&
           static_cast<int>(cascade.classifiers.size()) < cfg.max_classifiers) {
        std::vector<Draw> draws;
        draws.reserve(cfg.batch);
        for (int i = 0; i < cfg.batch; ++i)
            draws.push_back(draw_passing(space, cascade, rng, cfg.reject_cap));
        last_stage_range = evaluate_batch(draws, result.n_stages);
        remaining -= cfg.batch;
        ++result.n_stages;

        std::vector<double> stage_scores;
        for (std::size_t i = last_stage_range.first; i < last_stage_range.second; ++i)
            stage_scores.push_back(result.evaluated[i].score);
        const double median = median_of(stage_scores);
        std::vector<std::vector<double>> cx;
        std::vector<int> cy;
        for (std::size_t i = last_stage_range.first; i < last_stage_range.second; ++i) {
            cx.push_back(encode(space, result.evaluated[i].sample));
            cy.push_back(result.evaluated[i].score > median ? 1 : 0);
        }
        GbtParams clf_params;
        clf_params.n_estimators = 50;
        clf_params.max_depth = 3;
        clf_params.learning_rate = 0.1;
        cascade.classifiers.push_back(fit_gbt(cx, cy, clf_params, 2));
    }

    std::pair<std::size_t, std::size_t> final_range;
    if (remaining >= cfg.final_batch) {
        std::vector<Draw> draws;
        draws.reserve(cfg.final_batch);
        for (int i = 0; i < cfg.final_batch; ++i)
            draws.push_back(draw_passing(space, cascade, rng, cfg.reject_cap));
        final_range = evaluate_batch(draws, -1);
        remaining -= cfg.final_batch;
    } else {
        if (result.evaluated.empty()) throw ConfigError("shac: no evaluations performed");
        final_range = last_stage_range;
        result.reused_last_stage = true;
    }

    std::vector<double> final_scores;
    for (std::size_t i = final_range.first; i < final_range.second; ++i)
        final_scores.push_back(result.evaluated[i].score);
    for (std::size_t rank : select_candidates(final_scores)) {
        const ShacEvaluation& ev = result.evaluated[final_range.first + rank];
        result.candidates.push_back({ev.sample, ev.score});
    }
    result.cascade = std::move(cascade.classifiers);
    return result;
}

void export_history(const ShacResult& result, const SearchSpace& space,
                    const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write search history '" + path + "'");
    out << "stage";
    for (const SpaceParam& p : space.params) out << "," << p.name;
    out << ",score,accepted_by_cascade\n";
    char buf[64];
    for (const ShacEvaluation& ev : result.evaluated) {
        out << ev.stage;
        for (std::size_t p = 0; p < ev.sample.size(); ++p) {
            if (space.params[p].kind == SpaceParam::Kind::Discrete)
                std::snprintf(buf, sizeof buf, "%g", ev.sample[p]);
            else
                std::snprintf(buf, sizeof buf, "%.3f", ev.sample[p]);
            out << "," << buf;
        }
        std::snprintf(buf, sizeof buf, "%.9f", ev.score);
        out << "," << buf << "," << (ev.cascade_fallback ? 0 : 1) << "\n";
    }
    if (!out) throw IoError("failed writing search history '" + path + "'");
}

}  // namespace voiceml

// Acceptance harness: each criterion prints exactly one PASS/FAIL line.
// argv[1] must be the path to the CLI binary (used by criteria 8 and 9).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qp_oracle.hpp"
#include "voiceml/errors.hpp"
#include "voiceml/forest.hpp"
#include "voiceml/gbt.hpp"
#include "voiceml/metrics.hpp"
#include "voiceml/mfcc.hpp"
#include "voiceml/rng.hpp"
#include "voiceml/savgol.hpp"
#include "voiceml/shac.hpp"
#include "voiceml/svm.hpp"

using namespace voiceml;
namespace ts = voiceml::testsupport;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void line(int idx, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("%s criterion %d (%s)%s%s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

// 1. Table III metric arithmetic within +/- 5e-5.
void criterion_1() {
    const double rows[3][4] = {{0.8860, 0.7823, 0.5900, 0.7469},
                               {0.8747, 0.7561, 0.6150, 0.7470},
                               {0.8539, 0.6624, 0.5550, 0.6960}};
    bool pass = true;
    std::ostringstream detail;
    for (int r = 0; r < 3; ++r) {
        const double got = weighted_score(rows[r][0], rows[r][1], rows[r][2]);
        const double diff = std::abs(got - rows[r][3]);
        if (r) detail << ", ";
        char buf[96];
        std::snprintf(buf, sizeof buf, "row %d: %.6f vs %.4f (|diff| %.1e)", r + 1, got,
                      rows[r][3], diff);
        detail << buf;
        if (diff > 5e-5) pass = false;
    }
    line(1, "metric arithmetic", pass, detail.str());
}

// 2. Savitzky-Golay exactness on random polynomials of degree <= p.
void criterion_2() {
    auto eng = make_engine(12);
    bool pass = true;
    std::string detail;
    for (int M = 1; M <= 4 && pass; ++M)
        for (int p = 1; p <= 4 && pass; ++p)
            for (int deriv = 0; deriv <= 1 && pass; ++deriv) {
                if (2 * M + 1 <= p) {
                    try {
                        sg_filter(M, p, deriv);
                        pass = false;
                        detail = "window 2M+1 <= p accepted";
                    } catch (const ArgumentError&) {
                    }
                    continue;
                }
                SgFilter filter = sg_filter(M, p, deriv);
                for (int trial = 0; trial < 5; ++trial) {
                    std::vector<double> coef(p + 1);
                    for (double& c : coef) c = uniform_real(eng, -1.0, 1.0);
                    const int L = 21;
                    std::vector<double> row(L);
                    for (int n = 0; n < L; ++n) {
                        const double x = n - L / 2;
                        double v = 0.0;
                        for (int k = p; k >= 0; --k) v = v * x + coef[k];
                        row[n] = v;
                    }
                    std::vector<double> out = filter.apply(row);
                    for (int n = M; n < L - M; ++n) {
                        const double x = n - L / 2;
                        double expect = 0.0;
                        if (deriv == 0)
                            for (int k = p; k >= 0; --k) expect = expect * x + coef[k];
                        else
                            for (int k = p; k >= 1; --k) expect = expect * x + k * coef[k];
                        if (std::abs(out[n] - expect) > 1e-9) {
                            pass = false;
                            char buf[96];
                            std::snprintf(buf, sizeof buf,
                                          "M=%d p=%d deriv=%d err %.2e", M, p, deriv,
                                          std::abs(out[n] - expect));
                            detail = buf;
                        }
                    }
                }
            }
    line(2, "Savitzky-Golay exactness", pass, detail);
}

// 3. DSP invariants: DCT orthonormality, mel round-trip, frame-count formula.
void criterion_3() {
    bool pass = true;
    std::string detail;

    const int n = 128;
    std::vector<double> d = dct_matrix(n);
    for (int i = 0; i < n && pass; ++i)
        for (int j = 0; j < n && pass; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += d[i * n + k] * d[j * n + k];
            if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-10) {
                pass = false;
                detail = "DCT Gram deviation";
            }
        }

    for (double f = 1.0; f <= 11025.0 && pass; f *= 1.37) {
        const double back = mel_to_hz(hz_to_mel(f));
        if (std::abs(back - f) / f > 1e-9) {
            pass = false;
            detail = "mel round-trip drift";
        }
    }

    auto eng = make_engine(3);
    for (int trial = 0; trial < 100 && pass; ++trial) {
        MfccConfig cfg;
        cfg.hop = 1 + static_cast<int>(uniform_index(eng, 4096));
        AudioClip clip;
        clip.sample_rate = cfg.sample_rate;
        clip.samples.assign(1 + uniform_index(eng, 50000), 0.01);
        const std::size_t expect = 1 + clip.samples.size() / static_cast<std::size_t>(cfg.hop);
        if (frame_signal(clip, cfg).size() != expect) {
            pass = false;
            detail = "frame-count formula";
        }
    }
    line(3, "DSP invariants", pass, detail);
}

void random_binary(std::mt19937_64& eng, std::size_t n,
                   std::vector<std::vector<double>>& X, std::vector<int>& y) {
    do {
        X.clear();
        y.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const int label = uniform01(eng) < 0.5 ? -1 : 1;
            X.push_back({gaussian(eng) + 0.8 * label, gaussian(eng) + 0.8 * label});
            y.push_back(label);
        }
    } while (std::count(y.begin(), y.end(), 1) == 0 ||
             std::count(y.begin(), y.end(), -1) == 0);
}

// 4. SMO vs projected-gradient QP oracle on 50 tiny datasets.
void criterion_4() {
    auto eng = make_engine(44);
    bool pass = true;
    std::string detail;
    for (int trial = 0; trial < 50 && pass; ++trial) {
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        random_binary(eng, 2 + uniform_index(eng, 5), X, y);
        SvmParams params;
        params.C = trial % 3 == 0 ? 10.0 : 1.0;
        params.gamma = trial % 2 == 0 ? 1.0 : 0.5;
        params.tol = 1e-6;
        BinarySvm svm = smo_train(X, y, params);
        ts::QpSolution oracle = ts::solve_dual_qp(X, y, params.C, params.gamma);
        const double diff = std::abs(ts::machine_objective(svm) - oracle.objective);
        if (diff > 1e-3) {
            pass = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "trial %d objective diff %.2e", trial, diff);
            detail = buf;
            break;
        }
        for (double gx = -2.0; gx <= 3.01 && pass; gx += 0.5)
            for (double gy = -2.0; gy <= 3.01; gy += 0.5) {
                const std::vector<double> pt = {gx, gy};
                const double fo = ts::oracle_decision(oracle, X, y, params.gamma, pt);
                if (std::abs(fo) > 0.01 && svm.decision(pt) * fo <= 0.0) {
                    pass = false;
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "trial %d sign flip", trial);
                    detail = buf;
                    break;
                }
            }
    }
    line(4, "SVM oracle equivalence", pass, detail);
}

// 5. Dual feasibility and three-branch KKT at tol=1e-3 on 100 datasets.
void criterion_5() {
    auto eng = make_engine(55);
    bool pass = true;
    std::string detail;
    for (int trial = 0; trial < 100 && pass; ++trial) {
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        random_binary(eng, 4 + uniform_index(eng, 9), X, y);
        SvmParams params;
        params.C = 0.5 + uniform01(eng) * 9.5;
        BinarySvm svm = smo_train(X, y, params);

        double sum_ay = 0.0;
        for (double coef : svm.dual_coef) {
            sum_ay += coef;
            if (std::abs(coef) < 0.0 || std::abs(coef) > params.C * (1.0 + 1e-9)) {
                pass = false;
                detail = "alpha out of box";
            }
        }
        if (std::abs(sum_ay) > 1e-6) {
            pass = false;
            detail = "sum alpha*y violation";
        }

        for (std::size_t i = 0; i < X.size() && pass; ++i) {
            const double yf = y[i] * svm.decision(X[i]);
            double alpha = 0.0;
            for (std::size_t s = 0; s < svm.support_vectors.size(); ++s)
                if (svm.support_vectors[s] == X[i]) alpha = std::abs(svm.dual_coef[s]);
            const double bound_eps = 1e-9 * params.C;
            bool ok = true;
            if (alpha <= bound_eps)
                ok = yf >= 1.0 - params.tol;
            else if (alpha >= params.C - bound_eps)
                ok = yf <= 1.0 + params.tol;
            else
                ok = std::abs(yf - 1.0) <= params.tol;
            if (!ok) {
                pass = false;
                char buf[80];
                std::snprintf(buf, sizeof buf, "trial %d KKT branch (alpha %.3g, yf %.6f)",
                              trial, alpha, yf);
                detail = buf;
            }
        }
    }
    line(5, "KKT/feasibility suite", pass, detail);
}

// 6. RF importance ranking and GBT log-loss monotonicity.
void criterion_6() {
    bool pass = true;
    std::string detail;
    int ranked = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto eng = make_engine(seed);
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        for (int i = 0; i < 50; ++i) {
            const int label = static_cast<int>(uniform_index(eng, 2));
            X.push_back({static_cast<double>(label), gaussian(eng)});
            y.push_back(label);
        }
        RandomForest rf = fit_forest(X, y, 25, TreeParams{}, seed);
        double sum = 0.0;
        for (double v : rf.importances) sum += v;
        if (std::abs(sum - 1.0) > 1e-9) {
            pass = false;
            detail = "importances do not sum to 1";
        }
        if (rf.importances[0] > rf.importances[1]) ++ranked;
    }
    if (ranked < 49) {
        pass = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, "label-copy ranked first in %d/50", ranked);
        detail = buf;
    }

    auto eng = make_engine(66);
    for (int trial = 0; trial < 20 && pass; ++trial) {
        std::vector<std::vector<double>> X;
        std::vector<int> y;
        for (int i = 0; i < 40; ++i) {
            const int c = static_cast<int>(uniform_index(eng, 3));
            X.push_back({2.0 * c + gaussian(eng), gaussian(eng)});
            y.push_back(c);
        }
        GbtParams params;
        params.n_estimators = 30;
        GbtModel model = fit_gbt(X, y, params);
        for (std::size_t t = 1; t < model.train_log_loss.size(); ++t)
            if (model.train_log_loss[t] > model.train_log_loss[t - 1] + 1e-12) {
                pass = false;
                detail = "log-loss increased";
            }
    }
    line(6, "ensemble properties", pass, detail);
}

// 7. SHAC quotas, candidate rule, and cross-stage improvement on 5 seeds.
void criterion_7() {
    SearchSpace space;
    for (const char* name : {"x0", "x1", "x2"}) {
        SpaceParam p;
        p.name = name;
        p.lo = -1.0;
        p.hi = 1.0;
        space.params.push_back(p);
    }
    auto objective = [](const HyperparamSample& s) {
        double sum = 0.0;
        for (double v : s) sum += v * v;
        return -sum;
    };
    ShacConfig cfg;
    cfg.budget = 1000;
    cfg.batch = 100;
    cfg.max_classifiers = 10;
    cfg.final_batch = 100;

    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5 && pass; ++seed) {
        ShacResult result = run_shac(space, objective, cfg, seed);
        if (result.evaluated.size() > 1000 || result.cascade.size() > 10) {
            pass = false;
            detail = "quota exceeded";
            break;
        }
        std::vector<double> final_scores;
        const int final_stage = result.reused_last_stage ? result.n_stages - 1 : -1;
        for (const ShacEvaluation& ev : result.evaluated)
            if (ev.stage == final_stage) final_scores.push_back(ev.score);
        double mean = 0.0;
        for (double s : final_scores) mean += s;
        mean /= static_cast<double>(final_scores.size());
        double var = 0.0;
        for (double s : final_scores) var += (s - mean) * (s - mean);
        const double threshold = mean + std::sqrt(var / static_cast<double>(final_scores.size()));
        for (const ScoredSample& candidate : result.candidates)
            if (!(candidate.score > threshold)) {
                pass = false;
                detail = "candidate below mean+sigma";
            }
        double mean_by_stage[4] = {0, 0, 0, 0};
        int count_by_stage[4] = {0, 0, 0, 0};
        for (const ShacEvaluation& ev : result.evaluated)
            if (ev.stage >= 0 && ev.stage < 4) {
                mean_by_stage[ev.stage] += ev.score;
                ++count_by_stage[ev.stage];
            }
        if (!(mean_by_stage[3] / count_by_stage[3] > mean_by_stage[0] / count_by_stage[0])) {
            pass = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "seed %llu: stage 3 not above stage 0",
                          static_cast<unsigned long long>(seed));
            detail = buf;
        }
    }
    line(7, "SHAC contract", pass, detail);
}

struct ChainResult {
    bool ok = false;
    std::string report;
    std::string hparams;
    std::string cache;
    double mean_score = 0.0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

ChainResult run_chain(const std::string& cli, const fs::path& dir, int jobs) {
    ChainResult result;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string jobs_arg = " --jobs " + std::to_string(jobs);
    const std::vector<std::string> commands = {
        cli + " synth --out " + (dir / "corpus").string() + " --seed 7" + jobs_arg,
        cli + " extract --manifest " + (dir / "corpus" / "manifest.csv").string() +
            " --out " + (dir / "cache.json").string() + " --d 15" + jobs_arg,
        cli + " tune --cache " + (dir / "cache.json").string() + " --out " +
            (dir / "hp.json").string() + " --log " + (dir / "history.csv").string() +
            " --budget 200" + jobs_arg,
        cli + " evaluate --cache " + (dir / "cache.json").string() + " --hparams " +
            (dir / "hp.json").string() + " --out " + (dir / "report.txt").string() +
            " --k 5" + jobs_arg,
    };
    for (const std::string& command : commands) {
        const std::string quiet = command + " > " + (dir / "stdout.log").string() + " 2>&1";
        if (std::system(quiet.c_str()) != 0) return result;
    }
    result.report = slurp(dir / "report.txt");
    result.hparams = slurp(dir / "hp.json");
    result.cache = slurp(dir / "cache.json");
    const std::string key = "mean_score = ";
    const std::size_t at = result.report.find(key);
    if (at == std::string::npos) return result;
    result.mean_score = std::atof(result.report.c_str() + at + key.size());
    result.ok = true;
    return result;
}

// 8. Full CLI chain reaches weighted >= 0.55 and repeats bit-identically.
// 9. jobs=4 and jobs=1 chains produce byte-identical reports.
void criteria_8_9(const char* cli_path) {
    if (cli_path == nullptr) {
        line(8, "end-to-end pipeline", false, "CLI path argument missing");
        line(9, "determinism under parallelism", false, "CLI path argument missing");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "voiceml_acceptance";
    const ChainResult a = run_chain(cli_path, base / "a", 4);
    const ChainResult b = run_chain(cli_path, base / "b", 4);

    bool pass8 = a.ok && b.ok;
    std::string detail8;
    if (!pass8) {
        detail8 = "a CLI command failed";
    } else {
        char buf[96];
        std::snprintf(buf, sizeof buf, "weighted %.4f (>= 0.55), rerun %s", a.mean_score,
                      a.report == b.report && a.hparams == b.hparams && a.cache == b.cache
                          ? "bit-identical"
                          : "DIFFERS");
        detail8 = buf;
        pass8 = a.mean_score >= 0.55 && a.report == b.report && a.hparams == b.hparams &&
                a.cache == b.cache;
    }
    line(8, "end-to-end pipeline", pass8, detail8);

    const ChainResult c = run_chain(cli_path, base / "c", 1);
    bool pass9 = a.ok && c.ok && a.report == c.report && a.hparams == c.hparams &&
                 a.cache == c.cache;
    line(9, "determinism under parallelism", pass9,
         pass9 ? "jobs=4 and jobs=1 byte-identical"
               : (c.ok ? "outputs differ across jobs" : "a CLI command failed"));
    fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criteria_8_9(argc > 1 ? argv[1] : nullptr);
    std::printf("%d of 9 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

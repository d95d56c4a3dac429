#include "voiceml/features.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "voiceml/errors.hpp"
#include "voiceml/parallel.hpp"
#include "voiceml/resample.hpp"
#include "voiceml/savgol.hpp"
#include "voiceml/wav.hpp"

namespace voiceml {
namespace {

const std::string kLabelNames[kNumClasses] = {
    "normal", "neoplasm", "phonotrauma", "vocal_palsy"};

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double reduce_row(const MfccMatrix& m, int row, AggregateBlock::Stat stat) {
    const double* p = &m.values[static_cast<std::size_t>(row) * m.cols];
    if (stat == AggregateBlock::Stat::Mean) {
        double acc = 0.0;
        for (int t = 0; t < m.cols; ++t) acc += p[t];
        return acc / m.cols;
    }
    double best = p[0];
    for (int t = 1; t < m.cols; ++t) best = std::max(best, p[t]);
    return best;
}

}  // namespace

const std::string& label_name(ClassLabel label) {
    int idx = static_cast<int>(label);
    if (idx < 0 || idx >= kNumClasses) throw ArgumentError("label_name: invalid label value");
    return kLabelNames[idx];
}

ClassLabel parse_label(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (name == kLabelNames[i]) return static_cast<ClassLabel>(i);
    throw DataError("unknown class label '" + name + "'");
}

std::vector<AggregateBlock> parse_layout(const std::string& text) {
    std::vector<AggregateBlock> layout;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("layout block '" + item + "' is not source:stat");
        std::string src = trim(item.substr(0, colon));
        std::string stat = trim(item.substr(colon + 1));
        AggregateBlock block;
        if (src == "mfcc")
            block.source = AggregateBlock::Source::Mfcc;
        else if (src == "delta")
            block.source = AggregateBlock::Source::Delta;
        else if (src == "delta2")
            block.source = AggregateBlock::Source::DeltaDelta;
        else
            throw ConfigError("layout source '" + src + "' is not mfcc|delta|delta2");
        if (stat == "mean")
            block.stat = AggregateBlock::Stat::Mean;
        else if (stat == "max")
            block.stat = AggregateBlock::Stat::Max;
        else
            throw ConfigError("layout stat '" + stat + "' is not mean|max");
        layout.push_back(block);
    }
    if (layout.size() != 3)
        throw ConfigError("layout must contain exactly 3 blocks, got " +
                          std::to_string(layout.size()));
    return layout;
}

std::string layout_to_string(const std::vector<AggregateBlock>& layout) {
    std::string out;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (i) out += ',';
        switch (layout[i].source) {
            case AggregateBlock::Source::Mfcc: out += "mfcc"; break;
            case AggregateBlock::Source::Delta: out += "delta"; break;
            case AggregateBlock::Source::DeltaDelta: out += "delta2"; break;
        }
        out += layout[i].stat == AggregateBlock::Stat::Mean ? ":mean" : ":max";
    }
    return out;
}

FeatureVector aggregate(const MfccMatrix& mfcc_mat, const MfccMatrix& delta_mat,
                        const std::vector<AggregateBlock>& layout,
                        int delta_width, int delta_poly) {
    if (mfcc_mat.rows != delta_mat.rows || mfcc_mat.cols != delta_mat.cols)
        throw ArgumentError("aggregate: mfcc and delta shapes differ");
    if (mfcc_mat.rows <= 0 || mfcc_mat.cols <= 0)
        throw ArgumentError("aggregate: empty feature matrix");
    if (layout.size() != 3) throw ArgumentError("aggregate: layout must have 3 blocks");

    MfccMatrix delta2_mat;
    bool have_delta2 = false;
    FeatureVector fv;
    fv.d = mfcc_mat.rows;
    fv.values.reserve(static_cast<std::size_t>(3) * mfcc_mat.rows);
    for (const AggregateBlock& block : layout) {
        const MfccMatrix* src = nullptr;
        switch (block.source) {
            case AggregateBlock::Source::Mfcc: src = &mfcc_mat; break;
            case AggregateBlock::Source::Delta: src = &delta_mat; break;
            case AggregateBlock::Source::DeltaDelta:
                if (!have_delta2) {
                    delta2_mat = delta(delta_mat, delta_width, delta_poly);
                    have_delta2 = true;
                }
                src = &delta2_mat;
                break;
        }
        for (int r = 0; r < src->rows; ++r) fv.values.push_back(reduce_row(*src, r, block.stat));
    }
    return fv;
}

FeatureVector aggregate(const MfccMatrix& mfcc_mat, const MfccMatrix& delta_mat) {
    ExtractOptions def;
    return aggregate(mfcc_mat, delta_mat, def.layout, def.delta_width, def.delta_poly);
}

FeatureVector extract(const AudioClip& clip, const ExtractOptions& opt) {
    opt.mfcc.validate();
    AudioClip work = clip.sample_rate == opt.mfcc.sample_rate
                         ? clip
                         : resample(clip, opt.mfcc.sample_rate);
    MfccMatrix coeffs = mfcc(work, opt.mfcc);
    MfccMatrix deltas = delta(coeffs, opt.delta_width, opt.delta_poly);
    return aggregate(coeffs, deltas, opt.layout, opt.delta_width, opt.delta_poly);
}

std::vector<ManifestEntry> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest '" + manifest_path + "'");
    std::vector<ManifestEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        auto comma = text.rfind(',');
        if (comma == std::string::npos)
            throw DataError(manifest_path + ":" + std::to_string(line_no) +
                            ": expected 'path,label'");
        ManifestEntry entry;
        entry.path = trim(text.substr(0, comma));
        std::string label = trim(text.substr(comma + 1));
        if (entry.path.empty())
            throw DataError(manifest_path + ":" + std::to_string(line_no) + ": empty path");
        try {
            entry.label = parse_label(label);
        } catch (const DataError& err) {
            throw DataError(manifest_path + ":" + std::to_string(line_no) + ": " + err.what());
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

void write_manifest(const std::string& manifest_path,
                    const std::vector<ManifestEntry>& entries,
                    const std::string& header_comment) {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest '" + manifest_path + "'");
    if (!header_comment.empty()) {
        std::stringstream ss(header_comment);
        std::string piece;
        while (std::getline(ss, piece)) out << "# " << piece << "\n";
    }
    for (const ManifestEntry& entry : entries)
        out << entry.path << "," << label_name(entry.label) << "\n";
    if (!out) throw IoError("failed writing manifest '" + manifest_path + "'");
}

FeatureTable batch_extract(const std::string& manifest_path,
                           const ExtractOptions& opt, int jobs) {
    opt.mfcc.validate();
    std::vector<ManifestEntry> entries = read_manifest(manifest_path);
    std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    FeatureTable table;
    table.d = opt.mfcc.n_mfcc;
    table.rows.resize(entries.size());
    std::vector<std::string> failures(entries.size());

    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        const ManifestEntry& entry = entries[i];
        std::string full = (base / entry.path).string();
        try {
            AudioClip clip = read_wav_file(full);
            FeatureRow row;
            row.clip_id = entry.path;
            row.label = entry.label;
            row.features = extract(clip, opt);
            table.rows[i] = std::move(row);
        } catch (const std::exception& err) {
            failures[i] = entry.path + ": " + err.what();
        }
    });

    std::string joined;
    int n_failed = 0;
    for (const std::string& f : failures) {
        if (f.empty()) continue;
        ++n_failed;
        joined += "\n  " + f;
    }
    if (n_failed > 0)
        throw DataError("feature extraction failed for " + std::to_string(n_failed) +
                        " clip(s):" + joined);
    return table;
}

namespace {

nlohmann::json options_to_json(const ExtractOptions& opt) {
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
    return j;
}

ExtractOptions options_from_json(const nlohmann::json& j) {
    ExtractOptions opt;
    opt.mfcc.sample_rate = j.at("sample_rate").get<std::uint32_t>();
    opt.mfcc.n_fft = j.at("n_fft").get<int>();
    opt.mfcc.hop = j.at("hop").get<int>();
    opt.mfcc.n_mels = j.at("n_mels").get<int>();
    opt.mfcc.n_mfcc = j.at("n_mfcc").get<int>();
    opt.mfcc.fmin = j.at("fmin").get<double>();
    opt.mfcc.fmax = j.at("fmax").get<double>();
    opt.mfcc.log_floor = j.at("log_floor").get<double>();
    opt.delta_width = j.at("delta_width").get<int>();
    opt.delta_poly = j.at("delta_poly").get<int>();
    opt.layout = parse_layout(j.at("layout").get<std::string>());
    return opt;
}

}  // namespace

void save_feature_cache(const std::string& path, const FeatureTable& table,
                        const ExtractOptions& opt) {
    nlohmann::json j;
    j["format"] = "voiceml-features";
    j["version"] = 1;
    j["d"] = table.d;
    j["options"] = options_to_json(opt);
    nlohmann::json rows = nlohmann::json::array();
    for (const FeatureRow& row : table.rows) {
        nlohmann::json r;
        r["clip"] = row.clip_id;
        r["label"] = label_name(row.label);
        r["values"] = row.features.values;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write feature cache '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing feature cache '" + path + "'");
}

FeatureTable load_feature_cache(const std::string& path, ExtractOptions* opt_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature cache '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw DataError("feature cache '" + path + "' is not valid JSON: " + err.what());
    }
    try {
        if (j.at("format").get<std::string>() != "voiceml-features")
            throw DataError("feature cache '" + path + "' has wrong format tag");
        if (j.at("version").get<int>() != 1)
            throw DataError("feature cache '" + path + "' has unsupported version");
        ExtractOptions opt = options_from_json(j.at("options"));
        if (opt_out) *opt_out = opt;
        FeatureTable table;
        table.d = j.at("d").get<int>();
        for (const nlohmann::json& r : j.at("rows")) {
            FeatureRow row;
            row.clip_id = r.at("clip").get<std::string>();
            row.label = parse_label(r.at("label").get<std::string>());
            row.features.values = r.at("values").get<std::vector<double>>();
            row.features.d = table.d;
            if (static_cast<int>(row.features.values.size()) != 3 * table.d)
                throw DataError("feature cache '" + path + "': row '" + row.clip_id +
                                "' has wrong dimensionality");
            table.rows.push_back(std::move(row));
        }
        return table;
    } catch (const nlohmann::json::exception& err) {
        throw DataError("feature cache '" + path + "' is malformed: " + err.what());
    }
}

}  // namespace voiceml

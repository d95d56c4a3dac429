#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voiceml/audio.hpp"
#include "voiceml/mfcc.hpp"

namespace voiceml {

enum class ClassLabel : int {
    Normal = 0,
    Neoplasm = 1,
    Phonotrauma = 2,
    VocalPalsy = 3,
};
constexpr int kNumClasses = 4;

const std::string& label_name(ClassLabel label);
ClassLabel parse_label(const std::string& name);  // throws DataError

// Per-clip aggregate of length 3d.
struct FeatureVector {
    std::vector<double> values;
    int d = 0;
};

struct FeatureRow {
    std::string clip_id;  // manifest-relative path
    FeatureVector features;
    ClassLabel label = ClassLabel::Normal;
};

struct FeatureTable {
    int d = 0;
    std::vector<FeatureRow> rows;

    std::size_t size() const { return rows.size(); }
    int dim() const { return 3 * d; }
};

// One statistic of one source matrix; three blocks concatenate to 3d values.
struct AggregateBlock {
    enum class Source { Mfcc, Delta, DeltaDelta };
    enum class Stat { Mean, Max };
    Source source = Source::Mfcc;
    Stat stat = Stat::Mean;
};

// Parses layouts like "mfcc:mean,delta:mean,delta:max" (exactly 3 blocks).
std::vector<AggregateBlock> parse_layout(const std::string& text);
std::string layout_to_string(const std::vector<AggregateBlock>& layout);

struct ExtractOptions {
    MfccConfig mfcc;
    int delta_width = 9;
    int delta_poly = 1;
    std::vector<AggregateBlock> layout = {
        {AggregateBlock::Source::Mfcc, AggregateBlock::Stat::Mean},
        {AggregateBlock::Source::Delta, AggregateBlock::Stat::Mean},
        {AggregateBlock::Source::Delta, AggregateBlock::Stat::Max},
    };
};

// [mean-over-frames(mfcc) | mean-over-frames(delta) | max-over-frames(delta)]
// under the default layout; both matrices must share shape L x N, N >= 1.
FeatureVector aggregate(const MfccMatrix& mfcc_mat, const MfccMatrix& delta_mat);
FeatureVector aggregate(const MfccMatrix& mfcc_mat, const MfccMatrix& delta_mat,
                        const std::vector<AggregateBlock>& layout,
                        int delta_width, int delta_poly);

// resample to opt.mfcc.sample_rate -> mfcc -> delta -> aggregate.
FeatureVector extract(const AudioClip& clip, const ExtractOptions& opt);

struct ManifestEntry {
    std::string path;  // relative to the manifest file
    ClassLabel label = ClassLabel::Normal;
};

// One `relative/path.wav,label` record per line; '#' lines ignored.
std::vector<ManifestEntry> read_manifest(const std::string& manifest_path);
void write_manifest(const std::string& manifest_path,
                    const std::vector<ManifestEntry>& entries,
                    const std::string& header_comment = "");

// Extracts every manifest entry (optionally in parallel). All-or-nothing:
// any per-file failure aborts with an error naming every failed path.
FeatureTable batch_extract(const std::string& manifest_path,
                           const ExtractOptions& opt, int jobs = 1);

// Versioned self-describing JSON cache.
void save_feature_cache(const std::string& path, const FeatureTable& table,
                        const ExtractOptions& opt);
FeatureTable load_feature_cache(const std::string& path,
                                ExtractOptions* opt_out = nullptr);

}  // namespace voiceml

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radar/corpus.hpp"
#include "radar/labeling.hpp"

namespace radar {

inline constexpr std::size_t kFeatureCount = 37;
inline constexpr std::size_t kCountFeatureCount = 9; // features 1-9; the rest are history

using FeatureVector = std::array<double, kFeatureCount>;

/// Column names in schema order, c_add ... r_hot_spot_mean_reviewers.
const std::array<std::string, kFeatureCount>& feature_names();

/// Throws InvalidArgument for names outside the schema.
std::size_t feature_index(std::string_view name);

/// Features 1-9 (line counts and their ratios to the whole initial commit).
std::array<double, kCountFeatureCount> count_features(const Patch& patch, const ChangedFile& file);

/// Running history of past patches. Each scope keeps the number of prior
/// patches it appeared in and, per label, the sum of the labelled-file
/// fraction those patches had within the scope.
class HistoryState {
public:
    struct Accumulator {
        std::size_t patches = 0;
        std::array<double, 3> ratio_sum{};

        double mean(std::size_t label) const { return patches == 0 ? 0.0 : ratio_sum[label] / double(patches); }
        void add(const std::array<double, 3>& fractions);
    };

    /// Features 10-37 for one file of a patch not yet recorded.
    std::array<double, kFeatureCount - kCountFeatureCount> features(const Patch& patch,
                                                                     const ChangedFile& file) const;

    /// Records a patch once all its rows have been emitted.
    void record(const Patch& patch, const LabelTable& labels);

private:
    using PairKey = std::pair<std::string, std::string>;

    static const Accumulator& lookup(const std::map<std::string, Accumulator>& m, const std::string& key);
    static const Accumulator& lookup(const std::map<PairKey, Accumulator>& m, const PairKey& key);

    std::map<std::string, Accumulator> file_;
    std::map<std::string, Accumulator> dir_;
    std::map<std::string, Accumulator> author_;
    std::map<PairKey, Accumulator> author_file_;
    std::map<PairKey, Accumulator> author_dir_;
    std::map<std::string, Accumulator> reviewer_;
};

struct FeatureRow {
    FileKey key;
    FeatureVector values{};
};

struct FeatureMatrix {
    std::vector<FeatureRow> rows; // corpus order
    std::map<FileKey, std::size_t> index;

    void push_back(FeatureRow row);
    const FeatureRow* find(const FileKey& key) const;
};

/// Single chronological pass. Corpus must be sorted; labels must cover it.
FeatureMatrix extract_all(const Corpus& corpus, const LabelTable& labels);

std::string features_to_csv(const FeatureMatrix& matrix);

} // namespace radar

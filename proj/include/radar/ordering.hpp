#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radar/corpus.hpp"
#include "radar/labeling.hpp"

namespace radar {

enum class OrderPolicy { alphanumeric, predicted, oracle, random };

inline constexpr std::array<OrderPolicy, 4> kAllPolicies{OrderPolicy::alphanumeric, OrderPolicy::predicted,
                                                         OrderPolicy::oracle, OrderPolicy::random};

const char* to_string(OrderPolicy policy);

struct OrderInput {
    std::string path;
    std::optional<double> score; // predicted policy
    bool hot_spot = false;       // oracle policy
};

/// Score policies sort descending with byte-wise path order breaking ties;
/// alphanumeric is byte-wise ascending; random is a seeded shuffle.
std::vector<std::string> order_files(std::span<const OrderInput> files, OrderPolicy policy, std::uint64_t seed = 0);

/// k = ceil(fraction * size); recall = hot-spots in the first k / min(#hot-spots, k).
/// Throws IneligiblePatch unless the patch has >= 2 files and >= 1 hot-spot.
double recall_at(std::span<const std::string> ordered, const std::set<std::string>& hot_spots, double fraction);

std::size_t cutoff_k(std::size_t size, double fraction);

enum class SizeBucket { two_to_four, five_to_nine, ten_plus };

inline constexpr std::array<SizeBucket, 3> kAllBuckets{SizeBucket::two_to_four, SizeBucket::five_to_nine,
                                                       SizeBucket::ten_plus};

const char* to_string(SizeBucket bucket);
std::optional<SizeBucket> bucket_of(std::size_t size);

struct BucketStats {
    std::size_t patches = 0;
    double patch_fraction = 0.0; // of all patches considered
    std::map<OrderPolicy, double> recall50;
    std::map<OrderPolicy, double> recall25;
};

struct OrderingReport {
    std::size_t patches_considered = 0;
    std::size_t eligible_patches = 0;
    std::array<BucketStats, 3> buckets{};
};

struct PatchOrdering {
    std::string patch_id;
    std::vector<std::string> predicted;
    std::vector<std::string> alphanumeric;
    std::vector<std::string> hot_spots;
};

/// Scores keyed by file; patches considered are those with every file scored.
using ScoreMap = std::map<FileKey, double>;

/// Mean Recall@50% and Recall@25% per size bucket and policy over eligible
/// patches (>= 2 files, >= 1 hot-spot). Random orderings use seed mixed with
/// the patch position.
OrderingReport ordering_report(const Corpus& corpus, const LabelTable& labels, const ScoreMap& scores,
                               std::uint64_t seed = 0, std::vector<PatchOrdering>* orderings = nullptr);

std::string ordering_report_csv(const OrderingReport& report);

} // namespace radar

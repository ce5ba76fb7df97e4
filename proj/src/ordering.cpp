#include "radar/ordering.hpp"
#include "radar/error.hpp"
#include "radar/format.hpp"
#include "radar/rng.hpp"

#include <algorithm>
#include <cmath>

namespace radar {

const char* to_string(OrderPolicy policy) {
    switch (policy) {
    case OrderPolicy::alphanumeric: return "alphanumeric";
    case OrderPolicy::predicted: return "predicted";
    case OrderPolicy::oracle: return "oracle";
    case OrderPolicy::random: return "random";
    }
    return "?";
}

std::vector<std::string> order_files(std::span<const OrderInput> files, OrderPolicy policy, std::uint64_t seed) {
    std::vector<const OrderInput*> items;
    items.reserve(files.size());
    for (const auto& f : files) items.push_back(&f);

    auto by_path = [](const OrderInput* a, const OrderInput* b) { return a->path < b->path; };
    switch (policy) {
    case OrderPolicy::alphanumeric:
        std::sort(items.begin(), items.end(), by_path);
        break;
    case OrderPolicy::predicted:
        for (const auto* f : items) {
            if (!f->score) throw MissingScore("no predicted score for '" + f->path + "'");
        }
        std::sort(items.begin(), items.end(), [&](const OrderInput* a, const OrderInput* b) {
            if (*a->score != *b->score) return *a->score > *b->score;
            return by_path(a, b);
        });
        break;
    case OrderPolicy::oracle:
        std::sort(items.begin(), items.end(), [&](const OrderInput* a, const OrderInput* b) {
            if (a->hot_spot != b->hot_spot) return a->hot_spot;
            return by_path(a, b);
        });
        break;
    case OrderPolicy::random: {
        std::sort(items.begin(), items.end(), by_path);
        Rng rng(seed);
        rng.shuffle(items);
        break;
    }
    }
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto* f : items) out.push_back(f->path);
    return out;
}

std::size_t cutoff_k(std::size_t size, double fraction) {
    return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size)));
}

double recall_at(std::span<const std::string> ordered, const std::set<std::string>& hot_spots, double fraction) {
    if (ordered.size() < 2) throw IneligiblePatch("Recall@k needs a patch with at least 2 files");
    std::size_t hot = 0;
    for (const auto& p : ordered) hot += hot_spots.contains(p) ? 1 : 0;
    if (hot == 0) throw IneligiblePatch("Recall@k needs at least one hot-spot in the patch");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("fraction must be in (0, 1]");
    const std::size_t k = std::min(cutoff_k(ordered.size(), fraction), ordered.size());
    std::size_t found = 0;
    for (std::size_t i = 0; i < k; ++i) found += hot_spots.contains(ordered[i]) ? 1 : 0;
    return double(found) / double(std::min(hot, k));
}

const char* to_string(SizeBucket bucket) {
    switch (bucket) {
    case SizeBucket::two_to_four: return "2-4";
    case SizeBucket::five_to_nine: return "5-9";
    case SizeBucket::ten_plus: return "10+";
    }
    return "?";
}

std::optional<SizeBucket> bucket_of(std::size_t size) {
    if (size < 2) return std::nullopt;
    if (size <= 4) return SizeBucket::two_to_four;
    if (size <= 9) return SizeBucket::five_to_nine;
    return SizeBucket::ten_plus;
}

OrderingReport ordering_report(const Corpus& corpus, const LabelTable& labels, const ScoreMap& scores,
                               std::uint64_t seed, std::vector<PatchOrdering>* orderings) {
    OrderingReport report;
    std::array<std::map<OrderPolicy, double>, 3> sum50, sum25;

    for (std::size_t p = 0; p < corpus.size(); ++p) {
        const auto& patch = corpus[p];
        std::vector<OrderInput> inputs;
        std::set<std::string> hot;
        bool scored = true;
        for (const auto& f : patch.initial().files) {
            const FileKey key{patch.patch_id, f.path};
            auto it = scores.find(key);
            if (it == scores.end()) {
                scored = false;
                break;
            }
            const bool is_hot = labels.at(key).hot_spot;
            if (is_hot) hot.insert(f.path);
            inputs.push_back({f.path, it->second, is_hot});
        }
        if (!scored) continue;
        ++report.patches_considered;
        const auto bucket = bucket_of(inputs.size());
        if (!bucket || hot.empty()) continue;
        ++report.eligible_patches;
        const auto b = static_cast<std::size_t>(*bucket);
        ++report.buckets[b].patches;

        for (auto policy : kAllPolicies) {
            const auto ordered = order_files(inputs, policy, derive_seed(seed, p));
            sum50[b][policy] += recall_at(ordered, hot, 0.5);
            sum25[b][policy] += recall_at(ordered, hot, 0.25);
        }
        if (orderings != nullptr) {
            orderings->push_back({patch.patch_id, order_files(inputs, OrderPolicy::predicted),
                                  order_files(inputs, OrderPolicy::alphanumeric), {hot.begin(), hot.end()}});
        }
    }

    for (std::size_t b = 0; b < report.buckets.size(); ++b) {
        auto& stats = report.buckets[b];
        if (report.patches_considered > 0) {
            stats.patch_fraction = double(stats.patches) / double(report.patches_considered);
        }
        for (auto policy : kAllPolicies) {
            stats.recall50[policy] = stats.patches == 0 ? 0.0 : sum50[b][policy] / double(stats.patches);
            stats.recall25[policy] = stats.patches == 0 ? 0.0 : sum25[b][policy] / double(stats.patches);
        }
    }
    return report;
}

std::string ordering_report_csv(const OrderingReport& report) {
    std::string out = "bucket,patches,patch_fraction";
    for (auto policy : kAllPolicies) out += std::string(",rec50_") + to_string(policy);
    for (auto policy : kAllPolicies) out += std::string(",rec25_") + to_string(policy);
    out += '\n';
    for (auto bucket : kAllBuckets) {
        const auto& s = report.buckets[static_cast<std::size_t>(bucket)];
        out += to_string(bucket);
        out += ',' + std::to_string(s.patches) + ',' + format_double(s.patch_fraction);
        for (auto policy : kAllPolicies) out += ',' + format_double(s.recall50.at(policy));
        for (auto policy : kAllPolicies) out += ',' + format_double(s.recall25.at(policy));
        out += '\n';
    }
    return out;
}

} // namespace radar

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radar/corpus.hpp"
#include "radar/embedding.hpp"
#include "radar/evaluation.hpp"
#include "radar/labeling.hpp"
#include "radar/learning.hpp"
#include "radar/stats.hpp"

namespace radar {

inline constexpr const char* kToolName = "review-radar";
inline constexpr const char* kConfigEnvVar = "REVIEW_RADAR_CONFIG";

const char* tool_version();

/// Every tunable of the pipeline. Resolution order: command-line flags, then
/// the config file (--config or $REVIEW_RADAR_CONFIG), then these defaults.
struct PipelineConfig {
    std::string corpus;
    std::string metadata; // raw-diff ingest
    std::string diffs;    // raw-diff ingest
    std::string external_vectors;
    std::string model;
    std::vector<std::string> reports_a;
    std::vector<std::string> reports_b;
    std::string out = "."; // not serialized, so outputs do not depend on where they are written
    std::string dataset; // empty: project of the first patch

    std::size_t context_limit = kDefaultContextLimit;
    CommentsScope comments_scope = CommentsScope::any;
    EmbeddingSpec spec;
    Label label = Label::hot_spot;
    Scheme scheme = Scheme::ratio;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    Variant variant = Variant::rf;                                      // train
    std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()}; // evaluate
    Hyperparameters hyper;
    double alpha = kSignificanceAlpha;
    std::size_t exact_wilcoxon_max_n = kExactWilcoxonMaxN;
    std::int64_t period_days = kDefaultPeriodDays;
    std::string metric = "f1";
    std::vector<std::string> closed_datasets;
    std::string slice = "test"; // order: test | all
    bool parallel = true;

    nlohmann::json to_json() const;
    /// Overlays the keys present in j; unknown keys are rejected.
    void merge_json(const nlohmann::json& j);
    void validate() const;
    std::string hash() const;
};

PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});

/// {"tool":..., "version":..., "config_hash":...}
nlohmann::json provenance(const PipelineConfig& config);

} // namespace radar

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "radar/corpus.hpp"
#include "radar/embedding.hpp"
#include "radar/features.hpp"
#include "radar/labeling.hpp"
#include "radar/learning.hpp"

namespace radar {

inline constexpr std::int64_t kDefaultPeriodDays = 182;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// One evaluation row: a changed file of an initial commit, in corpus order.
struct RowRef {
    FileKey key;
    std::size_t patch_index = 0;
    Timestamp time = 0;
};

std::vector<RowRef> corpus_rows(const Corpus& corpus);

enum class Scheme { ratio, sliding };

Scheme parse_scheme(std::string_view name);
const char* to_string(Scheme scheme);

/// Disjoint row-index sets into the row list the split was built from.
struct Split {
    std::string id;
    Scheme scheme = Scheme::ratio;
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// 80/10/10 along the timeline. A boundary falling inside a patch moves back
/// to that patch's first row, so the whole patch lands in the later partition.
Split split_ratio(std::span<const RowRef> rows);

/// Periods of period_days anchored at the first timestamp. For each pair of
/// consecutive periods: train on the first, validate on the first half of the
/// second and test on its second half. Windows with an empty partition are
/// skipped with a warning.
std::vector<Split> split_sliding(std::span<const RowRef> rows, std::int64_t period_days = kDefaultPeriodDays);

// ---- metrics ---------------------------------------------------------------

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold);

/// Rank-based AUC with mid-ranks for ties. Throws SingleClass.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct ThresholdChoice {
    double threshold = 0.5;
    double f1 = 0.0;
};

/// Smallest observed score t maximizing F1 of the rule score >= t. Falls back
/// to 0.5 with a warning when labels hold a single class.
ThresholdChoice threshold_f1(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct Metrics {
    ConfusionCounts counts;
    double pre = 0.0;
    double rec = 0.0;
    double f1 = 0.0;
    double gm = 0.0;
    double auc = 0.0; // NaN when the labels hold a single class
};

Metrics metrics(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold);

/// F1 from precision and recall, 0 when either is 0.
double f1_score(double pre, double rec);

// ---- experiments -----------------------------------------------------------

struct EvaluationReport {
    std::string dataset;
    Label label = Label::hot_spot;
    std::string spec;
    Variant variant = Variant::rf;
    std::uint64_t seed = 0;
    std::string window; // split id
    double auc = 0.0;
    double f1 = 0.0;
    double gm = 0.0;
    double pre = 0.0;
    double rec = 0.0;
    double threshold = 0.5;
    double val_f1 = 0.0;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_test = 0;

    nlohmann::json to_json() const;
    static EvaluationReport from_json(const nlohmann::json& j);
};

inline constexpr std::string_view kReportCsvHeader =
    "dataset,label,spec,variant,seed,window,auc,f1,gm,pre,rec,threshold,val_f1,n_train,n_validation,n_test";

std::string report_csv_row(const EvaluationReport& r);

struct ExperimentConfig {
    std::string dataset;
    EmbeddingSpec spec;
    Label label = Label::hot_spot;
    Scheme scheme = Scheme::ratio;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
    Hyperparameters hyper;
    std::int64_t period_days = kDefaultPeriodDays;
    const ExternalVectors* external = nullptr;
    Exec exec = Exec::parallel;
};

/// Labels of the given rows for one target, as 0/1.
std::vector<std::uint8_t> label_vector(const LabelTable& labels, const std::vector<FileKey>& keys, Label label);

/// Ratio scheme: one run per (variant, seed). Sliding scheme: one run per
/// (window, variant) using the first seed. Each run fits on train,
/// calibrates its threshold on validation and reports on test.
std::vector<EvaluationReport> run_experiment(const Corpus& corpus, const LabelTable& labels,
                                             const FeatureMatrix& features, const ExperimentConfig& config);

struct Selection {
    Variant variant = Variant::rf;
    std::map<Variant, double> median_val_f1;
    EvaluationReport representative;
    std::vector<EvaluationReport> runs; // the chosen variant's runs, in input order
};

/// Highest median validation F1 wins (ties: rf, rfs, nb, nbs). The median of
/// an even run count is the lower middle run. The representative is the run
/// whose validation F1 is that median.
Selection select_model(std::span<const EvaluationReport> reports);

std::vector<EvaluationReport> parse_reports_jsonl(std::istream& in);

} // namespace radar

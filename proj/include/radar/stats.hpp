#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radar/evaluation.hpp"

namespace radar {

inline constexpr double kSignificanceAlpha = 0.01;
inline constexpr std::size_t kExactWilcoxonMaxN = 25;

enum class WilcoxonMethod { exact, normal, degenerate };

const char* to_string(WilcoxonMethod method);

struct WilcoxonResult {
    double p_value = 1.0;
    double w_plus = 0.0;  // sum of ranks of positive differences
    std::size_t n = 0;    // non-zero differences
    WilcoxonMethod method = WilcoxonMethod::exact;
};

/// Two-sided paired signed-rank test. Zero differences are dropped, tied
/// |d| get average ranks; exact null distribution up to exact_max_n non-zero
/// pairs, normal approximation with continuity and tie correction beyond.
WilcoxonResult wilcoxon_paired(std::span<const double> x, std::span<const double> y,
                               std::size_t exact_max_n = kExactWilcoxonMaxN);

enum class EffectMagnitude { negligible, small, medium, large };

const char* to_string(EffectMagnitude magnitude);
EffectMagnitude effect_magnitude(double delta);

struct CliffsDelta {
    double delta = 0.0;
    EffectMagnitude magnitude = EffectMagnitude::negligible;
};

/// (#{x_i > y_j} - #{x_i < y_j}) / (|x| |y|), O((n+m) log(n+m)).
CliffsDelta cliffs_delta(std::span<const double> x, std::span<const double> y);

enum class Grouping { open, closed, all };

const char* to_string(Grouping grouping);
Grouping parse_grouping(std::string_view name);

struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;
    Grouping grouping = Grouping::all;
    std::string metric;
    std::string label;
    std::vector<std::string> run_ids; // "dataset/run", dataset-major, run-minor
};

/// Metric value of a report by column name (auc, f1, gm, pre, rec).
double report_metric(const EvaluationReport& r, std::string_view metric);

/// Aligns the runs of two setups for one label into paired vectors.
/// Reports of each dataset are reduced to the runs of that dataset's selected
/// variant; datasets are visited in name order and runs in seed (ratio) or
/// window (sliding) order. dataset_groups maps each dataset to open/closed;
/// unmapped datasets count as open.
PairedSample build_paired_vectors(std::span<const EvaluationReport> setup_a, std::span<const EvaluationReport> setup_b,
                                  Grouping grouping, Label label, std::string_view metric,
                                  const std::map<std::string, Grouping>& dataset_groups = {});

struct Comparison {
    std::string setup_a;
    std::string setup_b;
    Grouping grouping = Grouping::all;
    std::string label;
    std::string metric;
    std::size_t n_pairs = 0;
    WilcoxonResult test;
    bool significant = false;
    CliffsDelta effect;
};

Comparison compare_setups(const PairedSample& sample, std::string setup_a, std::string setup_b,
                          double alpha = kSignificanceAlpha, std::size_t exact_max_n = kExactWilcoxonMaxN);

inline constexpr std::string_view kComparisonCsvHeader =
    "setupA,setupB,grouping,label,metric,n,p,method,significant@.01,delta,magnitude";

std::string comparison_csv_row(const Comparison& c);

} // namespace radar

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "radar/parallel.hpp"
#include "radar/sparse.hpp"

namespace radar {

using DenseRow = std::vector<double>;

// ---- SMOTE -----------------------------------------------------------------

inline constexpr std::size_t kDefaultSmoteK = 5;

struct SmoteResult {
    std::vector<DenseRow> rows;
    /// (base, neighbour) minority indices each synthetic row interpolates.
    std::vector<std::pair<std::size_t, std::size_t>> parents;
};

/// Draws n_synthetic rows x + u * (x_nn - x), x a uniformly chosen minority
/// row, x_nn one of its k nearest minority neighbours (Euclidean; k clamped
/// to minority size - 1) and u uniform in [0, 1). With fewer than two minority
/// rows nothing is generated and a warning is issued.
SmoteResult smote(std::span<const DenseRow> minority, std::size_t k, std::size_t n_synthetic, std::uint64_t seed);

// ---- models ----------------------------------------------------------------

enum class ModelFamily { rf, nb };
enum class NbVariant { gaussian, multinomial };

/// The four evaluated variants: each family with and without SMOTE.
enum class Variant { rf, rfs, nb, nbs };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::rf, Variant::rfs, Variant::nb, Variant::nbs};

const char* to_string(ModelFamily family);
const char* to_string(Variant variant);
Variant parse_variant(std::string_view name);
ModelFamily family_of(Variant variant);
bool uses_smote(Variant variant);

struct Hyperparameters {
    std::size_t n_trees = 100;
    std::size_t max_features = 0; // 0: ceil(sqrt(d))
    std::size_t min_leaf = 1;
    bool bootstrap = true;
    std::size_t smote_k = kDefaultSmoteK;
    NbVariant nb_variant = NbVariant::gaussian;
    double var_smoothing = 1e-9;
    double nb_alpha = 1.0;

    nlohmann::json to_json() const;
    static Hyperparameters from_json(const nlohmann::json& j);
    bool operator==(const Hyperparameters&) const = default;
};

struct NaiveBayesModel {
    NbVariant variant = NbVariant::gaussian;
    std::array<double, 2> log_prior{};
    // gaussian
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var; // smoothed
    double epsilon = 0.0;
    // multinomial
    std::array<std::vector<double>, 2> feature_log_prob;

    bool operator==(const NaiveBayesModel&) const = default;
};

struct TreeNode {
    std::int32_t feature = -1; // -1: leaf
    double threshold = 0.0;    // go left when value <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;    // weighted positive fraction
    double weight = 0.0;   // weighted sample count reaching the node
    double impurity = 0.0; // Gini

    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // root at 0

    double predict(const SparseMatrix& x, std::size_t row) const;
    bool operator==(const DecisionTree&) const = default;
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    bool operator==(const RandomForestModel&) const = default;
};

struct ModelArtifact {
    static constexpr int kFormatVersion = 1;

    ModelFamily family = ModelFamily::rf;
    bool smote = false;
    std::uint64_t seed = 0;
    Hyperparameters hyper;
    std::variant<RandomForestModel, NaiveBayesModel> params;
    std::vector<std::string> columns;
    std::optional<double> threshold; // set by calibration

    Variant variant() const;
    nlohmann::json to_json() const;
    static ModelArtifact from_json(const nlohmann::json& j);
};

struct TrainingSet {
    const SparseMatrix* rows = nullptr;
    std::span<const std::uint8_t> labels; // 0/1 per row
    std::vector<std::string> columns;     // schema recorded into the artifact
    std::uint64_t seed = 0;
};

/// Per class, per column Gaussian (or multinomial) statistics.
NaiveBayesModel fit_naive_bayes(const SparseMatrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hyper);

/// Bagged CART trees; trees are independent jobs with seeds derived from
/// (seed, tree index), so both execution paths build identical forests.
RandomForestModel fit_random_forest(const SparseMatrix& x, std::span<const std::uint8_t> y,
                                    const Hyperparameters& hyper, std::uint64_t seed, Exec exec = Exec::parallel);

ModelArtifact train_nb(const TrainingSet& set, const Hyperparameters& hyper = {}, bool use_smote = false);
ModelArtifact train_rf(const TrainingSet& set, const Hyperparameters& hyper = {}, bool use_smote = false,
                       Exec exec = Exec::parallel);
ModelArtifact train(const TrainingSet& set, Variant variant, const Hyperparameters& hyper = {},
                    Exec exec = Exec::parallel);

/// Positive-class probability per row.
std::vector<double> predict_proba(const ModelArtifact& model, const SparseMatrix& rows, Exec exec = Exec::parallel);

/// Same, checking the row schema column-by-column.
std::vector<double> predict_proba(const ModelArtifact& model, const SparseMatrix& rows,
                                  std::span<const std::string> columns, Exec exec = Exec::parallel);

/// Mean decrease in Gini impurity per column, averaged over trees and
/// normalized to sum to 1 (uniform when every tree is a single leaf).
std::vector<double> feature_importance(const ModelArtifact& model);

/// Training rows after SMOTE balancing (unchanged when classes are already
/// balanced or the minority is too small).
struct BalancedSet {
    SparseMatrix rows;
    std::vector<std::uint8_t> labels;
};
BalancedSet balance_with_smote(const SparseMatrix& x, std::span<const std::uint8_t> y, std::size_t k,
                               std::uint64_t seed);

} // namespace radar

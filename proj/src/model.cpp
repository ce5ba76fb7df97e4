#include "radar/error.hpp"
#include "radar/learning.hpp"
#include "radar/rng.hpp"

#include <algorithm>

namespace radar {

using nlohmann::json;

// Defined next to the kernels.
std::vector<double> naive_bayes_proba(const NaiveBayesModel& m, const SparseMatrix& rows, Exec exec);
std::vector<double> random_forest_proba(const RandomForestModel& forest, const SparseMatrix& rows, Exec exec);
std::vector<double> random_forest_importance(const RandomForestModel& forest, std::size_t n_features);

const char* to_string(ModelFamily family) {
    return family == ModelFamily::rf ? "rf" : "nb";
}

const char* to_string(Variant variant) {
    switch (variant) {
    case Variant::rf: return "rf";
    case Variant::rfs: return "rfs";
    case Variant::nb: return "nb";
    case Variant::nbs: return "nbs";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    for (auto v : kAllVariants) {
        if (name == to_string(v)) return v;
    }
    throw InvalidArgument("unknown model variant '" + std::string(name) + "' (expected rf|rfs|nb|nbs)");
}

ModelFamily family_of(Variant variant) {
    return (variant == Variant::rf || variant == Variant::rfs) ? ModelFamily::rf : ModelFamily::nb;
}

bool uses_smote(Variant variant) {
    return variant == Variant::rfs || variant == Variant::nbs;
}

Variant ModelArtifact::variant() const {
    if (family == ModelFamily::rf) return smote ? Variant::rfs : Variant::rf;
    return smote ? Variant::nbs : Variant::nb;
}

json Hyperparameters::to_json() const {
    return {{"n_trees", n_trees},
            {"max_features", max_features},
            {"min_leaf", min_leaf},
            {"bootstrap", bootstrap},
            {"smote_k", smote_k},
            {"nb_variant", nb_variant == NbVariant::gaussian ? "gaussian" : "multinomial"},
            {"var_smoothing", var_smoothing},
            {"nb_alpha", nb_alpha}};
}

Hyperparameters Hyperparameters::from_json(const json& j) {
    Hyperparameters h;
    h.n_trees = j.at("n_trees").get<std::size_t>();
    h.max_features = j.at("max_features").get<std::size_t>();
    h.min_leaf = j.at("min_leaf").get<std::size_t>();
    h.bootstrap = j.at("bootstrap").get<bool>();
    h.smote_k = j.at("smote_k").get<std::size_t>();
    const auto nb = j.at("nb_variant").get<std::string>();
    if (nb == "gaussian") {
        h.nb_variant = NbVariant::gaussian;
    } else if (nb == "multinomial") {
        h.nb_variant = NbVariant::multinomial;
    } else {
        throw SchemaError(0, "nb_variant", "expected gaussian|multinomial");
    }
    h.var_smoothing = j.at("var_smoothing").get<double>();
    h.nb_alpha = j.at("nb_alpha").get<double>();
    return h;
}

json ModelArtifact::to_json() const {
    json j = {{"format", "radar.model"},
              {"version", kFormatVersion},
              {"family", to_string(family)},
              {"smote", smote},
              {"seed", seed},
              {"hyperparameters", hyper.to_json()},
              {"columns", columns},
              {"threshold", threshold ? json(*threshold) : json(nullptr)}};
    if (const auto* rf = std::get_if<RandomForestModel>(&params)) {
        json trees = json::array();
        for (const auto& t : rf->trees) {
            json nodes = json::array();
            for (const auto& n : t.nodes) {
                nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.weight, n.impurity});
            }
            trees.push_back(std::move(nodes));
        }
        j["forest"] = std::move(trees);
    } else {
        const auto& nb = std::get<NaiveBayesModel>(params);
        j["naive_bayes"] = {{"variant", nb.variant == NbVariant::gaussian ? "gaussian" : "multinomial"},
                            {"log_prior", nb.log_prior},
                            {"mean", nb.mean},
                            {"var", nb.var},
                            {"epsilon", nb.epsilon},
                            {"feature_log_prob", nb.feature_log_prob}};
    }
    return j;
}

ModelArtifact ModelArtifact::from_json(const json& j) {
    if (j.value("format", "") != "radar.model") throw SchemaError(0, "format", "not a model artifact");
    if (j.at("version").get<int>() != kFormatVersion) throw SchemaError(0, "version", "unsupported model version");
    ModelArtifact m;
    const auto family = j.at("family").get<std::string>();
    if (family == "rf") {
        m.family = ModelFamily::rf;
    } else if (family == "nb") {
        m.family = ModelFamily::nb;
    } else {
        throw SchemaError(0, "family", "expected rf|nb");
    }
    m.smote = j.at("smote").get<bool>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.hyper = Hyperparameters::from_json(j.at("hyperparameters"));
    m.columns = j.at("columns").get<std::vector<std::string>>();
    if (!j.at("threshold").is_null()) m.threshold = j.at("threshold").get<double>();
    if (m.family == ModelFamily::rf) {
        RandomForestModel rf;
        for (const auto& jt : j.at("forest")) {
            DecisionTree t;
            for (const auto& jn : jt) {
                t.nodes.push_back({jn.at(0).get<std::int32_t>(), jn.at(1).get<double>(), jn.at(2).get<std::int32_t>(),
                                   jn.at(3).get<std::int32_t>(), jn.at(4).get<double>(), jn.at(5).get<double>(),
                                   jn.at(6).get<double>()});
            }
            if (t.nodes.empty()) throw SchemaError(0, "forest", "empty tree");
            rf.trees.push_back(std::move(t));
        }
        m.params = std::move(rf);
    } else {
        const auto& jn = j.at("naive_bayes");
        NaiveBayesModel nb;
        nb.variant = jn.at("variant").get<std::string>() == "multinomial" ? NbVariant::multinomial : NbVariant::gaussian;
        nb.log_prior = jn.at("log_prior").get<std::array<double, 2>>();
        nb.mean = jn.at("mean").get<std::array<std::vector<double>, 2>>();
        nb.var = jn.at("var").get<std::array<std::vector<double>, 2>>();
        nb.epsilon = jn.at("epsilon").get<double>();
        nb.feature_log_prob = jn.at("feature_log_prob").get<std::array<std::vector<double>, 2>>();
        m.params = std::move(nb);
    }
    return m;
}

namespace {

void check_training_set(const TrainingSet& set) {
    if (set.rows == nullptr) throw InvalidArgument("training set has no rows");
    if (set.rows->rows() != set.labels.size()) throw DimensionMismatch("row and label counts differ");
    if (!set.columns.empty() && set.columns.size() != set.rows->cols()) {
        throw SchemaMismatch("column schema does not match the training matrix width");
    }
    const bool has_pos = std::find(set.labels.begin(), set.labels.end(), 1) != set.labels.end();
    const bool has_neg = std::find(set.labels.begin(), set.labels.end(), 0) != set.labels.end();
    if (!has_pos || !has_neg) throw DegenerateLabels("training labels contain a single class");
}

constexpr std::uint64_t kSmoteStream = 0x5307e;

ModelArtifact make_artifact(const TrainingSet& set, ModelFamily family, const Hyperparameters& hyper, bool use_smote) {
    ModelArtifact m;
    m.family = family;
    m.smote = use_smote;
    m.seed = set.seed;
    m.hyper = hyper;
    m.columns = set.columns;
    if (m.columns.empty()) {
        for (std::size_t j = 0; j < set.rows->cols(); ++j) m.columns.push_back("x" + std::to_string(j));
    }
    return m;
}

} // namespace

ModelArtifact train_nb(const TrainingSet& set, const Hyperparameters& hyper, bool use_smote) {
    check_training_set(set);
    auto m = make_artifact(set, ModelFamily::nb, hyper, use_smote);
    if (use_smote) {
        const auto balanced = balance_with_smote(*set.rows, set.labels, hyper.smote_k, derive_seed(set.seed, kSmoteStream));
        m.params = fit_naive_bayes(balanced.rows, balanced.labels, hyper);
    } else {
        m.params = fit_naive_bayes(*set.rows, set.labels, hyper);
    }
    return m;
}

ModelArtifact train_rf(const TrainingSet& set, const Hyperparameters& hyper, bool use_smote, Exec exec) {
    check_training_set(set);
    auto m = make_artifact(set, ModelFamily::rf, hyper, use_smote);
    if (use_smote) {
        const auto balanced = balance_with_smote(*set.rows, set.labels, hyper.smote_k, derive_seed(set.seed, kSmoteStream));
        m.params = fit_random_forest(balanced.rows, balanced.labels, hyper, set.seed, exec);
    } else {
        m.params = fit_random_forest(*set.rows, set.labels, hyper, set.seed, exec);
    }
    return m;
}

ModelArtifact train(const TrainingSet& set, Variant variant, const Hyperparameters& hyper, Exec exec) {
    if (family_of(variant) == ModelFamily::rf) return train_rf(set, hyper, uses_smote(variant), exec);
    return train_nb(set, hyper, uses_smote(variant));
}

std::vector<double> predict_proba(const ModelArtifact& model, const SparseMatrix& rows, Exec exec) {
    if (rows.cols() != model.columns.size()) {
        throw SchemaMismatch("rows have " + std::to_string(rows.cols()) + " columns, model expects " +
                             std::to_string(model.columns.size()));
    }
    if (const auto* rf = std::get_if<RandomForestModel>(&model.params)) return random_forest_proba(*rf, rows, exec);
    return naive_bayes_proba(std::get<NaiveBayesModel>(model.params), rows, exec);
}

std::vector<double> predict_proba(const ModelArtifact& model, const SparseMatrix& rows,
                                  std::span<const std::string> columns, Exec exec) {
    if (!std::equal(columns.begin(), columns.end(), model.columns.begin(), model.columns.end())) {
        throw SchemaMismatch("row schema differs from the schema the model was trained on");
    }
    return predict_proba(model, rows, exec);
}

std::vector<double> feature_importance(const ModelArtifact& model) {
    const auto* rf = std::get_if<RandomForestModel>(&model.params);
    if (rf == nullptr) throw UnsupportedFamily("feature importance is only defined for random forests");
    return random_forest_importance(*rf, model.columns.size());
}

} // namespace radar

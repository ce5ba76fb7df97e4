#include "radar/config.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "radar/error.hpp"
#include "radar/format.hpp"

#ifndef RADAR_VERSION
#define RADAR_VERSION "0.0.0"
#endif

namespace radar {

using nlohmann::json;

const char* tool_version() { return RADAR_VERSION; }

namespace {

const char* nb_variant_name(NbVariant v) { return v == NbVariant::gaussian ? "gaussian" : "multinomial"; }

NbVariant parse_nb_variant(const std::string& name) {
    if (name == "gaussian") return NbVariant::gaussian;
    if (name == "multinomial") return NbVariant::multinomial;
    throw InvalidArgument("unknown nb_variant '" + name + "'");
}

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument("config key '" + key + "' has the wrong type");
    }
}

std::vector<std::string> string_list(const json& j, const std::string& key) {
    if (j.is_string()) return {j.get<std::string>()};
    return get_as<std::vector<std::string>>(j, key);
}

// key = value lines; values are read as JSON when they parse, as strings otherwise.
json parse_key_value(const std::string& text) {
    json out = json::object();
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        auto parsed = json::parse(value, nullptr, false);
        out[key] = parsed.is_discarded() ? json(value) : parsed;
    }
    return out;
}

} // namespace

json PipelineConfig::to_json() const {
    json seeds_json = json::array();
    for (auto s : seeds) seeds_json.push_back(s);
    json variants_json = json::array();
    for (auto v : variants) variants_json.push_back(radar::to_string(v));
    return json{
        {"corpus", corpus},
        {"metadata", metadata},
        {"diffs", diffs},
        {"external_vectors", external_vectors},
        {"model", model},
        {"a", reports_a},
        {"b", reports_b},
        {"dataset", dataset},
        {"context_limit", context_limit},
        {"comments_scope", radar::to_string(comments_scope)},
        {"spec", spec.to_string()},
        {"label", radar::to_string(label)},
        {"scheme", radar::to_string(scheme)},
        {"seeds", seeds_json},
        {"variant", radar::to_string(variant)},
        {"variants", variants_json},
        {"n_trees", hyper.n_trees},
        {"max_features", hyper.max_features},
        {"min_leaf", hyper.min_leaf},
        {"bootstrap", hyper.bootstrap},
        {"smote_k", hyper.smote_k},
        {"nb_variant", nb_variant_name(hyper.nb_variant)},
        {"var_smoothing", hyper.var_smoothing},
        {"nb_alpha", hyper.nb_alpha},
        {"alpha", alpha},
        {"exact_wilcoxon_max_n", exact_wilcoxon_max_n},
        {"period_days", period_days},
        {"metric", metric},
        {"closed_datasets", closed_datasets},
        {"slice", slice},
        {"parallel", parallel},
    };
}

void PipelineConfig::merge_json(const json& j) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "corpus") corpus = get_as<std::string>(value, key);
        else if (key == "metadata") metadata = get_as<std::string>(value, key);
        else if (key == "diffs") diffs = get_as<std::string>(value, key);
        else if (key == "external_vectors") external_vectors = get_as<std::string>(value, key);
        else if (key == "model") model = get_as<std::string>(value, key);
        else if (key == "a") reports_a = string_list(value, key);
        else if (key == "b") reports_b = string_list(value, key);
        else if (key == "out") out = get_as<std::string>(value, key);
        else if (key == "dataset") dataset = get_as<std::string>(value, key);
        else if (key == "context_limit") context_limit = get_as<std::size_t>(value, key);
        else if (key == "comments_scope") comments_scope = parse_comments_scope(get_as<std::string>(value, key));
        else if (key == "spec") spec = parse_spec(get_as<std::string>(value, key));
        else if (key == "label") label = parse_label(get_as<std::string>(value, key));
        else if (key == "scheme") scheme = parse_scheme(get_as<std::string>(value, key));
        else if (key == "seeds") seeds = get_as<std::vector<std::uint64_t>>(value, key);
        else if (key == "variant") variant = parse_variant(get_as<std::string>(value, key));
        else if (key == "variants") {
            variants.clear();
            for (const auto& name : string_list(value, key)) variants.push_back(parse_variant(name));
        } else if (key == "n_trees") hyper.n_trees = get_as<std::size_t>(value, key);
        else if (key == "max_features") hyper.max_features = get_as<std::size_t>(value, key);
        else if (key == "min_leaf") hyper.min_leaf = get_as<std::size_t>(value, key);
        else if (key == "bootstrap") hyper.bootstrap = get_as<bool>(value, key);
        else if (key == "smote_k") hyper.smote_k = get_as<std::size_t>(value, key);
        else if (key == "nb_variant") hyper.nb_variant = parse_nb_variant(get_as<std::string>(value, key));
        else if (key == "var_smoothing") hyper.var_smoothing = get_as<double>(value, key);
        else if (key == "nb_alpha") hyper.nb_alpha = get_as<double>(value, key);
        else if (key == "alpha") alpha = get_as<double>(value, key);
        else if (key == "exact_wilcoxon_max_n") exact_wilcoxon_max_n = get_as<std::size_t>(value, key);
        else if (key == "period_days") period_days = get_as<std::int64_t>(value, key);
        else if (key == "metric") metric = get_as<std::string>(value, key);
        else if (key == "closed_datasets") closed_datasets = string_list(value, key);
        else if (key == "slice") slice = get_as<std::string>(value, key);
        else if (key == "parallel") parallel = get_as<bool>(value, key);
        else throw InvalidArgument("unknown config key '" + key + "'");
    }
}

void PipelineConfig::validate() const {
    if (context_limit == 0) throw InvalidArgument("context_limit must be positive");
    if (seeds.empty()) throw InvalidArgument("seeds must not be empty");
    if (variants.empty()) throw InvalidArgument("variants must not be empty");
    if (hyper.n_trees == 0) throw InvalidArgument("n_trees must be positive");
    if (hyper.min_leaf == 0) throw InvalidArgument("min_leaf must be positive");
    if (hyper.smote_k == 0) throw InvalidArgument("smote_k must be positive");
    if (!(hyper.var_smoothing >= 0.0)) throw InvalidArgument("var_smoothing must be non-negative");
    if (!(hyper.nb_alpha > 0.0)) throw InvalidArgument("nb_alpha must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (period_days <= 0) throw InvalidArgument("period_days must be positive");
    static const std::set<std::string> metrics{"auc", "f1", "gm", "pre", "rec"};
    if (!metrics.count(metric)) throw InvalidArgument("unknown metric '" + metric + "'");
    if (slice != "test" && slice != "all") throw InvalidArgument("slice must be test or all");
}

std::string PipelineConfig::hash() const { return fnv1a_hex(to_json().dump()); }

PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base) {
    const auto text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    json j;
    if (first != std::string::npos && text[first] == '{') {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw InvalidArgument("config " + path.string() + ": " + e.what());
        }
    } else {
        j = parse_key_value(text);
    }
    base.merge_json(j);
    return base;
}

json provenance(const PipelineConfig& config) {
    return json{{"tool", kToolName}, {"version", tool_version()}, {"config_hash", config.hash()}};
}

} // namespace radar

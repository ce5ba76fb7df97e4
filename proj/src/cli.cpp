#include "radar/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "radar/config.hpp"
#include "radar/corpus.hpp"
#include "radar/diagnostics.hpp"
#include "radar/embedding.hpp"
#include "radar/error.hpp"
#include "radar/evaluation.hpp"
#include "radar/features.hpp"
#include "radar/format.hpp"
#include "radar/labeling.hpp"
#include "radar/learning.hpp"
#include "radar/ordering.hpp"
#include "radar/stats.hpp"

namespace radar::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct UsageError : Error {
    using Error::Error;
};

// ---- output helpers --------------------------------------------------------

class Outputs {
public:
    Outputs(const PipelineConfig& config, std::ostream& log)
        : dir_(config.out), meta_(provenance(config)), log_(log) {
        auto cfg = config.to_json();
        cfg["_meta"] = meta_;
        write("config.json", cfg.dump(2) + "\n");
    }

    void jsonl(const std::string& name, const std::vector<std::string>& lines) {
        std::string text = json{{"_meta", meta_}}.dump() + "\n";
        for (const auto& line : lines) text += line + "\n";
        write(name, text);
    }

    void csv(const std::string& name, const std::string& body) {
        std::string text = "# " + meta_["tool"].get<std::string>() + " " + meta_["version"].get<std::string>() +
                           " config_hash=" + meta_["config_hash"].get<std::string>() + "\n";
        write(name, text + body);
    }

    void json_file(const std::string& name, json j) {
        j["_meta"] = meta_;
        write(name, j.dump(2) + "\n");
    }

private:
    void write(const std::string& name, const std::string& text) {
        write_file_atomic(dir_ / name, text);
        log_ << "wrote " << (dir_ / name).string() << "\n";
    }

    fs::path dir_;
    json meta_;
    std::ostream& log_;
};

// ---- shared stage inputs ---------------------------------------------------

Exec exec_of(const PipelineConfig& c) { return c.parallel ? Exec::parallel : Exec::serial; }

Corpus require_corpus(const PipelineConfig& c) {
    if (c.corpus.empty()) throw UsageError("--corpus is required");
    return load_corpus(c.corpus, LoadOptions{c.context_limit});
}

LabelTable labels_of(const Corpus& corpus, const PipelineConfig& c) {
    return label_all(corpus, LabelOptions{c.comments_scope}, exec_of(c));
}

std::string dataset_name(const Corpus& corpus, const PipelineConfig& c) {
    if (!c.dataset.empty()) return c.dataset;
    if (!corpus.empty() && !corpus.front().project.empty()) return corpus.front().project;
    return "corpus";
}

std::optional<ExternalVectors> external_of(const Corpus& corpus, const EmbeddingSpec& spec, const PipelineConfig& c) {
    if (spec.text != TextKind::external) return std::nullopt;
    if (c.external_vectors.empty()) throw UsageError("spec uses external vectors; --external-vectors is required");
    std::set<FileKey> known;
    for (const auto& r : corpus_rows(corpus)) known.insert(r.key);
    return load_external_vectors(c.external_vectors, &known);
}

std::vector<FileKey> keys_at(const std::vector<RowRef>& rows, const std::vector<std::size_t>& idx) {
    std::vector<FileKey> keys;
    keys.reserve(idx.size());
    for (auto i : idx) keys.push_back(rows[i].key);
    return keys;
}

// Split used by the single-model stages: the ratio split, or the latest
// sliding window.
Split model_split(const std::vector<RowRef>& rows, const PipelineConfig& c) {
    if (c.scheme == Scheme::ratio) return split_ratio(rows);
    auto windows = split_sliding(rows, c.period_days);
    if (windows.empty()) throw TooFewPeriods("no usable sliding window");
    return windows.back();
}

// ---- stages ----------------------------------------------------------------

void stage_ingest(const PipelineConfig& c, std::ostream& log) {
    Corpus corpus;
    if (!c.metadata.empty()) {
        if (c.diffs.empty()) throw UsageError("--metadata requires --diffs");
        corpus = ingest_raw_diffs(c.metadata, c.diffs, LoadOptions{c.context_limit});
    } else {
        corpus = require_corpus(c);
    }
    Outputs out(c, log);
    std::vector<std::string> lines;
    for (const auto& p : corpus) lines.push_back(patch_to_json(p).dump());
    out.jsonl("corpus.jsonl", lines);
}

void stage_label(const PipelineConfig& c, std::ostream& log) {
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    Outputs out(c, log);
    std::vector<std::string> lines;
    for (const auto& row : labels.rows()) {
        ordered_json j{{"patch_id", row.key.patch_id},
                       {"path", row.key.path},
                       {"commented", row.labels.commented},
                       {"revised", row.labels.revised},
                       {"hot_spot", row.labels.hot_spot}};
        lines.push_back(j.dump());
    }
    out.jsonl("labels.jsonl", lines);
}

void stage_featurize(const PipelineConfig& c, std::ostream& log) {
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    const auto features = extract_all(corpus, labels);
    Outputs out(c, log);
    out.csv("features.csv", features_to_csv(features));
    std::vector<std::string> lines;
    const auto& names = feature_names();
    for (const auto& row : features.rows) {
        ordered_json j{{"patch_id", row.key.patch_id}, {"path", row.key.path}};
        for (std::size_t f = 0; f < kFeatureCount; ++f) j[names[f]] = row.values[f];
        lines.push_back(j.dump());
    }
    out.jsonl("features.jsonl", lines);
}

void stage_embed(const PipelineConfig& c, std::ostream& log) {
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    const auto features = extract_all(corpus, labels);
    const auto external = external_of(corpus, c.spec, c);
    const auto rows = corpus_rows(corpus);
    const auto split = model_split(rows, c);

    const auto embedder = Embedder::fit(c.spec, corpus, keys_at(rows, split.train));
    std::vector<FileKey> all_keys;
    for (const auto& r : rows) all_keys.push_back(r.key);
    const auto matrix =
        embedder.transform(corpus, all_keys, &features, external ? &*external : nullptr, exec_of(c));

    Outputs out(c, log);
    out.json_file("embedding.json", matrix.to_json());
    if (c.spec.text == TextKind::bow) {
        out.json_file("vocab_add.json", embedder.add_vocab().to_json());
        if (c.spec.streams == Streams::add_and_remove) out.json_file("vocab_rem.json", embedder.rem_vocab().to_json());
    }
}

void stage_train(const PipelineConfig& c, std::ostream& log) {
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    const auto features = extract_all(corpus, labels);
    const auto external = external_of(corpus, c.spec, c);
    const auto* ext = external ? &*external : nullptr;
    const auto rows = corpus_rows(corpus);
    const auto split = model_split(rows, c);

    const auto train_keys = keys_at(rows, split.train);
    const auto val_keys = keys_at(rows, split.validation);
    const auto embedder = Embedder::fit(c.spec, corpus, train_keys);
    const auto x_train = embedder.transform(corpus, train_keys, &features, ext, exec_of(c));
    const auto x_val = embedder.transform(corpus, val_keys, &features, ext, exec_of(c));
    const auto y_train = label_vector(labels, train_keys, c.label);
    const auto y_val = label_vector(labels, val_keys, c.label);

    TrainingSet set{&x_train.data, y_train, x_train.columns, c.seeds.front()};
    auto model = train(set, c.variant, c.hyper, exec_of(c));
    const auto choice = threshold_f1(predict_proba(model, x_val.data, x_val.columns, exec_of(c)), y_val);
    model.threshold = choice.threshold;

    json j{{"format", "radar.pipeline_model"},
           {"dataset", dataset_name(corpus, c)},
           {"label", to_string(c.label)},
           {"split", split.id},
           {"n_train", train_keys.size()},
           {"n_validation", val_keys.size()},
           {"val_f1", choice.f1},
           {"embedder", embedder.to_json()},
           {"model", model.to_json()}};
    Outputs out(c, log);
    out.json_file("model.json", j);
}

struct LoadedModel {
    Embedder embedder;
    ModelArtifact model;
    Label label = Label::hot_spot;
};

LoadedModel load_model(const PipelineConfig& c) {
    if (c.model.empty()) throw UsageError("--model is required");
    json j;
    try {
        j = json::parse(read_file(c.model));
    } catch (const json::parse_error& e) {
        throw SchemaMismatch(c.model + ": " + e.what());
    }
    if (j.value("format", "") != "radar.pipeline_model") throw SchemaMismatch(c.model + ": not a pipeline model file");
    return {Embedder::from_json(j.at("embedder")), ModelArtifact::from_json(j.at("model")),
            parse_label(j.at("label").get<std::string>())};
}

void stage_evaluate(const PipelineConfig& c, std::ostream& log) {
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    const auto features = extract_all(corpus, labels);
    const auto external = external_of(corpus, c.spec, c);

    ExperimentConfig ec;
    ec.dataset = dataset_name(corpus, c);
    ec.spec = c.spec;
    ec.label = c.label;
    ec.scheme = c.scheme;
    ec.seeds = c.seeds;
    ec.variants = c.variants;
    ec.hyper = c.hyper;
    ec.period_days = c.period_days;
    ec.external = external ? &*external : nullptr;
    ec.exec = exec_of(c);
    const auto reports = run_experiment(corpus, labels, features, ec);
    if (reports.empty()) throw SingleClass("no split produced a run");

    Outputs out(c, log);
    std::string csv = std::string(kReportCsvHeader) + "\n";
    std::vector<std::string> lines;
    for (const auto& r : reports) {
        csv += report_csv_row(r) + "\n";
        lines.push_back(r.to_json().dump());
    }
    out.csv("reports.csv", csv);
    out.jsonl("reports.jsonl", lines);

    const auto sel = select_model(reports);
    json medians = json::object();
    for (const auto& [v, m] : sel.median_val_f1) medians[to_string(v)] = m;
    out.json_file("selection.json", json{{"variant", to_string(sel.variant)},
                                         {"median_val_f1", medians},
                                         {"representative", sel.representative.to_json()}});
}

std::vector<EvaluationReport> load_reports(const std::vector<std::string>& paths) {
    std::vector<EvaluationReport> all;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        auto part = parse_reports_jsonl(in);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

std::string setup_name(const std::vector<EvaluationReport>& reports, const std::vector<std::string>& paths) {
    std::set<std::string> specs;
    for (const auto& r : reports) specs.insert(r.spec);
    if (specs.size() == 1) return *specs.begin();
    std::string name;
    for (const auto& p : paths) name += (name.empty() ? "" : "+") + fs::path(p).parent_path().filename().string();
    return name;
}

void stage_compare(const PipelineConfig& c, std::ostream& log) {
    if (c.reports_a.empty() || c.reports_b.empty()) throw UsageError("--a and --b are required");
    const auto a = load_reports(c.reports_a);
    const auto b = load_reports(c.reports_b);
    auto name_a = setup_name(a, c.reports_a);
    auto name_b = setup_name(b, c.reports_b);
    if (name_a == name_b) {
        name_a = "A:" + name_a;
        name_b = "B:" + name_b;
    }

    std::map<std::string, Grouping> groups;
    for (const auto& d : c.closed_datasets) groups[d] = Grouping::closed;
    std::set<Grouping> present{Grouping::all};
    for (const auto& r : a) {
        if (r.label != c.label) continue;
        auto it = groups.find(r.dataset);
        present.insert(it == groups.end() ? Grouping::open : it->second);
    }

    std::string csv = std::string(kComparisonCsvHeader) + "\n";
    for (auto g : {Grouping::open, Grouping::closed, Grouping::all}) {
        if (!present.count(g)) continue;
        const auto sample = build_paired_vectors(a, b, g, c.label, c.metric, groups);
        csv += comparison_csv_row(compare_setups(sample, name_a, name_b, c.alpha, c.exact_wilcoxon_max_n)) + "\n";
    }
    Outputs out(c, log);
    out.csv("compare.csv", csv);
}

void stage_order(const PipelineConfig& c, std::ostream& log) {
    const auto loaded = load_model(c);
    if (loaded.label != Label::hot_spot) warn("model was trained for " + std::string(to_string(loaded.label)));
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    const auto features = extract_all(corpus, labels);
    const auto external = external_of(corpus, loaded.embedder.spec(), c);
    const auto rows = corpus_rows(corpus);

    std::vector<std::size_t> idx;
    if (c.slice == "test") {
        idx = split_ratio(rows).test;
    } else {
        idx.resize(rows.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    const auto keys = keys_at(rows, idx);
    const auto x = loaded.embedder.transform(corpus, keys, &features, external ? &*external : nullptr, exec_of(c));
    const auto scores = predict_proba(loaded.model, x.data, x.columns, exec_of(c));
    ScoreMap score_map;
    for (std::size_t i = 0; i < keys.size(); ++i) score_map[keys[i]] = scores[i];

    std::vector<PatchOrdering> orderings;
    const auto report = ordering_report(corpus, labels, score_map, c.seeds.front(), &orderings);

    std::vector<std::string> lines;
    for (const auto& o : orderings) {
        ordered_json j{{"patch_id", o.patch_id},
                       {"predicted", o.predicted},
                       {"alphanumeric", o.alphanumeric},
                       {"hot_spots", o.hot_spots}};
        lines.push_back(j.dump());
    }
    Outputs out(c, log);
    out.jsonl("ordering.jsonl", lines);
    out.csv("ordering_report.csv", ordering_report_csv(report));
}

void stage_report(const PipelineConfig& c, std::ostream& log) {
    const auto corpus = require_corpus(c);
    const auto labels = labels_of(corpus, c);
    const auto summary = corpus_summary(corpus, labels);

    ordered_json j{{"dataset", dataset_name(corpus, c)},
                   {"patches", summary.patch_count},
                   {"changed_files", summary.changed_file_count}};
    std::string csv = "label,patches,patch_ratio,files,file_ratio\n";
    for (auto label : kAllLabels) {
        const auto& s = summary.labels[static_cast<std::size_t>(label)];
        j[to_string(label)] = ordered_json{
            {"patches", s.patches}, {"patch_ratio", s.patch_ratio}, {"files", s.files}, {"file_ratio", s.file_ratio}};
        csv += std::string(to_string(label)) + "," + std::to_string(s.patches) + "," + format_double(s.patch_ratio) +
               "," + std::to_string(s.files) + "," + format_double(s.file_ratio) + "\n";
    }

    std::optional<std::string> importance_csv;
    if (!c.model.empty()) {
        const auto loaded = load_model(c);
        if (loaded.model.family == ModelFamily::rf) {
            const auto imp = feature_importance(loaded.model);
            std::vector<std::size_t> order(imp.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return imp[x] > imp[y]; });
            std::string text = "rank,column,importance\n";
            for (std::size_t r = 0; r < order.size(); ++r)
                text += std::to_string(r + 1) + "," + csv_field(loaded.model.columns[order[r]]) + "," +
                        format_double(imp[order[r]]) + "\n";
            importance_csv = std::move(text);
        } else {
            warn("feature importance needs a random-forest model; importance.csv not written");
        }
    }

    Outputs out(c, log);
    out.json_file("summary.json", json::parse(j.dump()));
    out.csv("summary.csv", csv);
    if (importance_csv) out.csv("importance.csv", *importance_csv);
}

// ---- argument parsing ------------------------------------------------------

// Flags land in `overrides` as config keys, applied after the config file.
void add_common(CLI::App* app, json& overrides, std::string& config_path) {
    auto str = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                              help);
    };
    auto num = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<double>(
            flag,
            [&overrides, key](double v) {
                if (v == static_cast<double>(static_cast<long long>(v)) && v >= 0)
                    overrides[key] = static_cast<std::uint64_t>(v);
                else
                    overrides[key] = v;
            },
            help);
    };
    app->add_option("--config", config_path, "Config file (JSON or key = value lines)");
    str("--corpus", "corpus", "Corpus JSONL");
    str("--out", "out", "Output directory");
    str("--label", "label", "commented | revised | hot_spot");
    str("--spec", "spec", "<text_kind>+<streams>+<features>");
    str("--scheme", "scheme", "ratio | sliding");
    app->add_option_function<std::vector<std::uint64_t>>(
           "--seeds", [&overrides](const std::vector<std::uint64_t>& v) { overrides["seeds"] = v; },
           "Comma-separated seeds")
        ->delimiter(',');
    str("--comments-scope", "comments_scope", "any | initial");
    num("--context-limit", "context_limit", "Context lines kept per side of a hunk");
    str("--dataset", "dataset", "Dataset name recorded in reports");
    str("--external-vectors", "external_vectors", "Precomputed code vectors (JSONL)");
    str("--variant", "variant", "rf | rfs | nb | nbs (train)");
    app->add_option_function<std::vector<std::string>>(
           "--variants", [&overrides](const std::vector<std::string>& v) { overrides["variants"] = v; },
           "Comma-separated variants (evaluate)")
        ->delimiter(',');
    num("--n-trees", "n_trees", "Trees per forest");
    num("--max-features", "max_features", "Features per split (0: ceil(sqrt(d)))");
    num("--min-leaf", "min_leaf", "Minimum samples per leaf");
    num("--smote-k", "smote_k", "SMOTE neighbours");
    str("--nb-variant", "nb_variant", "gaussian | multinomial");
    num("--period-days", "period_days", "Sliding-window period length in days");
    app->add_flag_callback("--serial", [&overrides] { overrides["parallel"] = false; }, "Use the serial kernels");
}

PipelineConfig resolve(const json& overrides, const std::string& config_path) {
    PipelineConfig config;
    if (!config_path.empty()) {
        config = load_config_file(config_path, config);
    } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
        config = load_config_file(env, config);
    }
    config.merge_json(overrides);
    config.validate();
    return config;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hot-spot prediction for code review", kToolName};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", tool_version());

    json overrides = json::object();
    std::string config_path;

    using Stage = void (*)(const PipelineConfig&, std::ostream&);
    const std::vector<std::tuple<const char*, const char*, Stage>> stages{
        {"ingest", "Normalize a corpus (JSONL or metadata plus raw diffs)", stage_ingest},
        {"label", "Label every changed file", stage_label},
        {"featurize", "Compute the 37 review-process features", stage_featurize},
        {"embed", "Build the embedding matrix for a spec", stage_embed},
        {"train", "Train one model and calibrate its threshold", stage_train},
        {"evaluate", "Run the repeated evaluation for a spec and label", stage_evaluate},
        {"compare", "Paired comparison of two evaluated setups", stage_compare},
        {"order", "Order each patch's files by predicted hot-spot probability", stage_order},
        {"report", "Corpus summary and feature importances", stage_report},
    };
    std::map<CLI::App*, Stage> handlers;
    for (const auto& [name, help, stage] : stages) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, overrides, config_path);
        if (std::string(name) == "ingest") {
            sub->add_option_function<std::string>(
                "--metadata", [&overrides](const std::string& v) { overrides["metadata"] = v; }, "Metadata JSONL");
            sub->add_option_function<std::string>(
                "--diffs", [&overrides](const std::string& v) { overrides["diffs"] = v; }, "Directory of diffs");
        }
        if (std::string(name) == "compare") {
            sub->add_option_function<std::vector<std::string>>(
                "--a", [&overrides](const std::vector<std::string>& v) { overrides["a"] = v; },
                "Setup A reports.jsonl files");
            sub->add_option_function<std::vector<std::string>>(
                "--b", [&overrides](const std::vector<std::string>& v) { overrides["b"] = v; },
                "Setup B reports.jsonl files");
            sub->add_option_function<std::string>(
                "--metric", [&overrides](const std::string& v) { overrides["metric"] = v; }, "auc|f1|gm|pre|rec");
            sub->add_option_function<std::vector<std::string>>(
                   "--closed-datasets",
                   [&overrides](const std::vector<std::string>& v) { overrides["closed_datasets"] = v; },
                   "Datasets grouped as closed")
                ->delimiter(',');
        }
        if (std::string(name) == "order" || std::string(name) == "report") {
            sub->add_option_function<std::string>(
                "--model", [&overrides](const std::string& v) { overrides["model"] = v; }, "model.json from train");
        }
        if (std::string(name) == "order") {
            sub->add_option_function<std::string>(
                "--slice", [&overrides](const std::string& v) { overrides["slice"] = v; }, "test | all");
        }
        handlers[sub] = stage;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    PipelineConfig config;
    try {
        config = resolve(overrides, config_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return kExitUsage;
    }
    try {
        handlers.at(sub)(config, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitStageError;
    }
    return kExitOk;
}

} // namespace radar::cli

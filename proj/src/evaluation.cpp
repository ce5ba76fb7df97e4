#include "radar/evaluation.hpp"
#include "radar/diagnostics.hpp"
#include "radar/error.hpp"
#include "radar/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace radar {

using nlohmann::json;

std::vector<RowRef> corpus_rows(const Corpus& corpus) {
    std::vector<RowRef> rows;
    for (std::size_t p = 0; p < corpus.size(); ++p) {
        for (const auto& f : corpus[p].initial().files) {
            rows.push_back({{corpus[p].patch_id, f.path}, p, corpus[p].submitted_at});
        }
    }
    return rows;
}

Scheme parse_scheme(std::string_view name) {
    if (name == "ratio") return Scheme::ratio;
    if (name == "sliding") return Scheme::sliding;
    throw InvalidArgument("unknown scheme '" + std::string(name) + "' (expected ratio|sliding)");
}

const char* to_string(Scheme scheme) {
    return scheme == Scheme::ratio ? "ratio" : "sliding";
}

// ---- splits ----------------------------------------------------------------

namespace {

std::size_t align_to_patch_start(std::span<const RowRef> rows, std::size_t boundary) {
    while (boundary > 0 && boundary < rows.size() && rows[boundary].patch_index == rows[boundary - 1].patch_index) {
        --boundary;
    }
    return boundary;
}

std::vector<std::size_t> index_range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> v(end - begin);
    std::iota(v.begin(), v.end(), begin);
    return v;
}

} // namespace

Split split_ratio(std::span<const RowRef> rows) {
    const std::size_t n = rows.size();
    if (n < 10) throw TooFewRows("the ratio split needs at least 10 rows, got " + std::to_string(n));
    const auto b1 = align_to_patch_start(rows, n * 8 / 10);
    const auto b2 = align_to_patch_start(rows, n * 9 / 10);
    if (b1 == 0 || b2 <= b1 || b2 >= n) {
        throw TooFewRows("patch-atomic 80/10/10 boundaries leave an empty partition");
    }
    return {"ratio", Scheme::ratio, index_range(0, b1), index_range(b1, b2), index_range(b2, n)};
}

std::vector<Split> split_sliding(std::span<const RowRef> rows, std::int64_t period_days) {
    if (period_days <= 0) throw InvalidArgument("period_days must be positive");
    if (rows.empty()) throw TooFewPeriods("no rows to split");
    const std::int64_t period = period_days * kSecondsPerDay;
    const Timestamp t0 = rows.front().time;
    std::int64_t n_periods = 0;
    for (const auto& r : rows) n_periods = std::max(n_periods, (r.time - t0) / period + 1);
    if (n_periods < 2) throw TooFewPeriods("the sliding scheme needs at least 2 periods of " +
                                           std::to_string(period_days) + " days");

    std::vector<Split> splits;
    for (std::int64_t p = 0; p + 1 < n_periods; ++p) {
        const Timestamp next_start = t0 + (p + 1) * period;
        const Timestamp half = next_start + period / 2;
        Split s;
        s.id = "w" + std::to_string(p);
        s.scheme = Scheme::sliding;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto idx = (rows[i].time - t0) / period;
            if (idx == p) {
                s.train.push_back(i);
            } else if (idx == p + 1) {
                (rows[i].time < half ? s.validation : s.test).push_back(i);
            }
        }
        if (s.train.empty() || s.validation.empty() || s.test.empty()) {
            warn("window " + s.id + " skipped: empty " +
                 std::string(s.train.empty() ? "training period" : s.validation.empty() ? "validation half" : "test half"));
            continue;
        }
        splits.push_back(std::move(s));
    }
    return splits;
}

// ---- metrics ---------------------------------------------------------------

ConfusionCounts confusion(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold) {
    if (scores.size() != labels.size()) throw DimensionMismatch("scores and labels differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i]) {
            (predicted ? c.tp : c.fn) += 1;
        } else {
            (predicted ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw DimensionMismatch("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid_rank = (double(i + 1) + double(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]]) {
                positive_rank_sum += mid_rank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw SingleClass("AUC needs at least one positive and one negative");
    const double u = positive_rank_sum - double(n_pos) * double(n_pos + 1) / 2.0;
    return u / (double(n_pos) * double(n_neg));
}

double f1_score(double pre, double rec) {
    if (pre <= 0.0 || rec <= 0.0) return 0.0;
    return 2.0 / (1.0 / pre + 1.0 / rec);
}

ThresholdChoice threshold_f1(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw DimensionMismatch("scores and labels differ in length");
    const std::size_t n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (n_pos == 0 || n_pos == labels.size()) {
        warn("SingleClass: validation labels hold one class; threshold falls back to 0.5");
        const auto m = metrics(scores, labels, 0.5);
        return {0.5, m.f1};
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // F1 = 2tp / (2tp + fp + fn), compared exactly as integer fractions.
    std::uint64_t best_num = 0, best_den = 1;
    double best_t = scores[order.front()];
    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = scores[order[i]];
        while (i < order.size() && scores[order[i]] == t) {
            (labels[order[i]] ? tp : fp) += 1;
            ++i;
        }
        const std::uint64_t num = 2 * tp;
        const std::uint64_t den = 2 * tp + fp + (n_pos - tp);
        // Descending sweep: >= keeps the smallest threshold among equal maxima.
        if (num * best_den >= best_num * den) {
            best_num = num;
            best_den = den;
            best_t = t;
        }
    }
    return {best_t, double(best_num) / double(best_den)};
}

Metrics metrics(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold) {
    Metrics m;
    m.counts = confusion(scores, labels, threshold);
    const auto& c = m.counts;
    m.pre = (c.tp + c.fp) == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fp);
    m.rec = (c.tp + c.fn) == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fn);
    m.f1 = f1_score(m.pre, m.rec);
    m.gm = std::sqrt(m.pre * m.rec);
    const bool two_classes = (c.tp + c.fn) > 0 && (c.fp + c.tn) > 0;
    m.auc = two_classes ? auc(scores, labels) : std::numeric_limits<double>::quiet_NaN();
    return m;
}

// ---- reports ---------------------------------------------------------------

namespace {

json number_or_null(double v) {
    return std::isnan(v) ? json(nullptr) : json(v);
}

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace

json EvaluationReport::to_json() const {
    return {{"dataset", dataset},
            {"label", to_string(label)},
            {"spec", spec},
            {"variant", to_string(variant)},
            {"seed", seed},
            {"window", window},
            {"auc", number_or_null(auc)},
            {"f1", number_or_null(f1)},
            {"gm", number_or_null(gm)},
            {"pre", number_or_null(pre)},
            {"rec", number_or_null(rec)},
            {"threshold", threshold},
            {"val_f1", val_f1},
            {"n_train", n_train},
            {"n_validation", n_validation},
            {"n_test", n_test}};
}

EvaluationReport EvaluationReport::from_json(const json& j) {
    EvaluationReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.label = parse_label(j.at("label").get<std::string>());
    r.spec = j.at("spec").get<std::string>();
    r.variant = parse_variant(j.at("variant").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.window = j.at("window").get<std::string>();
    r.auc = number_from(j.at("auc"));
    r.f1 = number_from(j.at("f1"));
    r.gm = number_from(j.at("gm"));
    r.pre = number_from(j.at("pre"));
    r.rec = number_from(j.at("rec"));
    r.threshold = j.at("threshold").get<double>();
    r.val_f1 = j.at("val_f1").get<double>();
    r.n_train = j.value("n_train", std::size_t{0});
    r.n_validation = j.value("n_validation", std::size_t{0});
    r.n_test = j.value("n_test", std::size_t{0});
    return r;
}

std::string report_csv_row(const EvaluationReport& r) {
    std::string out;
    for (const auto& field : {csv_field(r.dataset), std::string(to_string(r.label)), csv_field(r.spec),
                              std::string(to_string(r.variant)), std::to_string(r.seed), csv_field(r.window),
                              format_double(r.auc), format_double(r.f1), format_double(r.gm), format_double(r.pre),
                              format_double(r.rec), format_double(r.threshold), format_double(r.val_f1),
                              std::to_string(r.n_train), std::to_string(r.n_validation), std::to_string(r.n_test)}) {
        if (!out.empty()) out += ',';
        out += field;
    }
    return out;
}

std::vector<EvaluationReport> parse_reports_jsonl(std::istream& in) {
    std::vector<EvaluationReport> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(line_no, "<json>", e.what());
        }
        if (j.contains("_meta")) continue;
        try {
            out.push_back(EvaluationReport::from_json(j));
        } catch (const json::exception& e) {
            throw SchemaError(line_no, "<report>", e.what());
        }
    }
    return out;
}

// ---- experiments -----------------------------------------------------------

std::vector<std::uint8_t> label_vector(const LabelTable& labels, const std::vector<FileKey>& keys, Label label) {
    std::vector<std::uint8_t> y;
    y.reserve(keys.size());
    for (const auto& k : keys) y.push_back(labels.at(k).get(label) ? 1 : 0);
    return y;
}

namespace {

std::vector<FileKey> keys_of(std::span<const RowRef> rows, const std::vector<std::size_t>& idx) {
    std::vector<FileKey> keys;
    keys.reserve(idx.size());
    for (auto i : idx) keys.push_back(rows[i].key);
    return keys;
}

bool single_class(const std::vector<std::uint8_t>& y) {
    return std::all_of(y.begin(), y.end(), [&](std::uint8_t v) { return v == y.front(); });
}

} // namespace

std::vector<EvaluationReport> run_experiment(const Corpus& corpus, const LabelTable& labels,
                                             const FeatureMatrix& features, const ExperimentConfig& config) {
    if (config.seeds.empty()) throw InvalidArgument("at least one seed is required");
    const auto rows = corpus_rows(corpus);
    std::vector<Split> splits;
    if (config.scheme == Scheme::ratio) {
        splits.push_back(split_ratio(rows));
    } else {
        splits = split_sliding(rows, config.period_days);
    }

    std::vector<EvaluationReport> reports;
    for (const auto& split : splits) {
        const auto train_keys = keys_of(rows, split.train);
        const auto val_keys = keys_of(rows, split.validation);
        const auto test_keys = keys_of(rows, split.test);
        const auto y_train = label_vector(labels, train_keys, config.label);
        const auto y_val = label_vector(labels, val_keys, config.label);
        const auto y_test = label_vector(labels, test_keys, config.label);
        if (single_class(y_train)) {
            warn("split " + split.id + " skipped: training labels hold a single class");
            continue;
        }

        const auto embedder = Embedder::fit(config.spec, corpus, train_keys);
        const auto x_train = embedder.transform(corpus, train_keys, &features, config.external, config.exec);
        const auto x_val = embedder.transform(corpus, val_keys, &features, config.external, config.exec);
        const auto x_test = embedder.transform(corpus, test_keys, &features, config.external, config.exec);

        std::vector<std::uint64_t> seeds = config.seeds;
        if (config.scheme == Scheme::sliding) seeds.resize(1);

        for (auto variant : config.variants) {
            for (auto seed : seeds) {
                TrainingSet set{&x_train.data, y_train, x_train.columns, seed};
                const auto model = train(set, variant, config.hyper, config.exec);
                const auto val_scores = predict_proba(model, x_val.data, x_val.columns, config.exec);
                const auto choice = threshold_f1(val_scores, y_val);
                const auto test_scores = predict_proba(model, x_test.data, x_test.columns, config.exec);
                const auto m = metrics(test_scores, y_test, choice.threshold);

                EvaluationReport r;
                r.dataset = config.dataset;
                r.label = config.label;
                r.spec = config.spec.to_string();
                r.variant = variant;
                r.seed = seed;
                r.window = split.id;
                r.auc = m.auc;
                r.f1 = m.f1;
                r.gm = m.gm;
                r.pre = m.pre;
                r.rec = m.rec;
                r.threshold = choice.threshold;
                r.val_f1 = choice.f1;
                r.n_train = train_keys.size();
                r.n_validation = val_keys.size();
                r.n_test = test_keys.size();
                reports.push_back(std::move(r));
            }
        }
    }
    return reports;
}

Selection select_model(std::span<const EvaluationReport> reports) {
    if (reports.empty()) throw InvalidArgument("no reports to select from");
    std::map<Variant, std::vector<const EvaluationReport*>> by_variant;
    for (const auto& r : reports) by_variant[r.variant].push_back(&r);

    Selection sel;
    std::map<Variant, const EvaluationReport*> median_run;
    for (auto& [variant, runs] : by_variant) {
        auto sorted = runs;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const EvaluationReport* a, const EvaluationReport* b) { return a->val_f1 < b->val_f1; });
        const auto* mid = sorted[(sorted.size() - 1) / 2];
        sel.median_val_f1[variant] = mid->val_f1;
        median_run[variant] = mid;
    }
    bool chosen = false;
    for (auto v : kAllVariants) {
        auto it = sel.median_val_f1.find(v);
        if (it == sel.median_val_f1.end()) continue;
        if (!chosen || it->second > sel.median_val_f1[sel.variant]) {
            sel.variant = v;
            chosen = true;
        }
    }
    sel.representative = *median_run[sel.variant];
    for (const auto* r : by_variant[sel.variant]) sel.runs.push_back(*r);
    return sel;
}

} // namespace radar

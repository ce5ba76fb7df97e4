#include "radar/stats.hpp"
#include "radar/diagnostics.hpp"
#include "radar/error.hpp"
#include "radar/format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace radar {

const char* to_string(WilcoxonMethod method) {
    switch (method) {
    case WilcoxonMethod::exact: return "exact";
    case WilcoxonMethod::normal: return "normal";
    case WilcoxonMethod::degenerate: return "degenerate";
    }
    return "?";
}

WilcoxonResult wilcoxon_paired(std::span<const double> x, std::span<const double> y, std::size_t exact_max_n) {
    if (x.size() != y.size()) throw DimensionMismatch("paired samples differ in length");

    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != y[i]) d.push_back(x[i] - y[i]);
    }
    WilcoxonResult result;
    result.n = d.size();
    if (d.empty()) {
        warn("AllZeroDifferences: paired samples are identical; p = 1");
        result.method = WilcoxonMethod::degenerate;
        return result;
    }

    // Ranks are kept doubled so tied averages stay integral.
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
    std::vector<std::uint64_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
        const std::uint64_t r2 = (i + 1) + (j + 1); // 2 * average rank
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
        const double t = double(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    std::uint64_t w2 = 0, total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (d[i] > 0) w2 += rank2[i];
    }
    result.w_plus = double(w2) / 2.0;

    if (n <= exact_max_n) {
        result.method = WilcoxonMethod::exact;
        // counts[s]: number of sign patterns whose doubled positive-rank sum is s.
        std::vector<double> counts(total2 + 1, 0.0);
        counts[0] = 1.0;
        std::uint64_t reach = 0;
        for (auto r : rank2) {
            for (std::uint64_t s = reach + 1; s-- > 0;) {
                if (counts[s] != 0.0) counts[s + r] += counts[s];
            }
            reach += r;
        }
        const double patterns = std::ldexp(1.0, static_cast<int>(n));
        double lower = 0.0, upper = 0.0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            if (s <= w2) lower += counts[s];
            if (s >= w2) upper += counts[s];
        }
        result.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
        return result;
    }

    result.method = WilcoxonMethod::normal;
    const double nn = double(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    const double z = std::max(0.0, std::fabs(result.w_plus - mean) - 0.5) / std::sqrt(var);
    result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

const char* to_string(EffectMagnitude magnitude) {
    switch (magnitude) {
    case EffectMagnitude::negligible: return "negligible";
    case EffectMagnitude::small: return "small";
    case EffectMagnitude::medium: return "medium";
    case EffectMagnitude::large: return "large";
    }
    return "?";
}

EffectMagnitude effect_magnitude(double delta) {
    const double a = std::fabs(delta);
    if (a < 0.147) return EffectMagnitude::negligible;
    if (a < 0.33) return EffectMagnitude::small;
    if (a < 0.474) return EffectMagnitude::medium;
    return EffectMagnitude::large;
}

CliffsDelta cliffs_delta(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw InvalidArgument("Cliff's delta needs two non-empty samples");
    std::vector<double> ys(y.begin(), y.end());
    std::sort(ys.begin(), ys.end());
    long long dominance = 0;
    for (double v : x) {
        const auto below = std::lower_bound(ys.begin(), ys.end(), v) - ys.begin();
        const auto above = ys.end() - std::upper_bound(ys.begin(), ys.end(), v);
        dominance += below - above;
    }
    CliffsDelta out;
    out.delta = double(dominance) / (double(x.size()) * double(y.size()));
    out.magnitude = effect_magnitude(out.delta);
    return out;
}

const char* to_string(Grouping grouping) {
    switch (grouping) {
    case Grouping::open: return "open";
    case Grouping::closed: return "closed";
    case Grouping::all: return "all";
    }
    return "?";
}

Grouping parse_grouping(std::string_view name) {
    if (name == "open") return Grouping::open;
    if (name == "closed") return Grouping::closed;
    if (name == "all") return Grouping::all;
    throw InvalidArgument("unknown grouping '" + std::string(name) + "' (expected open|closed|all)");
}

double report_metric(const EvaluationReport& r, std::string_view metric) {
    if (metric == "auc") return r.auc;
    if (metric == "f1") return r.f1;
    if (metric == "gm") return r.gm;
    if (metric == "pre") return r.pre;
    if (metric == "rec") return r.rec;
    throw InvalidArgument("unknown metric '" + std::string(metric) + "' (expected auc|f1|gm|pre|rec)");
}

namespace {

struct RunKey {
    std::uint64_t seed;
    std::string window;

    bool operator<(const RunKey& o) const {
        if (window != o.window) {
            // "w2" < "w10": order windows numerically when both carry an index.
            auto num = [](const std::string& w) -> long long {
                if (w.size() > 1 && w[0] == 'w') {
                    try {
                        return std::stoll(w.substr(1));
                    } catch (...) {
                    }
                }
                return -1;
            };
            const auto a = num(window), b = num(o.window);
            if (a != b && a >= 0 && b >= 0) return a < b;
            return window < o.window;
        }
        return seed < o.seed;
    }
};

std::map<std::string, std::vector<const EvaluationReport*>> selected_runs(std::span<const EvaluationReport> reports,
                                                                          Grouping grouping, Label label,
                                                                          const std::map<std::string, Grouping>& groups) {
    std::map<std::string, std::vector<EvaluationReport>> by_dataset;
    for (const auto& r : reports) {
        if (r.label != label) continue;
        auto it = groups.find(r.dataset);
        const Grouping g = it == groups.end() ? Grouping::open : it->second;
        if (grouping != Grouping::all && g != grouping) continue;
        by_dataset[r.dataset].push_back(r);
    }
    std::map<std::string, std::vector<const EvaluationReport*>> out;
    for (auto& [dataset, runs] : by_dataset) {
        const auto chosen = select_model(runs).variant;
        auto& list = out[dataset];
        for (const auto& r : reports) {
            if (r.dataset == dataset && r.label == label && r.variant == chosen) list.push_back(&r);
        }
        std::stable_sort(list.begin(), list.end(), [](const EvaluationReport* a, const EvaluationReport* b) {
            return RunKey{a->seed, a->window} < RunKey{b->seed, b->window};
        });
    }
    return out;
}

} // namespace

PairedSample build_paired_vectors(std::span<const EvaluationReport> setup_a, std::span<const EvaluationReport> setup_b,
                                  Grouping grouping, Label label, std::string_view metric,
                                  const std::map<std::string, Grouping>& dataset_groups) {
    const auto runs_a = selected_runs(setup_a, grouping, label, dataset_groups);
    const auto runs_b = selected_runs(setup_b, grouping, label, dataset_groups);

    std::set<std::string> names_a, names_b;
    for (const auto& [k, v] : runs_a) names_a.insert(k);
    for (const auto& [k, v] : runs_b) names_b.insert(k);
    if (names_a != names_b) throw MisalignedRuns("the two setups cover different datasets");
    if (names_a.empty()) throw MisalignedRuns("no runs for this grouping and label");

    PairedSample sample;
    sample.grouping = grouping;
    sample.metric = std::string(metric);
    sample.label = to_string(label);
    for (const auto& dataset : names_a) {
        const auto& a = runs_a.at(dataset);
        const auto& b = runs_b.at(dataset);
        if (a.size() != b.size()) {
            throw MisalignedRuns("dataset " + dataset + " has " + std::to_string(a.size()) + " runs in one setup and " +
                                 std::to_string(b.size()) + " in the other");
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i]->seed != b[i]->seed || a[i]->window != b[i]->window) {
                throw MisalignedRuns("dataset " + dataset + ": run " + std::to_string(i) + " differs in seed/window");
            }
            sample.x.push_back(report_metric(*a[i], metric));
            sample.y.push_back(report_metric(*b[i], metric));
            sample.run_ids.push_back(dataset + "/" + (a[i]->window.empty() ? "" : a[i]->window + ":") +
                                     std::to_string(a[i]->seed));
        }
    }
    return sample;
}

Comparison compare_setups(const PairedSample& sample, std::string setup_a, std::string setup_b, double alpha,
                          std::size_t exact_max_n) {
    Comparison c;
    c.setup_a = std::move(setup_a);
    c.setup_b = std::move(setup_b);
    c.grouping = sample.grouping;
    c.label = sample.label;
    c.metric = sample.metric;
    c.n_pairs = sample.x.size();
    c.test = wilcoxon_paired(sample.x, sample.y, exact_max_n);
    c.significant = c.test.p_value < alpha;
    c.effect = cliffs_delta(sample.x, sample.y);
    return c;
}

std::string comparison_csv_row(const Comparison& c) {
    std::string out;
    for (const auto& field :
         {csv_field(c.setup_a), csv_field(c.setup_b), std::string(to_string(c.grouping)), c.label, c.metric,
          std::to_string(c.n_pairs), format_double(c.test.p_value), std::string(to_string(c.test.method)),
          std::string(c.significant ? "true" : "false"), format_double(c.effect.delta),
          std::string(to_string(c.effect.magnitude))}) {
        if (!out.empty()) out += ',';
        out += field;
    }
    return out;
}

} // namespace radar

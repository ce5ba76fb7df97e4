#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "radar/diagnostics.hpp"
#include "radar/error.hpp"
#include "radar/rng.hpp"
#include "radar/stats.hpp"

using namespace radar;

namespace {

EvaluationReport run(const std::string& dataset, const std::string& spec, Variant v, std::uint64_t seed, double f1,
                     const std::string& window = "ratio") {
    EvaluationReport r;
    r.dataset = dataset;
    r.spec = spec;
    r.variant = v;
    r.seed = seed;
    r.window = window;
    r.f1 = f1;
    r.val_f1 = f1;
    return r;
}

} // namespace

TEST_CASE("wilcoxon: identical samples") {
    WarningCapture capture;
    const std::vector<double> x{1, 2, 3};
    const auto r = wilcoxon_paired(x, x);
    CHECK(r.p_value == 1.0);
    CHECK(r.method == WilcoxonMethod::degenerate);
    CHECK(capture.contains("AllZeroDifferences"));
}

TEST_CASE("wilcoxon: small exact cases") {
    CHECK(wilcoxon_paired(std::vector<double>{1, 0}, std::vector<double>{0, 1}).p_value == 1.0);
    std::vector<double> x(10), y(10, 0.0);
    for (int i = 0; i < 10; ++i) x[i] = i + 1;
    const auto r = wilcoxon_paired(x, y);
    CHECK(r.method == WilcoxonMethod::exact);
    CHECK(r.p_value == doctest::Approx(2.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("wilcoxon: exact p equals sign-pattern enumeration") {
    Rng rng(17);
    for (int it = 0; it < 400; ++it) {
        const auto n = 1 + rng.below(12);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = double(rng.below(7));
            y[i] = double(rng.below(7));
        }
        const auto r = wilcoxon_paired(x, y);
        CHECK(std::fabs(r.p_value - oracle::wilcoxon_enumerated(x, y)) < 1e-12);
        CHECK(r.p_value == wilcoxon_paired(y, x).p_value);
    }
}

TEST_CASE("wilcoxon: normal approximation beyond the switchover") {
    Rng rng(3);
    std::vector<double> x(40), y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        x[i] = rng.uniform() + 0.3;
        y[i] = rng.uniform();
    }
    const auto r = wilcoxon_paired(x, y);
    CHECK(r.method == WilcoxonMethod::normal);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value < 0.05);
    CHECK(r.p_value == doctest::Approx(wilcoxon_paired(y, x).p_value));
    // Near the switchover the two methods agree roughly.
    std::vector<double> a(25), b(25, 0.0);
    for (std::size_t i = 0; i < 25; ++i) a[i] = (i % 3 == 0 ? -1.0 : 1.0) * double(i + 1);
    const auto exact = wilcoxon_paired(a, b, 25);
    const auto approx = wilcoxon_paired(a, b, 0);
    CHECK(exact.method == WilcoxonMethod::exact);
    CHECK(approx.method == WilcoxonMethod::normal);
    CHECK(std::fabs(exact.p_value - approx.p_value) < 0.02);
}

TEST_CASE("cliff's delta") {
    const std::vector<double> same{1, 1, 1};
    CHECK(cliffs_delta(same, same).delta == 0.0);
    CHECK(cliffs_delta(same, same).magnitude == EffectMagnitude::negligible);
    const auto dom = cliffs_delta(std::vector<double>{4, 5}, std::vector<double>{1, 2});
    CHECK(dom.delta == 1.0);
    CHECK(dom.magnitude == EffectMagnitude::large);
    CHECK(cliffs_delta(std::vector<double>{1, 3}, std::vector<double>{2, 2}).delta == 0.0);
}

TEST_CASE("cliff's delta equals pair enumeration") {
    Rng rng(9);
    for (int it = 0; it < 300; ++it) {
        std::vector<double> x(1 + rng.below(40)), y(1 + rng.below(40));
        for (auto& v : x) v = double(rng.below(10));
        for (auto& v : y) v = double(rng.below(10));
        const double d = cliffs_delta(x, y).delta;
        CHECK(std::fabs(d - oracle::cliffs_pairs(x, y)) < 1e-12);
        CHECK(d == -cliffs_delta(y, x).delta);
        CHECK(d >= -1.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("effect bands") {
    CHECK(effect_magnitude(0.1) == EffectMagnitude::negligible);
    CHECK(effect_magnitude(-0.2) == EffectMagnitude::small);
    CHECK(effect_magnitude(0.4) == EffectMagnitude::medium);
    CHECK(effect_magnitude(-0.5) == EffectMagnitude::large);
}

TEST_CASE("paired vectors across datasets") {
    std::vector<EvaluationReport> a, b;
    for (const auto* d : {"d1", "d2", "d3"}) {
        for (std::uint64_t s = 1; s <= 5; ++s) {
            a.push_back(run(d, "A", Variant::rf, s, 0.1 * double(s)));
            b.push_back(run(d, "B", Variant::nb, s, 0.05 * double(s)));
        }
    }
    const auto sample = build_paired_vectors(a, b, Grouping::all, Label::hot_spot, "f1");
    CHECK(sample.x.size() == 15);
    CHECK(sample.y.size() == 15);
    CHECK(sample.run_ids.front() == "d1/ratio:1");
    const auto again = build_paired_vectors(a, b, Grouping::all, Label::hot_spot, "f1");
    CHECK(again.run_ids == sample.run_ids);

    const std::map<std::string, Grouping> groups{{"d3", Grouping::closed}};
    CHECK(build_paired_vectors(a, b, Grouping::closed, Label::hot_spot, "f1", groups).x.size() == 5);
    CHECK(build_paired_vectors(a, b, Grouping::open, Label::hot_spot, "f1", groups).x.size() == 10);

    const auto c = compare_setups(sample, "A", "B");
    CHECK(c.n_pairs == 15);
    CHECK(c.effect.delta > 0);
    const auto row = comparison_csv_row(c);
    CHECK(row.rfind("A,B,all,hot_spot,f1,15,", 0) == 0);

    b.pop_back();
    CHECK_THROWS_AS(build_paired_vectors(a, b, Grouping::all, Label::hot_spot, "f1"), MisalignedRuns);
}

TEST_CASE("only the selected variant enters the pairing") {
    std::vector<EvaluationReport> a, b;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        a.push_back(run("d", "A", Variant::rf, s, 0.2));
        a.push_back(run("d", "A", Variant::nbs, s, 0.9));
        b.push_back(run("d", "B", Variant::rf, s, 0.3));
    }
    const auto sample = build_paired_vectors(a, b, Grouping::all, Label::hot_spot, "f1");
    CHECK(sample.x == std::vector<double>(5, 0.9));
}

TEST_CASE("sliding runs pair by window") {
    std::vector<EvaluationReport> a, b;
    for (const auto* w : {"w10", "w2", "w1"}) {
        a.push_back(run("d", "A", Variant::rf, 1, 0.5, w));
        b.push_back(run("d", "B", Variant::rf, 1, 0.4, w));
    }
    const auto sample = build_paired_vectors(a, b, Grouping::all, Label::hot_spot, "f1");
    CHECK(sample.run_ids == std::vector<std::string>{"d/w1:1", "d/w2:1", "d/w10:1"});
}

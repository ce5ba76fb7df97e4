#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "radar/error.hpp"
#include "radar/ordering.hpp"
#include "radar/rng.hpp"
#include "support/random_corpus.hpp"

using namespace radar;

namespace {

std::vector<OrderInput> inputs(const std::vector<std::string>& paths, const std::vector<double>& scores,
                               const std::set<std::string>& hot = {}) {
    std::vector<OrderInput> out;
    for (std::size_t i = 0; i < paths.size(); ++i)
        out.push_back({paths[i], i < scores.size() ? std::optional<double>(scores[i]) : std::nullopt,
                       hot.count(paths[i]) > 0});
    return out;
}

using Paths = std::vector<std::string>;

} // namespace

TEST_CASE("policies") {
    CHECK(order_files(inputs({"a", "b"}, {0.2, 0.9}), OrderPolicy::predicted) == Paths{"b", "a"});
    CHECK(order_files(inputs({"z.c", "a.h", "src/x"}, {}), OrderPolicy::alphanumeric) == Paths{"a.h", "src/x", "z.c"});
    CHECK(order_files(inputs({"B", "a"}, {}), OrderPolicy::alphanumeric) == Paths{"B", "a"});
    CHECK(order_files(inputs({"c", "a", "b"}, {0.5, 0.5, 0.5}), OrderPolicy::predicted) == Paths{"a", "b", "c"});
    CHECK(order_files(inputs({"d", "c", "b", "a"}, {}, {"d", "b"}), OrderPolicy::oracle) == Paths{"b", "d", "a", "c"});
    CHECK_THROWS_AS(order_files(inputs({"a", "b"}, {0.1}), OrderPolicy::predicted), MissingScore);

    const auto files = inputs({"a", "b", "c", "d", "e"}, {});
    const auto r1 = order_files(files, OrderPolicy::random, 4);
    CHECK(r1 == order_files(files, OrderPolicy::random, 4));
    CHECK(std::is_permutation(r1.begin(), r1.end(), Paths{"a", "b", "c", "d", "e"}.begin()));
}

TEST_CASE("recall at k") {
    CHECK(cutoff_k(4, 0.5) == 2);
    CHECK(cutoff_k(2, 0.25) == 1);
    CHECK(cutoff_k(5, 0.5) == 3);
    CHECK(recall_at(Paths{"a", "b", "c", "d"}, {"a", "b"}, 0.5) == 1.0);
    CHECK(recall_at(Paths{"a", "b", "c", "d"}, {"a", "b", "c"}, 0.5) == 1.0);
    CHECK(recall_at(Paths{"a", "b", "c", "d"}, {"c", "d"}, 0.5) == 0.0);
    CHECK(recall_at(Paths{"a", "b", "c", "d"}, {"a", "d"}, 0.5) == 0.5);
    CHECK_THROWS_AS(recall_at(Paths{"a"}, {"a"}, 0.5), IneligiblePatch);
    CHECK_THROWS_AS(recall_at(Paths{"a", "b"}, {}, 0.5), IneligiblePatch);
}

TEST_CASE("monotonicity of the predicted policy") {
    Rng rng(2);
    for (int it = 0; it < 300; ++it) {
        const auto n = 2 + rng.below(12);
        Paths paths;
        std::vector<double> scores;
        std::set<std::string> hot;
        for (std::size_t i = 0; i < n; ++i) {
            paths.push_back("f" + std::to_string(i));
            scores.push_back(double(rng.below(10)) / 10.0);
            if (rng.below(3) == 0) hot.insert(paths.back());
        }
        hot.insert(paths[rng.below(n)]);
        const auto before = order_files(inputs(paths, scores, hot), OrderPolicy::predicted);
        auto improved = scores;
        const auto& target = *std::next(hot.begin(), long(rng.below(hot.size())));
        const auto idx = std::size_t(std::stoi(target.substr(1)));
        improved[idx] += 0.05 + rng.uniform();
        const auto after = order_files(inputs(paths, improved, hot), OrderPolicy::predicted);
        for (double f : {0.5, 0.25}) CHECK(recall_at(after, hot, f) >= recall_at(before, hot, f));
        CHECK(recall_at(order_files(inputs(paths, scores, hot), OrderPolicy::oracle), hot, 0.5) == 1.0);
    }
}

TEST_CASE("random policy matches the hypergeometric expectation") {
    const std::size_t n = 9, h = 3;
    std::vector<OrderInput> files;
    std::set<std::string> hot;
    for (std::size_t i = 0; i < n; ++i) {
        files.push_back({"f" + std::to_string(i), std::nullopt, i < h});
        if (i < h) hot.insert(files.back().path);
    }
    double sum = 0;
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) sum += recall_at(order_files(files, OrderPolicy::random, d), hot, 0.5);
    CHECK(std::fabs(sum / draws - oracle::random_recall_expectation(n, h, cutoff_k(n, 0.5))) < 0.02);
}

TEST_CASE("buckets") {
    CHECK_FALSE(bucket_of(1).has_value());
    CHECK(bucket_of(2) == SizeBucket::two_to_four);
    CHECK(bucket_of(4) == SizeBucket::two_to_four);
    CHECK(bucket_of(5) == SizeBucket::five_to_nine);
    CHECK(bucket_of(9) == SizeBucket::five_to_nine);
    CHECK(bucket_of(10) == SizeBucket::ten_plus);
}

TEST_CASE("report over a corpus") {
    const auto corpus = testing::ordering_corpus(5, 60);
    const auto labels = label_all(corpus);
    ScoreMap oracle_scores;
    for (const auto& row : labels.rows()) oracle_scores[row.key] = row.labels.hot_spot ? 1.0 : 0.0;

    std::vector<PatchOrdering> orderings;
    const auto report = ordering_report(corpus, labels, oracle_scores, 1, &orderings);
    CHECK(report.patches_considered == 60);
    double fraction_sum = 0;
    for (const auto& b : report.buckets) {
        REQUIRE(b.patches > 0);
        fraction_sum += b.patch_fraction;
        CHECK(b.recall50.at(OrderPolicy::oracle) == 1.0);
        CHECK(b.recall50.at(OrderPolicy::predicted) == b.recall50.at(OrderPolicy::oracle));
        CHECK(b.recall25.at(OrderPolicy::predicted) == b.recall25.at(OrderPolicy::oracle));
        for (auto p : kAllPolicies) {
            CHECK(b.recall50.at(p) >= 0.0);
            CHECK(b.recall50.at(p) <= 1.0);
        }
    }
    CHECK(fraction_sum <= 1.0 + 1e-12);
    CHECK(orderings.size() == report.eligible_patches);

    const auto csv = ordering_report_csv(report);
    CHECK(csv.find("2-4") != std::string::npos);

    ScoreMap partial = oracle_scores;
    partial.erase(partial.begin());
    CHECK(ordering_report(corpus, labels, partial).patches_considered == 59);
}

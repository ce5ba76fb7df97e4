#include <doctest.h>

#include <atomic>
#include <stdexcept>

#include "radar/embedding.hpp"
#include "radar/labeling.hpp"
#include "radar/learning.hpp"
#include "radar/parallel.hpp"
#include "radar/rng.hpp"
#include "support/random_corpus.hpp"

using namespace radar;

// The serial kernels are the reference for the OpenMP ones.

TEST_CASE("parallel_for visits every index once and rethrows") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(Exec::parallel, hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(Exec::parallel, 100,
                                 [](std::size_t i) {
                                     if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("labels") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto corpus = testing::random_corpus(seed);
        const auto a = label_all(corpus, {}, Exec::serial);
        const auto b = label_all(corpus, {}, Exec::parallel);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.rows()[i].key == b.rows()[i].key);
            CHECK(a.rows()[i].labels == b.rows()[i].labels);
        }
    }
}

TEST_CASE("bag-of-words transform") {
    const auto corpus = testing::random_corpus(77);
    std::vector<Document> docs;
    for (const auto& p : corpus)
        for (const auto& f : p.initial().files) docs.push_back(file_document(f, Stream::add));
    const auto vocab = Vocabulary::fit(docs);
    CHECK(transform_all(vocab, docs, Exec::serial) == transform_all(vocab, docs, Exec::parallel));
}

TEST_CASE("forest fitting and scoring") {
    Rng rng(5);
    SparseMatrix x(6);
    std::vector<std::uint8_t> y;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> row(6);
        for (auto& v : row) v = rng.below(3) == 0 ? 0.0 : rng.uniform();
        x.append_dense_row(row);
        y.push_back(row[0] + row[1] > 0.8);
    }
    Hyperparameters h;
    h.n_trees = 40;
    const auto serial = fit_random_forest(x, y, h, 3, Exec::serial);
    const auto parallel = fit_random_forest(x, y, h, 3, Exec::parallel);
    CHECK(serial == parallel);

    std::vector<std::string> cols{"a", "b", "c", "d", "e", "f"};
    for (auto v : kAllVariants) {
        const auto m = train({&x, y, cols, 8}, v, h, Exec::parallel);
        CHECK(predict_proba(m, x, Exec::serial) == predict_proba(m, x, Exec::parallel));
        CHECK(train({&x, y, cols, 8}, v, h, Exec::serial).to_json() == m.to_json());
    }
}

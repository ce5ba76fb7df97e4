// Serial against OpenMP timings for the kernels that have both paths.
// Run with --benchmark_filter=<name> to pick one.

#include <benchmark/benchmark.h>

#include "radar/embedding.hpp"
#include "radar/labeling.hpp"
#include "radar/learning.hpp"
#include "radar/rng.hpp"
#include "support/random_corpus.hpp"

using namespace radar;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

const Corpus& bench_corpus() {
    static const Corpus corpus = [] {
        testing::RandomCorpusOptions o;
        o.min_patches = 2000;
        o.max_patches = 2000;
        o.max_lines = 40;
        return testing::random_corpus(99, o);
    }();
    return corpus;
}

struct Dataset {
    SparseMatrix x{20};
    std::vector<std::uint8_t> y;
};

const Dataset& bench_data() {
    static const Dataset data = [] {
        Dataset d;
        Rng rng(3);
        for (int i = 0; i < 5000; ++i) {
            std::vector<double> row(20);
            for (auto& v : row) v = rng.below(3) == 0 ? 0.0 : rng.uniform();
            d.x.append_dense_row(row);
            d.y.push_back(row[0] + row[1] * row[2] > 0.6);
        }
        return d;
    }();
    return data;
}

void BM_label_all(benchmark::State& state) {
    const auto& corpus = bench_corpus();
    for (auto _ : state) benchmark::DoNotOptimize(label_all(corpus, {}, exec_of(state)));
}

void BM_bow_transform(benchmark::State& state) {
    std::vector<Document> docs;
    for (const auto& p : bench_corpus())
        for (const auto& f : p.initial().files) docs.push_back(file_document(f, Stream::add));
    const auto vocab = Vocabulary::fit(docs);
    for (auto _ : state) benchmark::DoNotOptimize(transform_all(vocab, docs, exec_of(state)));
}

void BM_forest_fit(benchmark::State& state) {
    const auto& d = bench_data();
    Hyperparameters h;
    h.n_trees = 50;
    for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(d.x, d.y, h, 1, exec_of(state)));
}

void BM_forest_predict(benchmark::State& state) {
    const auto& d = bench_data();
    const std::vector<std::string> cols(20, "c");
    const auto model = train({&d.x, d.y, cols, 1}, Variant::rf);
    for (auto _ : state) benchmark::DoNotOptimize(predict_proba(model, d.x, exec_of(state)));
}

} // namespace

BENCHMARK(BM_label_all)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bow_transform)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_fit)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forest_predict)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

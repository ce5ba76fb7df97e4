#include <doctest.h>

#include <sstream>

#include "radar/diagnostics.hpp"
#include "radar/embedding.hpp"
#include "radar/error.hpp"
#include "support/random_corpus.hpp"

using namespace radar;

namespace {

std::vector<std::string> tokens(const std::string& line) { return preprocess_code(std::vector<std::string>{line}); }

Document doc(const std::string& text) { return tokens(text); }

} // namespace

TEST_CASE("tokenizer") {
    CHECK(tokens("count = 42 + offset") == std::vector<std::string>{"count", "<NUMBER>", "offset"});
    CHECK(tokens("x = y").empty());
    CHECK(tokens("val1 += val1") == std::vector<std::string>{"val1", "val1"});
    CHECK(tokens("a->next_node(7)") == std::vector<std::string>{"next_node", "<NUMBER>"});
    CHECK(tokens("").empty());
}

TEST_CASE("pruning: the four-document example") {
    const std::vector<Document> docs{doc("alpha beta"), doc("alpha gamma"), doc("gamma delta"), doc("gamma epsilon")};
    const auto vocab = Vocabulary::fit(docs);
    CHECK(vocab.tokens() == std::vector<std::string>{"alpha"});
}

TEST_CASE("a single document prunes everything") {
    const std::vector<Document> docs{doc("alpha beta alpha")};
    CHECK(Vocabulary::fit(docs).empty());
}

TEST_CASE("transform counts in-vocabulary tokens only") {
    const std::vector<Document> docs{doc("alpha beta"), doc("alpha gamma"), doc("gamma delta"), doc("gamma epsilon")};
    const auto vocab = Vocabulary::fit(docs);
    auto v = vocab.transform(doc("alpha alpha beta"));
    REQUIRE(v.indices.size() == 1);
    CHECK(v.values[0] == 2.0);
    CHECK(vocab.transform(doc("")).indices.empty());
    CHECK(vocab.transform(doc("beta unseen_token")).indices.empty());
}

TEST_CASE("pruning bounds hold on random corpora") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto corpus = testing::random_corpus(seed);
        std::vector<Document> docs;
        for (const auto& p : corpus)
            for (const auto& f : p.initial().files) docs.push_back(file_document(f, Stream::add));
        const auto vocab = Vocabulary::fit(docs);
        const auto n = docs.size();
        for (std::size_t t = 0; t < vocab.size(); ++t) {
            std::size_t df = 0;
            for (const auto& d : docs)
                if (std::find(d.begin(), d.end(), vocab.tokens()[t]) != d.end()) ++df;
            CHECK(df == vocab.document_frequency()[t]);
            CHECK(df >= 2);
            CHECK(df <= n / 2);
        }
        CHECK(std::is_sorted(vocab.tokens().begin(), vocab.tokens().end()));
    }
}

TEST_CASE("vocabulary json round trip") {
    const std::vector<Document> docs{doc("aa bb"), doc("aa cc"), doc("bb dd"), doc("ee ff")};
    const auto vocab = Vocabulary::fit(docs);
    CHECK(Vocabulary::from_json(vocab.to_json()) == vocab);
}

TEST_CASE("spec grammar") {
    CHECK(parse_spec("bow+add_and_remove+all") == EmbeddingSpec{TextKind::bow, Streams::add_and_remove, FeatureSet::all});
    CHECK(parse_spec("bow+all") == EmbeddingSpec{TextKind::bow, Streams::add_and_remove, FeatureSet::all});
    CHECK(parse_spec("bow+add_only") == EmbeddingSpec{TextKind::bow, Streams::add_only, FeatureSet::none});
    CHECK(parse_spec("add_rem") == EmbeddingSpec{TextKind::none, Streams::add_and_remove, FeatureSet::add_rem});
    CHECK(parse_spec("external") == EmbeddingSpec{TextKind::external, Streams::add_and_remove, FeatureSet::none});
    CHECK(parse_spec("bow+all").to_string() == "bow+add_and_remove+all");
    CHECK_THROWS_AS(parse_spec("none+add_only+none"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("tfidf+all"), InvalidArgument);
    CHECK_THROWS_AS(parse_spec("a+b+c+d"), InvalidArgument);
}

TEST_CASE("external vectors") {
    SUBCASE("dimension mismatch") {
        std::istringstream in(R"({"patch_id":"p","path":"a","stream":"add","vector":[1,2,3,4]})"
                              "\n"
                              R"({"patch_id":"p","path":"b","stream":"add","vector":[1,2,3,4,5]})");
        CHECK_THROWS_AS(parse_external_vectors(in), DimensionMismatch);
    }
    SUBCASE("valid file") {
        std::istringstream in(R"({"patch_id":"p","path":"a","stream":"add","vector":[1,2]})"
                              "\n"
                              R"({"patch_id":"p","path":"a","stream":"remove","vector":[3,4]})"
                              "\n"
                              R"({"patch_id":"p","path":"b","stream":"add","vector":[5,6]})");
        const auto ev = parse_external_vectors(in);
        CHECK(ev.vectors.size() == 3);
        CHECK(ev.dim == 2);
        CHECK(ev.at({"p", "a"}, Stream::remove) == std::vector<double>{3, 4});
        CHECK_THROWS_AS(ev.at({"p", "zz"}, Stream::add), MissingVector);
    }
    SUBCASE("unknown files are ignored with a warning") {
        std::istringstream in(R"({"patch_id":"p","path":"a","stream":"add","vector":[1]})"
                              "\n"
                              R"({"patch_id":"q","path":"gone","stream":"add","vector":[2]})");
        const std::set<FileKey> known{{"p", "a"}};
        WarningCapture capture;
        const auto ev = parse_external_vectors(in, &known);
        CHECK(ev.vectors.size() == 1);
        CHECK_FALSE(capture.messages().empty());
    }
}

TEST_CASE("combined widths") {
    FeatureMatrix features;
    FeatureRow row{{"p", "f"}, {}};
    for (std::size_t i = 0; i < kFeatureCount; ++i) row.values[i] = double(i + 1);
    features.push_back(row);
    const std::vector<FileKey> keys{{"p", "f"}};

    const std::vector<Document> add_docs{doc("a1 b1"), doc("a1 b1"), doc("c1 d1"), doc("c1 d1"), doc("e1 e1x"),
                                         doc("e1 e1x"), doc("f1 g1"), doc("f1 g1"), doc("zz"), doc("yy")};
    const std::vector<Document> rem_docs{doc("r1"), doc("r1"), doc("r2"), doc("r2"), doc("r3"), doc("r3")};
    BowBlocks bow;
    bow.add_vocab = Vocabulary::fit(add_docs);
    bow.rem_vocab = Vocabulary::fit(rem_docs);
    REQUIRE(bow.add_vocab.size() == 8);
    REQUIRE(bow.rem_vocab.size() == 3);
    bow.add_rows = {bow.add_vocab.transform(doc("a1 a1 zz"))};
    bow.rem_rows = {bow.rem_vocab.transform(doc("r3"))};

    const auto add_only = combine({TextKind::bow, Streams::add_only, FeatureSet::none}, keys, &bow, nullptr, nullptr);
    CHECK(add_only.cols() == 8);
    CHECK(add_only.data.at(0, *bow.add_vocab.column("a1")) == 2.0);

    const auto all = combine({TextKind::bow, Streams::add_and_remove, FeatureSet::all}, keys, &bow, nullptr, &features);
    CHECK(all.cols() == 8 + 3 + 37);
    CHECK(all.columns[8 + 3] == "c_add");

    const auto add_rem = combine({TextKind::none, Streams::add_and_remove, FeatureSet::add_rem}, keys, nullptr, nullptr,
                                 &features);
    CHECK(add_rem.cols() == 2);
    CHECK(add_rem.data.dense_row(0) == std::vector<double>{1.0, 2.0});
    CHECK(add_rem.columns == std::vector<std::string>{"c_add", "c_rem"});
}

TEST_CASE("embedder fits on training rows only and round-trips") {
    const auto corpus = testing::random_corpus(5);
    std::vector<FileKey> keys;
    for (const auto& p : corpus)
        for (const auto& f : p.initial().files) keys.push_back({p.patch_id, f.path});
    const std::vector<FileKey> train(keys.begin(), keys.begin() + keys.size() / 2);
    const auto spec = parse_spec("bow+all");
    const auto labels = label_all(corpus);
    const auto features = extract_all(corpus, labels);

    const auto e = Embedder::fit(spec, corpus, train);
    std::vector<Document> train_docs;
    for (const auto& k : train) train_docs.push_back(file_document(find_changed_file(corpus, k), Stream::add));
    CHECK(e.add_vocab() == Vocabulary::fit(train_docs));

    const auto m = e.transform(corpus, keys, &features, nullptr);
    CHECK(m.rows() == keys.size());
    const auto copy = Embedder::from_json(e.to_json());
    const auto m2 = copy.transform(corpus, keys, &features, nullptr);
    CHECK(m2.columns == m.columns);
    for (std::size_t i = 0; i < m.rows(); ++i) CHECK(m2.data.dense_row(i) == m.data.dense_row(i));

    const auto back = EmbeddingMatrix::from_json(m.to_json());
    CHECK(back.columns == m.columns);
    CHECK(back.keys == m.keys);
    for (std::size_t i = 0; i < m.rows(); ++i) CHECK(back.data.dense_row(i) == m.data.dense_row(i));
}

#include "radar/embedding.hpp"
#include "radar/diagnostics.hpp"
#include "radar/error.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

namespace radar {

using nlohmann::json;

namespace {

bool is_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_digit(unsigned char c) {
    return c >= '0' && c <= '9';
}

} // namespace

std::vector<std::string> preprocess_code(std::span<const std::string> lines) {
    std::vector<std::string> tokens;
    for (const auto& line : lines) {
        std::size_t i = 0;
        while (i < line.size()) {
            if (!is_word_char(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            std::size_t j = i;
            bool digits_only = true;
            while (j < line.size() && is_word_char(static_cast<unsigned char>(line[j]))) {
                digits_only = digits_only && is_digit(static_cast<unsigned char>(line[j]));
                ++j;
            }
            if (digits_only) {
                tokens.emplace_back(kNumberToken);
            } else if (j - i >= 2) {
                tokens.emplace_back(line.substr(i, j - i));
            }
            i = j;
        }
    }
    return tokens;
}

const char* to_string(Stream stream) {
    return stream == Stream::add ? "add" : "remove";
}

std::vector<std::string> file_document(const ChangedFile& file, Stream stream) {
    std::vector<std::string> tokens;
    for (const auto& h : file.hunks) {
        auto part = preprocess_code(stream == Stream::add ? h.added : h.removed);
        tokens.insert(tokens.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return tokens;
}

// ---- vocabulary ------------------------------------------------------------

Vocabulary Vocabulary::fit(std::span<const Document> documents) {
    std::map<std::string, std::size_t, std::less<>> df;
    for (const auto& doc : documents) {
        std::vector<std::string_view> unique(doc.begin(), doc.end());
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (auto t : unique) {
            auto it = df.find(t);
            if (it == df.end()) {
                df.emplace(std::string(t), 1);
            } else {
                ++it->second;
            }
        }
    }

    Vocabulary v;
    v.fit_docs_ = documents.size();
    const std::size_t max_df = documents.size() / 2; // floor(0.5 * N)
    for (auto& [token, count] : df) {
        if (count < 2 || count > max_df) continue;
        v.tokens_.push_back(token);
        v.df_.push_back(count);
    }
    v.rebuild_index();
    return v;
}

void Vocabulary::rebuild_index() {
    column_.clear();
    for (std::size_t i = 0; i < tokens_.size(); ++i) column_.emplace(tokens_[i], i);
}

std::optional<std::size_t> Vocabulary::column(std::string_view token) const {
    auto it = column_.find(token);
    if (it == column_.end()) return std::nullopt;
    return it->second;
}

SparseVector Vocabulary::transform(const Document& document) const {
    std::map<std::uint32_t, double> counts;
    for (const auto& token : document) {
        if (auto c = column(token)) counts[static_cast<std::uint32_t>(*c)] += 1.0;
    }
    SparseVector out;
    out.indices.reserve(counts.size());
    out.values.reserve(counts.size());
    for (auto [idx, n] : counts) {
        out.indices.push_back(idx);
        out.values.push_back(n);
    }
    return out;
}

json Vocabulary::to_json() const {
    return {{"tokens", tokens_}, {"df", df_}, {"fit_docs", fit_docs_}};
}

Vocabulary Vocabulary::from_json(const json& j) {
    Vocabulary v;
    v.tokens_ = j.at("tokens").get<std::vector<std::string>>();
    v.fit_docs_ = j.at("fit_docs").get<std::size_t>();
    if (j.contains("df")) {
        v.df_ = j.at("df").get<std::vector<std::size_t>>();
    } else {
        v.df_.assign(v.tokens_.size(), 0);
    }
    if (v.df_.size() != v.tokens_.size()) throw DimensionMismatch("vocabulary df length differs from tokens");
    if (!std::is_sorted(v.tokens_.begin(), v.tokens_.end())) throw InvalidArgument("vocabulary tokens not sorted");
    v.rebuild_index();
    return v;
}

std::vector<SparseVector> transform_all(const Vocabulary& vocab, std::span<const Document> documents, Exec exec) {
    std::vector<SparseVector> out(documents.size());
    parallel_for(exec, documents.size(), [&](std::size_t i) { out[i] = vocab.transform(documents[i]); });
    return out;
}

// ---- spec ------------------------------------------------------------------

namespace {

const char* text_name(TextKind t) {
    switch (t) {
    case TextKind::none: return "none";
    case TextKind::bow: return "bow";
    case TextKind::external: return "external";
    }
    return "?";
}

const char* streams_name(Streams s) {
    return s == Streams::add_only ? "add_only" : "add_and_remove";
}

const char* features_name(FeatureSet f) {
    switch (f) {
    case FeatureSet::none: return "none";
    case FeatureSet::add_rem: return "add_rem";
    case FeatureSet::count: return "count";
    case FeatureSet::hist: return "hist";
    case FeatureSet::all: return "all";
    }
    return "?";
}

std::optional<TextKind> as_text(std::string_view s) {
    for (auto t : {TextKind::none, TextKind::bow, TextKind::external}) {
        if (s == text_name(t)) return t;
    }
    return std::nullopt;
}

std::optional<Streams> as_streams(std::string_view s) {
    for (auto t : {Streams::add_only, Streams::add_and_remove}) {
        if (s == streams_name(t)) return t;
    }
    return std::nullopt;
}

std::optional<FeatureSet> as_features(std::string_view s) {
    for (auto t : {FeatureSet::none, FeatureSet::add_rem, FeatureSet::count, FeatureSet::hist, FeatureSet::all}) {
        if (s == features_name(t)) return t;
    }
    return std::nullopt;
}

[[noreturn]] void bad_spec(std::string_view text, const std::string& why) {
    throw InvalidArgument("invalid embedding spec '" + std::string(text) + "': " + why);
}

} // namespace

std::string EmbeddingSpec::to_string() const {
    return std::string(text_name(text)) + "+" + streams_name(streams) + "+" + features_name(features);
}

EmbeddingSpec parse_spec(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        auto plus = text.find('+', pos);
        parts.push_back(text.substr(pos, plus == std::string_view::npos ? std::string_view::npos : plus - pos));
        if (plus == std::string_view::npos) break;
        pos = plus + 1;
    }

    EmbeddingSpec spec;
    if (parts.size() == 3) {
        auto t = as_text(parts[0]);
        auto s = as_streams(parts[1]);
        auto f = as_features(parts[2]);
        if (!t) bad_spec(text, "unknown text kind '" + std::string(parts[0]) + "'");
        if (!s) bad_spec(text, "unknown streams '" + std::string(parts[1]) + "'");
        if (!f) bad_spec(text, "unknown feature set '" + std::string(parts[2]) + "'");
        spec = {*t, *s, *f};
    } else if (parts.size() == 2) {
        auto t = as_text(parts[0]);
        if (!t) bad_spec(text, "unknown text kind '" + std::string(parts[0]) + "'");
        if (auto f = as_features(parts[1])) {
            spec = {*t, Streams::add_and_remove, *f};
        } else if (auto s = as_streams(parts[1])) {
            spec = {*t, *s, FeatureSet::none};
        } else {
            bad_spec(text, "unknown feature set '" + std::string(parts[1]) + "'");
        }
    } else if (parts.size() == 1) {
        if (auto t = as_text(parts[0]); t && *t != TextKind::none) {
            spec = {*t, Streams::add_and_remove, FeatureSet::none};
        } else if (auto f = as_features(parts[0]); f && *f != FeatureSet::none) {
            spec = {TextKind::none, Streams::add_and_remove, *f};
        } else {
            bad_spec(text, "expected a text kind or a feature set");
        }
    } else {
        bad_spec(text, "expected <text>+<streams>+<features>");
    }
    if (spec.text == TextKind::none && spec.features == FeatureSet::none) {
        bad_spec(text, "text kind and feature set cannot both be none");
    }
    return spec;
}

std::vector<std::size_t> feature_columns(FeatureSet set) {
    std::vector<std::size_t> cols;
    switch (set) {
    case FeatureSet::none: break;
    case FeatureSet::add_rem: cols = {0, 1}; break;
    case FeatureSet::count:
        for (std::size_t i = 0; i < kCountFeatureCount; ++i) cols.push_back(i);
        break;
    case FeatureSet::hist:
        for (std::size_t i = kCountFeatureCount; i < kFeatureCount; ++i) cols.push_back(i);
        break;
    case FeatureSet::all:
        for (std::size_t i = 0; i < kFeatureCount; ++i) cols.push_back(i);
        break;
    }
    return cols;
}

// ---- external vectors ------------------------------------------------------

const std::vector<double>& ExternalVectors::at(const FileKey& key, Stream stream) const {
    auto it = vectors.find({key.patch_id, key.path, stream});
    if (it == vectors.end()) {
        throw MissingVector("no external " + std::string(to_string(stream)) + " vector for " + key.patch_id + ":" +
                            key.path);
    }
    return it->second;
}

ExternalVectors parse_external_vectors(std::istream& in, const std::set<FileKey>* known_files) {
    ExternalVectors out;
    std::string line;
    std::size_t line_no = 0;
    bool have_dim = false;
    std::size_t ignored = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(line_no, "<json>", e.what());
        }
        ExternalKey key;
        try {
            key.patch_id = j.at("patch_id").get<std::string>();
            key.path = j.at("path").get<std::string>();
            const auto stream = j.at("stream").get<std::string>();
            if (stream == "add") {
                key.stream = Stream::add;
            } else if (stream == "remove") {
                key.stream = Stream::remove;
            } else {
                throw SchemaError(line_no, "stream", "expected \"add\" or \"remove\"");
            }
        } catch (const json::exception& e) {
            throw SchemaError(line_no, "<row>", e.what());
        }
        const auto& vj = j.contains("vector") ? j["vector"] : json();
        if (!vj.is_array()) throw SchemaError(line_no, "vector", "expected an array of numbers");
        std::vector<double> vec;
        vec.reserve(vj.size());
        for (const auto& x : vj) {
            if (!x.is_number()) throw SchemaError(line_no, "vector", "expected an array of numbers");
            vec.push_back(x.get<double>());
        }
        if (!have_dim) {
            out.dim = vec.size();
            have_dim = true;
        } else if (vec.size() != out.dim) {
            throw DimensionMismatch("external vector at line " + std::to_string(line_no) + " has dimension " +
                                    std::to_string(vec.size()) + ", expected " + std::to_string(out.dim));
        }
        if (known_files != nullptr && !known_files->contains(FileKey{key.patch_id, key.path})) {
            ++ignored;
            continue;
        }
        if (!out.vectors.emplace(std::move(key), std::move(vec)).second) {
            throw SchemaError(line_no, "<row>", "duplicate (patch_id, path, stream)");
        }
    }
    if (ignored > 0) warn(std::to_string(ignored) + " external vector row(s) refer to files outside the corpus; ignored");
    return out;
}

ExternalVectors load_external_vectors(const std::filesystem::path& path, const std::set<FileKey>* known_files) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open external vectors " + path.string());
    return parse_external_vectors(in, known_files);
}

// ---- combine ---------------------------------------------------------------

const char* to_string(BlockTag tag) {
    switch (tag) {
    case BlockTag::bow_add: return "bow_add";
    case BlockTag::bow_rem: return "bow_rem";
    case BlockTag::ext_add: return "ext_add";
    case BlockTag::ext_rem: return "ext_rem";
    case BlockTag::feature: return "feature";
    }
    return "?";
}

namespace {

BlockTag block_tag_from_string(const std::string& s) {
    for (auto t : {BlockTag::bow_add, BlockTag::bow_rem, BlockTag::ext_add, BlockTag::ext_rem, BlockTag::feature}) {
        if (s == to_string(t)) return t;
    }
    throw SchemaError(0, "tag", "unknown block tag '" + s + "'");
}

void append_sparse(SparseVector& row, const SparseVector& block, std::size_t offset) {
    for (std::size_t k = 0; k < block.indices.size(); ++k) {
        if (block.values[k] == 0.0) continue;
        row.indices.push_back(static_cast<std::uint32_t>(offset + block.indices[k]));
        row.values.push_back(block.values[k]);
    }
}

void append_dense(SparseVector& row, std::span<const double> block, std::size_t offset) {
    for (std::size_t j = 0; j < block.size(); ++j) {
        if (block[j] == 0.0) continue;
        row.indices.push_back(static_cast<std::uint32_t>(offset + j));
        row.values.push_back(block[j]);
    }
}

} // namespace

EmbeddingMatrix combine(const EmbeddingSpec& spec, const std::vector<FileKey>& keys, const BowBlocks* bow,
                        const ExternalVectors* external, const FeatureMatrix* features) {
    if (spec.text == TextKind::none && spec.features == FeatureSet::none) {
        throw InvalidArgument("embedding spec selects no blocks");
    }
    EmbeddingMatrix m;
    m.spec = spec;
    m.keys = keys;

    auto add_block = [&](BlockTag tag, bool sparse, std::vector<std::string> names) {
        m.blocks.push_back({tag, m.columns.size(), names.size(), sparse});
        for (auto& n : names) m.columns.push_back(std::move(n));
    };
    auto prefixed = [](const char* prefix, const std::vector<std::string>& tokens) {
        std::vector<std::string> names;
        names.reserve(tokens.size());
        for (const auto& t : tokens) names.push_back(std::string(prefix) + ":" + t);
        return names;
    };
    auto numbered = [](const char* prefix, std::size_t dim) {
        std::vector<std::string> names;
        for (std::size_t j = 0; j < dim; ++j) names.push_back(std::string(prefix) + ":" + std::to_string(j));
        return names;
    };

    const bool both_streams = spec.streams == Streams::add_and_remove;
    if (spec.text == TextKind::bow) {
        if (bow == nullptr) throw MissingVector("bag-of-words blocks were not provided");
        if (bow->add_rows.size() != keys.size() || (both_streams && bow->rem_rows.size() != keys.size())) {
            throw DimensionMismatch("bag-of-words rows do not match the key list");
        }
        add_block(BlockTag::bow_add, true, prefixed("bow_add", bow->add_vocab.tokens()));
        if (both_streams) add_block(BlockTag::bow_rem, true, prefixed("bow_rem", bow->rem_vocab.tokens()));
    } else if (spec.text == TextKind::external) {
        if (external == nullptr) throw MissingVector("external vectors were not provided");
        add_block(BlockTag::ext_add, false, numbered("ext_add", external->dim));
        if (both_streams) add_block(BlockTag::ext_rem, false, numbered("ext_rem", external->dim));
    }
    const auto feature_cols = feature_columns(spec.features);
    if (!feature_cols.empty()) {
        if (features == nullptr) throw MissingVector("feature matrix was not provided");
        std::vector<std::string> names;
        for (auto c : feature_cols) names.push_back(feature_names()[c]);
        add_block(BlockTag::feature, false, std::move(names));
    }

    m.data = SparseMatrix(m.columns.size());
    std::vector<double> feature_buf(feature_cols.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        SparseVector row;
        for (const auto& block : m.blocks) {
            switch (block.tag) {
            case BlockTag::bow_add: append_sparse(row, bow->add_rows[i], block.offset); break;
            case BlockTag::bow_rem: append_sparse(row, bow->rem_rows[i], block.offset); break;
            case BlockTag::ext_add: append_dense(row, external->at(keys[i], Stream::add), block.offset); break;
            case BlockTag::ext_rem: append_dense(row, external->at(keys[i], Stream::remove), block.offset); break;
            case BlockTag::feature: {
                const auto* fr = features->find(keys[i]);
                if (fr == nullptr) throw MissingVector("no feature row for " + keys[i].patch_id + ":" + keys[i].path);
                for (std::size_t c = 0; c < feature_cols.size(); ++c) feature_buf[c] = fr->values[feature_cols[c]];
                append_dense(row, feature_buf, block.offset);
                break;
            }
            }
        }
        m.data.append_row(row);
    }
    return m;
}

json EmbeddingMatrix::to_json() const {
    json key_list = json::array();
    for (const auto& k : keys) key_list.push_back({k.patch_id, k.path});
    json block_list = json::array();
    for (const auto& b : blocks) {
        json jb = {{"tag", radar::to_string(b.tag)},
                   {"offset", b.offset},
                   {"width", b.width},
                   {"storage", b.sparse ? "sparse" : "dense"},
                   {"columns", std::vector<std::string>(columns.begin() + static_cast<std::ptrdiff_t>(b.offset),
                                                        columns.begin() + static_cast<std::ptrdiff_t>(b.offset + b.width))}};
        json rows_json = json::array();
        for (std::size_t i = 0; i < rows(); ++i) {
            const auto r = data.row(i);
            if (b.sparse) {
                std::vector<std::size_t> idx;
                std::vector<double> val;
                for (std::size_t k = 0; k < r.indices.size(); ++k) {
                    if (r.indices[k] < b.offset || r.indices[k] >= b.offset + b.width) continue;
                    idx.push_back(r.indices[k] - b.offset);
                    val.push_back(r.values[k]);
                }
                rows_json.push_back({idx, val});
            } else {
                std::vector<double> dense(b.width, 0.0);
                for (std::size_t k = 0; k < r.indices.size(); ++k) {
                    if (r.indices[k] < b.offset || r.indices[k] >= b.offset + b.width) continue;
                    dense[r.indices[k] - b.offset] = r.values[k];
                }
                rows_json.push_back(dense);
            }
        }
        jb[b.sparse ? "rows" : "values"] = std::move(rows_json);
        block_list.push_back(std::move(jb));
    }
    return {{"format", "radar.embedding"}, {"version", 1},          {"spec", spec.to_string()},
            {"n_rows", rows()},            {"n_cols", cols()},      {"keys", std::move(key_list)},
            {"blocks", std::move(block_list)}};
}

EmbeddingMatrix EmbeddingMatrix::from_json(const json& j) {
    if (j.value("format", "") != "radar.embedding") throw SchemaError(0, "format", "not an embedding container");
    EmbeddingMatrix m;
    m.spec = parse_spec(j.at("spec").get<std::string>());
    for (const auto& k : j.at("keys")) m.keys.push_back({k.at(0).get<std::string>(), k.at(1).get<std::string>()});
    const auto n = m.keys.size();
    std::vector<SparseVector> rows(n);
    for (const auto& jb : j.at("blocks")) {
        ColumnBlock b;
        b.tag = block_tag_from_string(jb.at("tag").get<std::string>());
        b.offset = jb.at("offset").get<std::size_t>();
        b.width = jb.at("width").get<std::size_t>();
        b.sparse = jb.at("storage").get<std::string>() == "sparse";
        if (b.offset != m.columns.size()) throw SchemaError(0, "offset", "blocks must be contiguous");
        for (const auto& c : jb.at("columns")) m.columns.push_back(c.get<std::string>());
        if (m.columns.size() != b.offset + b.width) throw SchemaError(0, "columns", "width mismatch");
        const auto& data = jb.at(b.sparse ? "rows" : "values");
        if (data.size() != n) throw SchemaError(0, "rows", "row count mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (b.sparse) {
                SparseVector block;
                for (const auto& x : data[i].at(0)) block.indices.push_back(x.get<std::uint32_t>());
                block.values = data[i].at(1).get<std::vector<double>>();
                append_sparse(rows[i], block, b.offset);
            } else {
                append_dense(rows[i], data[i].get<std::vector<double>>(), b.offset);
            }
        }
        m.blocks.push_back(b);
    }
    m.data = SparseMatrix(m.columns.size());
    for (const auto& r : rows) m.data.append_row(r);
    return m;
}

// ---- embedder --------------------------------------------------------------

const ChangedFile& find_changed_file(const Corpus& corpus, const FileKey& key) {
    for (const auto& p : corpus) {
        if (p.patch_id != key.patch_id) continue;
        if (const auto* f = p.initial().find_file(key.path)) return *f;
    }
    throw UnknownFile("no changed file " + key.patch_id + ":" + key.path + " in the corpus");
}

namespace {

std::vector<const ChangedFile*> resolve_files(const Corpus& corpus, const std::vector<FileKey>& keys) {
    std::unordered_map<std::string_view, const Patch*> by_id;
    for (const auto& p : corpus) by_id.emplace(p.patch_id, &p);
    std::vector<const ChangedFile*> files;
    files.reserve(keys.size());
    for (const auto& k : keys) {
        auto it = by_id.find(k.patch_id);
        const ChangedFile* f = it == by_id.end() ? nullptr : it->second->initial().find_file(k.path);
        if (f == nullptr) throw UnknownFile("no changed file " + k.patch_id + ":" + k.path + " in the corpus");
        files.push_back(f);
    }
    return files;
}

std::vector<Document> documents(const std::vector<const ChangedFile*>& files, Stream stream) {
    std::vector<Document> docs;
    docs.reserve(files.size());
    for (const auto* f : files) docs.push_back(file_document(*f, stream));
    return docs;
}

} // namespace

Embedder Embedder::fit(const EmbeddingSpec& spec, const Corpus& corpus, const std::vector<FileKey>& train_keys) {
    Embedder e(spec);
    if (spec.text != TextKind::bow) return e;
    const auto files = resolve_files(corpus, train_keys);
    e.add_vocab_ = Vocabulary::fit(documents(files, Stream::add));
    if (e.add_vocab_.empty()) warn("EmptyVocabulary: every added-line token was pruned");
    if (spec.streams == Streams::add_and_remove) {
        e.rem_vocab_ = Vocabulary::fit(documents(files, Stream::remove));
        if (e.rem_vocab_.empty()) warn("EmptyVocabulary: every removed-line token was pruned");
    }
    return e;
}

EmbeddingMatrix Embedder::transform(const Corpus& corpus, const std::vector<FileKey>& keys,
                                    const FeatureMatrix* features, const ExternalVectors* external,
                                    Exec exec) const {
    if (spec_.text != TextKind::bow) return combine(spec_, keys, nullptr, external, features);
    const auto files = resolve_files(corpus, keys);
    BowBlocks bow;
    bow.add_vocab = add_vocab_;
    bow.add_rows = transform_all(add_vocab_, documents(files, Stream::add), exec);
    if (spec_.streams == Streams::add_and_remove) {
        bow.rem_vocab = rem_vocab_;
        bow.rem_rows = transform_all(rem_vocab_, documents(files, Stream::remove), exec);
    }
    return combine(spec_, keys, &bow, external, features);
}

json Embedder::to_json() const {
    return {{"spec", spec_.to_string()}, {"vocab_add", add_vocab_.to_json()}, {"vocab_rem", rem_vocab_.to_json()}};
}

Embedder Embedder::from_json(const json& j) {
    Embedder e(parse_spec(j.at("spec").get<std::string>()));
    e.add_vocab_ = Vocabulary::from_json(j.at("vocab_add"));
    e.rem_vocab_ = Vocabulary::from_json(j.at("vocab_rem"));
    return e;
}

} // namespace radar

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "radar/corpus.hpp"
#include "radar/features.hpp"
#include "radar/parallel.hpp"
#include "radar/sparse.hpp"

namespace radar {

inline constexpr std::string_view kNumberToken = "<NUMBER>";

/// Code tokenizer for Bag-of-Words. Standalone digit runs become <NUMBER>;
/// the remaining tokens are maximal [A-Za-z0-9_] runs of length >= 2. No case
/// folding or stemming.
std::vector<std::string> preprocess_code(std::span<const std::string> lines);

enum class Stream { add, remove };

const char* to_string(Stream stream);

/// Token list for one stream of one changed file: added lines for Stream::add,
/// removed lines for Stream::remove.
std::vector<std::string> file_document(const ChangedFile& file, Stream stream);

using Document = std::vector<std::string>;

class Vocabulary {
public:
    Vocabulary() = default;

    /// Keeps tokens whose document frequency df satisfies 2 <= df <= 0.5 * N,
    /// N being the number of fit documents. Columns are in byte order.
    static Vocabulary fit(std::span<const Document> documents);

    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    std::size_t fit_docs() const { return fit_docs_; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::vector<std::size_t>& document_frequency() const { return df_; }
    std::optional<std::size_t> column(std::string_view token) const;

    /// Term counts; tokens outside the vocabulary contribute nothing.
    SparseVector transform(const Document& document) const;

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

    bool operator==(const Vocabulary& other) const {
        return tokens_ == other.tokens_ && df_ == other.df_ && fit_docs_ == other.fit_docs_;
    }

private:
    void rebuild_index();

    std::vector<std::string> tokens_;
    std::vector<std::size_t> df_;
    std::size_t fit_docs_ = 0;
    std::map<std::string, std::size_t, std::less<>> column_;
};

inline Vocabulary fit_vocabulary(std::span<const Document> documents) {
    return Vocabulary::fit(documents);
}

inline SparseVector transform_bow(const Vocabulary& vocab, const Document& document) {
    return vocab.transform(document);
}

/// Row-parallel transform; the serial path is the reference.
std::vector<SparseVector> transform_all(const Vocabulary& vocab, std::span<const Document> documents,
                                        Exec exec = Exec::parallel);

// ---- embedding spec --------------------------------------------------------

enum class TextKind { none, bow, external };
enum class Streams { add_only, add_and_remove };
enum class FeatureSet { none, add_rem, count, hist, all };

struct EmbeddingSpec {
    TextKind text = TextKind::bow;
    Streams streams = Streams::add_and_remove;
    FeatureSet features = FeatureSet::none;

    /// Canonical "<text>+<streams>+<features>".
    std::string to_string() const;
    bool operator==(const EmbeddingSpec&) const = default;
};

/// Accepts "<text>+<streams>+<features>" or the two-part short form
/// "<text>+<features>" (streams default to add_and_remove). A single token
/// names either a text kind or a feature set.
EmbeddingSpec parse_spec(std::string_view text);

/// Feature-table indices selected by a feature set.
std::vector<std::size_t> feature_columns(FeatureSet set);

// ---- external vectors ------------------------------------------------------

struct ExternalKey {
    std::string patch_id;
    std::string path;
    Stream stream = Stream::add;

    auto operator<=>(const ExternalKey&) const = default;
};

struct ExternalVectors {
    std::size_t dim = 0;
    std::map<ExternalKey, std::vector<double>> vectors;

    const std::vector<double>& at(const FileKey& key, Stream stream) const;
};

/// Reads precomputed dense encodings. When known_files is given, rows for
/// files outside it are dropped with a warning.
ExternalVectors load_external_vectors(const std::filesystem::path& path,
                                      const std::set<FileKey>* known_files = nullptr);
ExternalVectors parse_external_vectors(std::istream& in, const std::set<FileKey>* known_files = nullptr);

// ---- combined matrix -------------------------------------------------------

enum class BlockTag { bow_add, bow_rem, ext_add, ext_rem, feature };

const char* to_string(BlockTag tag);

struct ColumnBlock {
    BlockTag tag = BlockTag::feature;
    std::size_t offset = 0;
    std::size_t width = 0;
    bool sparse = false;
};

struct EmbeddingMatrix {
    EmbeddingSpec spec;
    std::vector<FileKey> keys;
    std::vector<std::string> columns; // e.g. "bow_add:foo", "ext_rem:17", "c_add"
    std::vector<ColumnBlock> blocks;
    SparseMatrix data;

    std::size_t rows() const { return keys.size(); }
    std::size_t cols() const { return columns.size(); }

    nlohmann::json to_json() const;
    static EmbeddingMatrix from_json(const nlohmann::json& j);
};

/// Per-row text blocks from fitted vocabularies, aligned with the key list.
struct BowBlocks {
    Vocabulary add_vocab;
    Vocabulary rem_vocab;
    std::vector<SparseVector> add_rows;
    std::vector<SparseVector> rem_rows;
};

/// Row = [text(add)] ++ [text(remove) if add_and_remove] ++ [features]. Values
/// are copied unscaled.
EmbeddingMatrix combine(const EmbeddingSpec& spec, const std::vector<FileKey>& keys, const BowBlocks* bow,
                        const ExternalVectors* external, const FeatureMatrix* features);

/// Fitted text state for a spec: the two stream vocabularies learned from the
/// training rows only. Serialized into model artifacts so later stages can
/// embed unseen rows the same way.
class Embedder {
public:
    Embedder() = default;
    explicit Embedder(EmbeddingSpec spec) : spec_(spec) {}

    static Embedder fit(const EmbeddingSpec& spec, const Corpus& corpus, const std::vector<FileKey>& train_keys);

    EmbeddingMatrix transform(const Corpus& corpus, const std::vector<FileKey>& keys, const FeatureMatrix* features,
                              const ExternalVectors* external, Exec exec = Exec::parallel) const;

    const EmbeddingSpec& spec() const { return spec_; }
    const Vocabulary& add_vocab() const { return add_vocab_; }
    const Vocabulary& rem_vocab() const { return rem_vocab_; }

    nlohmann::json to_json() const;
    static Embedder from_json(const nlohmann::json& j);

private:
    EmbeddingSpec spec_;
    Vocabulary add_vocab_;
    Vocabulary rem_vocab_;
};

/// Looks up the changed file of a key in a corpus.
const ChangedFile& find_changed_file(const Corpus& corpus, const FileKey& key);

} // namespace radar

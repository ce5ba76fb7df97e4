#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace radar {

using Timestamp = std::int64_t; // epoch seconds

inline constexpr std::size_t kDefaultContextLimit = 10;

struct Hunk {
    std::vector<std::string> added;
    std::vector<std::string> removed;
    std::vector<std::string> context_before;
    std::vector<std::string> context_after;

    bool operator==(const Hunk&) const = default;
};

struct ChangedFile {
    std::string path;
    std::vector<Hunk> hunks;

    std::size_t added_lines() const;
    std::size_t removed_lines() const;
    std::size_t context_lines() const;

    bool operator==(const ChangedFile&) const = default;
};

enum class CommitKind { initial, revision };

struct Commit {
    std::string commit_id;
    CommitKind kind = CommitKind::initial;
    Timestamp timestamp = 0;
    std::vector<ChangedFile> files;

    const ChangedFile* find_file(std::string_view path) const;

    bool operator==(const Commit&) const = default;
};

struct ReviewComment {
    std::optional<std::string> file_path; // empty: general patch-level comment
    std::optional<std::int64_t> line;
    std::string commit_id;
    std::string author_id;
    Timestamp timestamp = 0;

    bool operator==(const ReviewComment&) const = default;
};

struct Patch {
    std::string patch_id;
    std::string project;
    std::string author_id;
    std::vector<std::string> reviewer_ids; // sorted, unique
    Timestamp submitted_at = 0;
    std::vector<Commit> commits;
    std::vector<ReviewComment> comments;

    /// The first commit. Valid only on validated patches.
    const Commit& initial() const { return commits.front(); }

    bool operator==(const Patch&) const = default;
};

/// Row identity used throughout the pipeline: one changed file of a patch's
/// initial commit.
struct FileKey {
    std::string patch_id;
    std::string path;

    auto operator<=>(const FileKey&) const = default;
    bool operator==(const FileKey&) const = default;
};

using Corpus = std::vector<Patch>;

// ---- unified diffs ---------------------------------------------------------

/// Parses a unified diff into one ChangedFile per file section. Each run of
/// consecutive '+'/'-' lines becomes a Hunk; context between two runs belongs
/// to the later run's context_before. Context is truncated to context_limit
/// lines on each side, keeping the lines nearest to the change.
std::vector<ChangedFile> parse_unified_diff(std::string_view text,
                                            std::size_t context_limit = kDefaultContextLimit);

// ---- JSONL corpus ----------------------------------------------------------

struct LoadOptions {
    std::size_t context_limit = kDefaultContextLimit;
};

/// Checks every Patch invariant; throws SchemaError tagged with line_no.
void validate_patch(const Patch& patch, std::size_t line_no = 0);

/// Sorts by (submitted_at, patch_id).
void sort_corpus(Corpus& corpus);

Patch patch_from_json(const nlohmann::json& j, std::size_t line_no, const LoadOptions& options = {});
nlohmann::json patch_to_json(const Patch& patch);

Corpus parse_corpus(std::istream& in, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
std::string corpus_to_jsonl(const Corpus& corpus);

/// Alternative ingest: metadata JSONL whose commits carry a "diff" field naming
/// a unified-diff file under diff_dir instead of inline "files".
Corpus ingest_raw_diffs(const std::filesystem::path& metadata_path,
                        const std::filesystem::path& diff_dir,
                        const LoadOptions& options = {});

/// Parent directory of a path ("" for root files).
std::string parent_dir(std::string_view path);

const char* to_string(CommitKind kind);

} // namespace radar

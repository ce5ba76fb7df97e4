#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "radar/corpus.hpp"
#include "radar/parallel.hpp"

namespace radar {

enum class Label { commented, revised, hot_spot };

inline constexpr std::array<Label, 3> kAllLabels{Label::commented, Label::revised, Label::hot_spot};

const char* to_string(Label label);
Label parse_label(std::string_view name);

struct FileLabels {
    bool commented = false;
    bool revised = false;
    bool hot_spot = false;

    bool get(Label label) const;
    bool operator==(const FileLabels&) const = default;
};

/// Which comments may mark a file as commented: any commit of the patch, or
/// only comments left on the initial commit.
enum class CommentsScope { any, initial };

CommentsScope parse_comments_scope(std::string_view name);
const char* to_string(CommentsScope scope);

struct LabelOptions {
    CommentsScope comments_scope = CommentsScope::any;
};

bool label_commented(const Patch& patch, std::string_view file_path, const LabelOptions& options = {});
bool label_revised(const Patch& patch, std::string_view file_path);

struct LabelRow {
    FileKey key;
    FileLabels labels;
};

/// Labels for every file of every initial commit, in corpus order (patch
/// order, then the file order of the initial commit).
class LabelTable {
public:
    LabelTable() = default;
    explicit LabelTable(std::vector<LabelRow> rows);

    const std::vector<LabelRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    const FileLabels& at(const FileKey& key) const;
    const FileLabels* find(const FileKey& key) const;

private:
    std::vector<LabelRow> rows_;
    std::map<FileKey, std::size_t> index_;
};

/// Labels of one patch's initial-commit files.
std::vector<LabelRow> label_patch(const Patch& patch, const LabelOptions& options = {});

LabelTable label_all(const Corpus& corpus, const LabelOptions& options = {}, Exec exec = Exec::parallel);

struct LabelShare {
    std::size_t patches = 0; // patches with at least one labelled file
    std::size_t files = 0;
    double patch_ratio = 0.0;
    double file_ratio = 0.0;
};

/// Shape of the dataset revision-activity table: totals plus the share of
/// patches and changed files carrying each label.
struct SummaryReport {
    std::size_t patch_count = 0;
    std::size_t changed_file_count = 0;
    std::array<LabelShare, 3> labels{}; // indexed by Label
};

SummaryReport corpus_summary(const Corpus& corpus, const LabelTable& labels);

} // namespace radar

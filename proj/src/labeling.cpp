#include "radar/labeling.hpp"
#include "radar/error.hpp"

#include <algorithm>

namespace radar {

const char* to_string(Label label) {
    switch (label) {
    case Label::commented: return "commented";
    case Label::revised: return "revised";
    case Label::hot_spot: return "hot_spot";
    }
    return "?";
}

Label parse_label(std::string_view name) {
    for (auto l : kAllLabels) {
        if (name == to_string(l)) return l;
    }
    throw InvalidArgument("unknown label '" + std::string(name) + "' (expected commented|revised|hot_spot)");
}

bool FileLabels::get(Label label) const {
    switch (label) {
    case Label::commented: return commented;
    case Label::revised: return revised;
    case Label::hot_spot: return hot_spot;
    }
    return false;
}

CommentsScope parse_comments_scope(std::string_view name) {
    if (name == "any") return CommentsScope::any;
    if (name == "initial") return CommentsScope::initial;
    throw InvalidArgument("unknown comments_scope '" + std::string(name) + "' (expected any|initial)");
}

const char* to_string(CommentsScope scope) {
    return scope == CommentsScope::any ? "any" : "initial";
}

namespace {

void require_initial_file(const Patch& patch, std::string_view path) {
    if (patch.initial().find_file(path) == nullptr) {
        throw UnknownFile("file '" + std::string(path) + "' is not part of the initial commit of patch " +
                          patch.patch_id);
    }
}

} // namespace

bool label_commented(const Patch& patch, std::string_view file_path, const LabelOptions& options) {
    require_initial_file(patch, file_path);
    const auto& initial_id = patch.initial().commit_id;
    return std::any_of(patch.comments.begin(), patch.comments.end(), [&](const ReviewComment& c) {
        if (!c.file_path || *c.file_path != file_path) return false;
        return options.comments_scope == CommentsScope::any || c.commit_id == initial_id;
    });
}

bool label_revised(const Patch& patch, std::string_view file_path) {
    require_initial_file(patch, file_path);
    return std::any_of(patch.commits.begin() + 1, patch.commits.end(),
                       [&](const Commit& c) { return c.find_file(file_path) != nullptr; });
}

std::vector<LabelRow> label_patch(const Patch& patch, const LabelOptions& options) {
    std::vector<LabelRow> rows;
    rows.reserve(patch.initial().files.size());
    for (const auto& f : patch.initial().files) {
        FileLabels l;
        l.commented = label_commented(patch, f.path, options);
        l.revised = label_revised(patch, f.path);
        l.hot_spot = l.commented || l.revised;
        rows.push_back({{patch.patch_id, f.path}, l});
    }
    return rows;
}

LabelTable::LabelTable(std::vector<LabelRow> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) index_.emplace(rows_[i].key, i);
}

const FileLabels* LabelTable::find(const FileKey& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &rows_[it->second].labels;
}

const FileLabels& LabelTable::at(const FileKey& key) const {
    if (const auto* l = find(key)) return *l;
    throw UnknownFile("no labels for " + key.patch_id + ":" + key.path);
}

LabelTable label_all(const Corpus& corpus, const LabelOptions& options, Exec exec) {
    std::vector<std::vector<LabelRow>> per_patch(corpus.size());
    parallel_for(exec, corpus.size(), [&](std::size_t i) { per_patch[i] = label_patch(corpus[i], options); });
    std::vector<LabelRow> rows;
    for (auto& chunk : per_patch) {
        for (auto& r : chunk) rows.push_back(std::move(r));
    }
    return LabelTable(std::move(rows));
}

SummaryReport corpus_summary(const Corpus& corpus, const LabelTable& labels) {
    SummaryReport report;
    report.patch_count = corpus.size();
    for (const auto& patch : corpus) {
        std::array<bool, 3> any{};
        for (const auto& f : patch.initial().files) {
            ++report.changed_file_count;
            const auto& l = labels.at({patch.patch_id, f.path});
            for (std::size_t k = 0; k < kAllLabels.size(); ++k) {
                if (l.get(kAllLabels[k])) {
                    ++report.labels[k].files;
                    any[k] = true;
                }
            }
        }
        for (std::size_t k = 0; k < any.size(); ++k) report.labels[k].patches += any[k] ? 1 : 0;
    }
    for (auto& share : report.labels) {
        if (report.patch_count > 0) share.patch_ratio = double(share.patches) / double(report.patch_count);
        if (report.changed_file_count > 0) {
            share.file_ratio = double(share.files) / double(report.changed_file_count);
        }
    }
    return report;
}

} // namespace radar

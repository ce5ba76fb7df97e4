#include "radar/corpus.hpp"
#include "radar/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace radar {

using nlohmann::json;

std::size_t ChangedFile::added_lines() const {
    std::size_t n = 0;
    for (const auto& h : hunks) n += h.added.size();
    return n;
}

std::size_t ChangedFile::removed_lines() const {
    std::size_t n = 0;
    for (const auto& h : hunks) n += h.removed.size();
    return n;
}

std::size_t ChangedFile::context_lines() const {
    std::size_t n = 0;
    for (const auto& h : hunks) n += h.context_before.size() + h.context_after.size();
    return n;
}

const ChangedFile* Commit::find_file(std::string_view path) const {
    for (const auto& f : files) {
        if (f.path == path) return &f;
    }
    return nullptr;
}

std::string parent_dir(std::string_view path) {
    const auto slash = path.rfind('/');
    if (slash == std::string_view::npos) return {};
    return std::string(path.substr(0, slash));
}

const char* to_string(CommitKind kind) {
    return kind == CommitKind::initial ? "initial" : "revision";
}

namespace {

const json& require(const json& j, const char* field, std::size_t line_no) {
    auto it = j.find(field);
    if (it == j.end()) throw SchemaError(line_no, field, "missing");
    return *it;
}

std::string get_string(const json& j, const char* field, std::size_t line_no) {
    const auto& v = require(j, field, line_no);
    if (!v.is_string()) throw SchemaError(line_no, field, "expected a string");
    return v.get<std::string>();
}

std::int64_t get_int(const json& j, const char* field, std::size_t line_no) {
    const auto& v = require(j, field, line_no);
    if (!v.is_number_integer()) throw SchemaError(line_no, field, "expected an integer");
    return v.get<std::int64_t>();
}

const json& get_array(const json& j, const char* field, std::size_t line_no) {
    const auto& v = require(j, field, line_no);
    if (!v.is_array()) throw SchemaError(line_no, field, "expected an array");
    return v;
}

std::vector<std::string> get_lines(const json& j, const char* field, std::size_t line_no) {
    const auto& arr = get_array(j, field, line_no);
    std::vector<std::string> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_string()) throw SchemaError(line_no, field, "expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Hunk hunk_from_json(const json& j, std::size_t line_no, std::size_t limit) {
    if (!j.is_object()) throw SchemaError(line_no, "hunks", "expected objects");
    Hunk h;
    h.added = get_lines(j, "added", line_no);
    h.removed = get_lines(j, "removed", line_no);
    h.context_before = get_lines(j, "context_before", line_no);
    h.context_after = get_lines(j, "context_after", line_no);
    if (h.context_before.size() > limit) {
        h.context_before.erase(h.context_before.begin(),
                               h.context_before.end() - static_cast<std::ptrdiff_t>(limit));
    }
    if (h.context_after.size() > limit) h.context_after.resize(limit);
    return h;
}

ChangedFile file_from_json(const json& j, std::size_t line_no, std::size_t limit) {
    if (!j.is_object()) throw SchemaError(line_no, "files", "expected objects");
    ChangedFile f;
    f.path = get_string(j, "path", line_no);
    for (const auto& h : get_array(j, "hunks", line_no)) f.hunks.push_back(hunk_from_json(h, line_no, limit));
    return f;
}

CommitKind kind_from_string(const std::string& s, std::size_t line_no) {
    if (s == "initial") return CommitKind::initial;
    if (s == "revision") return CommitKind::revision;
    throw SchemaError(line_no, "kind", "expected \"initial\" or \"revision\", got \"" + s + "\"");
}

json lines_to_json(const std::vector<std::string>& lines) {
    return json(lines);
}

} // namespace

void validate_patch(const Patch& p, std::size_t line_no) {
    if (p.patch_id.empty()) throw SchemaError(line_no, "patch_id", "must be non-empty");
    if (p.commits.empty()) throw SchemaError(line_no, "commits", "a patch needs at least one commit");
    if (p.commits.front().kind != CommitKind::initial) {
        throw SchemaError(line_no, "commits", "first commit must have kind=initial");
    }
    for (std::size_t c = 1; c < p.commits.size(); ++c) {
        if (p.commits[c].kind == CommitKind::initial) {
            throw SchemaError(line_no, "commits", "only the first commit may have kind=initial");
        }
        if (p.commits[c].timestamp < p.commits[c - 1].timestamp) {
            throw SchemaError(line_no, "commits", "commit timestamps must be non-decreasing");
        }
    }
    if (p.commits.front().timestamp != p.submitted_at) {
        throw SchemaError(line_no, "submitted_at", "must equal the initial commit's timestamp");
    }
    if (std::find(p.reviewer_ids.begin(), p.reviewer_ids.end(), p.author_id) != p.reviewer_ids.end()) {
        throw SchemaError(line_no, "reviewer_ids", "the author cannot review their own patch");
    }

    std::unordered_set<std::string> commit_ids;
    for (const auto& commit : p.commits) {
        if (!commit_ids.insert(commit.commit_id).second) {
            throw SchemaError(line_no, "commit_id", "duplicate commit id '" + commit.commit_id + "'");
        }
        if (commit.files.empty()) throw SchemaError(line_no, "files", "a commit needs at least one file");
        std::unordered_set<std::string_view> paths;
        for (const auto& file : commit.files) {
            if (file.path.empty()) throw SchemaError(line_no, "path", "must be non-empty");
            if (!paths.insert(file.path).second) {
                throw SchemaError(line_no, "path", "duplicate path '" + file.path + "' in one commit");
            }
            if (file.hunks.empty()) throw SchemaError(line_no, "hunks", "file '" + file.path + "' has no hunks");
            for (const auto& h : file.hunks) {
                if (h.added.empty() && h.removed.empty()) {
                    throw SchemaError(line_no, "hunks", "pure-context hunk in '" + file.path + "'");
                }
            }
        }
    }

    for (const auto& c : p.comments) {
        if (c.line && !c.file_path) throw SchemaError(line_no, "line", "a line-anchored comment needs a file_path");
        if (!commit_ids.contains(c.commit_id)) {
            throw SchemaError(line_no, "comments.commit_id", "unknown commit '" + c.commit_id + "'");
        }
    }
}

Patch patch_from_json(const json& j, std::size_t line_no, const LoadOptions& options) {
    if (!j.is_object()) throw SchemaError(line_no, "<root>", "expected a JSON object");
    Patch p;
    p.patch_id = get_string(j, "patch_id", line_no);
    p.project = get_string(j, "project", line_no);
    p.author_id = get_string(j, "author_id", line_no);
    p.reviewer_ids = get_lines(j, "reviewer_ids", line_no);
    std::sort(p.reviewer_ids.begin(), p.reviewer_ids.end());
    p.reviewer_ids.erase(std::unique(p.reviewer_ids.begin(), p.reviewer_ids.end()), p.reviewer_ids.end());
    p.submitted_at = get_int(j, "submitted_at", line_no);

    for (const auto& cj : get_array(j, "commits", line_no)) {
        if (!cj.is_object()) throw SchemaError(line_no, "commits", "expected objects");
        Commit c;
        c.commit_id = get_string(cj, "commit_id", line_no);
        c.kind = kind_from_string(get_string(cj, "kind", line_no), line_no);
        c.timestamp = get_int(cj, "timestamp", line_no);
        for (const auto& fj : get_array(cj, "files", line_no)) {
            c.files.push_back(file_from_json(fj, line_no, options.context_limit));
        }
        p.commits.push_back(std::move(c));
    }

    for (const auto& rj : get_array(j, "comments", line_no)) {
        if (!rj.is_object()) throw SchemaError(line_no, "comments", "expected objects");
        ReviewComment rc;
        if (auto it = rj.find("file_path"); it != rj.end() && !it->is_null()) {
            if (!it->is_string()) throw SchemaError(line_no, "file_path", "expected a string or null");
            rc.file_path = it->get<std::string>();
        }
        if (auto it = rj.find("line"); it != rj.end() && !it->is_null()) {
            if (!it->is_number_integer()) throw SchemaError(line_no, "line", "expected an integer or null");
            rc.line = it->get<std::int64_t>();
        }
        rc.commit_id = get_string(rj, "commit_id", line_no);
        rc.author_id = get_string(rj, "author_id", line_no);
        rc.timestamp = get_int(rj, "timestamp", line_no);
        p.comments.push_back(std::move(rc));
    }

    validate_patch(p, line_no);
    return p;
}

json patch_to_json(const Patch& p) {
    json commits = json::array();
    for (const auto& c : p.commits) {
        json files = json::array();
        for (const auto& f : c.files) {
            json hunks = json::array();
            for (const auto& h : f.hunks) {
                hunks.push_back({{"added", lines_to_json(h.added)},
                                 {"removed", lines_to_json(h.removed)},
                                 {"context_before", lines_to_json(h.context_before)},
                                 {"context_after", lines_to_json(h.context_after)}});
            }
            files.push_back({{"path", f.path}, {"hunks", std::move(hunks)}});
        }
        commits.push_back({{"commit_id", c.commit_id},
                           {"kind", to_string(c.kind)},
                           {"timestamp", c.timestamp},
                           {"files", std::move(files)}});
    }
    json comments = json::array();
    for (const auto& rc : p.comments) {
        comments.push_back({{"file_path", rc.file_path ? json(*rc.file_path) : json(nullptr)},
                            {"line", rc.line ? json(*rc.line) : json(nullptr)},
                            {"commit_id", rc.commit_id},
                            {"author_id", rc.author_id},
                            {"timestamp", rc.timestamp}});
    }
    return {{"patch_id", p.patch_id},
            {"project", p.project},
            {"author_id", p.author_id},
            {"reviewer_ids", p.reviewer_ids},
            {"submitted_at", p.submitted_at},
            {"commits", std::move(commits)},
            {"comments", std::move(comments)}};
}

void sort_corpus(Corpus& corpus) {
    std::sort(corpus.begin(), corpus.end(), [](const Patch& a, const Patch& b) {
        if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
        return a.patch_id < b.patch_id;
    });
}

Corpus parse_corpus(std::istream& in, const LoadOptions& options) {
    Corpus corpus;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(line_no, "<json>", e.what());
        }
        if (j.is_object() && j.contains("_meta")) continue; // provenance header
        auto patch = patch_from_json(j, line_no, options);
        if (!seen.insert(patch.patch_id).second) {
            throw DuplicatePatchId("duplicate patch_id '" + patch.patch_id + "' at line " + std::to_string(line_no));
        }
        corpus.push_back(std::move(patch));
    }
    sort_corpus(corpus);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file " + path.string());
    return parse_corpus(in, options);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& p : corpus) {
        out += patch_to_json(p).dump();
        out += '\n';
    }
    return out;
}

Corpus ingest_raw_diffs(const std::filesystem::path& metadata_path, const std::filesystem::path& diff_dir,
                        const LoadOptions& options) {
    std::ifstream in(metadata_path);
    if (!in) throw IoError("cannot open metadata file " + metadata_path.string());

    std::ostringstream normalized;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            normalized << '\n';
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(line_no, "<json>", e.what());
        }
        if (j.contains("commits") && j["commits"].is_array()) {
            for (auto& cj : j["commits"]) {
                if (!cj.is_object() || cj.contains("files")) continue;
                const auto diff_name = get_string(cj, "diff", line_no);
                std::ifstream diff_in(diff_dir / diff_name, std::ios::binary);
                if (!diff_in) throw IoError("cannot open diff file " + (diff_dir / diff_name).string());
                std::ostringstream text;
                text << diff_in.rdbuf();
                std::vector<ChangedFile> files;
                try {
                    files = parse_unified_diff(text.str(), options.context_limit);
                } catch (const MalformedDiff& e) {
                    throw MalformedDiff(e.line_no(), diff_name + ": " + e.reason());
                }
                json fj = json::array();
                for (const auto& f : files) {
                    json hunks = json::array();
                    for (const auto& h : f.hunks) {
                        hunks.push_back({{"added", h.added},
                                         {"removed", h.removed},
                                         {"context_before", h.context_before},
                                         {"context_after", h.context_after}});
                    }
                    fj.push_back({{"path", f.path}, {"hunks", std::move(hunks)}});
                }
                cj.erase("diff");
                cj["files"] = std::move(fj);
            }
        }
        normalized << j.dump() << '\n';
    }
    std::istringstream reparsed(normalized.str());
    return parse_corpus(reparsed, options);
}

} // namespace radar

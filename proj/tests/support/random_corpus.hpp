#pragma once

// Seeded corpus generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "radar/corpus.hpp"
#include "radar/rng.hpp"

namespace radar::testing {

struct RandomCorpusOptions {
    std::size_t min_patches = 1;
    std::size_t max_patches = 30;
    std::size_t dirs = 3;
    std::size_t files_per_dir = 4;
    std::size_t authors = 4;
    std::size_t reviewers = 5;
    std::size_t max_files = 6;
    std::size_t max_revisions = 3;
    std::size_t max_comments = 5;
    std::size_t max_lines = 6;
    std::int64_t max_gap = 3 * 86400; // seconds between submissions
};

inline std::string random_code_line(Rng& rng) {
    static const char* words[] = {"alpha", "beta", "gamma", "delta", "foo", "bar", "baz", "qux", "x", "i",
                                  "ptr", "size", "count", "value", "result", "init", "read", "write", "lock",
                                  "unlock", "buffer", "index", "node", "next"};
    static const char* glue[] = {" = ", "(", ")", "->", ".", " + ", ", ", "; ", " "};
    std::string line;
    const auto n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) line += glue[rng.below(std::size(glue))];
        if (rng.below(6) == 0) {
            line += std::to_string(rng.below(1000));
        } else {
            line += words[rng.below(std::size(words))];
        }
    }
    return line;
}

inline std::vector<std::string> random_lines(Rng& rng, std::size_t max_lines, bool allow_empty = true) {
    std::vector<std::string> out;
    const auto n = allow_empty ? rng.below(max_lines + 1) : 1 + rng.below(max_lines);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_code_line(rng));
    return out;
}

inline ChangedFile random_file(Rng& rng, const std::string& path, const RandomCorpusOptions& o) {
    ChangedFile f;
    f.path = path;
    const auto hunks = 1 + rng.below(2);
    for (std::size_t h = 0; h < hunks; ++h) {
        Hunk hunk;
        hunk.added = random_lines(rng, o.max_lines);
        hunk.removed = random_lines(rng, o.max_lines);
        if (hunk.added.empty() && hunk.removed.empty()) hunk.added.push_back(random_code_line(rng));
        hunk.context_before = random_lines(rng, 3);
        hunk.context_after = random_lines(rng, 3);
        f.hunks.push_back(std::move(hunk));
    }
    return f;
}

inline std::vector<std::string> path_pool(const RandomCorpusOptions& o) {
    std::vector<std::string> pool;
    for (std::size_t d = 0; d < o.dirs; ++d) {
        for (std::size_t f = 0; f < o.files_per_dir; ++f) {
            const auto name = "f" + std::to_string(f) + (f % 2 ? ".h" : ".cpp");
            pool.push_back(d == 0 ? name : "src/d" + std::to_string(d) + "/" + name);
        }
    }
    return pool;
}

/// Patches with random files, revisions and comments. Some comments are
/// general, some point at revision-only files or at files outside the patch,
/// and submissions occasionally share a timestamp.
inline Corpus random_corpus(Rng& rng, const RandomCorpusOptions& o = {}) {
    const auto pool = path_pool(o);
    const auto n = o.min_patches + rng.below(o.max_patches - o.min_patches + 1);
    Corpus corpus;
    std::int64_t t = 1'600'000'000;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.below(5) != 0) t += 1 + std::int64_t(rng.below(std::uint64_t(o.max_gap)));
        Patch p;
        p.patch_id = "p" + std::to_string(i);
        p.project = "synthetic";
        p.author_id = "a" + std::to_string(rng.below(o.authors));
        for (std::size_t r = 0, k = rng.below(4); r < k; ++r) {
            auto id = "r" + std::to_string(rng.below(o.reviewers));
            if (std::find(p.reviewer_ids.begin(), p.reviewer_ids.end(), id) == p.reviewer_ids.end())
                p.reviewer_ids.push_back(id);
        }
        std::sort(p.reviewer_ids.begin(), p.reviewer_ids.end());
        p.submitted_at = t;

        auto paths = pool;
        rng.shuffle(paths);
        paths.resize(1 + rng.below(std::min(o.max_files, pool.size())));

        Commit initial{p.patch_id + "-c0", CommitKind::initial, t, {}};
        for (const auto& path : paths) initial.files.push_back(random_file(rng, path, o));
        p.commits.push_back(std::move(initial));

        std::int64_t ct = t;
        std::vector<std::string> revision_only;
        for (std::size_t r = 0, k = rng.below(o.max_revisions + 1); r < k; ++r) {
            ct += std::int64_t(rng.below(7200));
            Commit c{p.patch_id + "-c" + std::to_string(r + 1), CommitKind::revision, ct, {}};
            std::vector<std::string> touched;
            for (const auto& path : paths)
                if (rng.below(3) == 0) touched.push_back(path);
            if (rng.below(4) == 0) {
                const auto& extra = pool[rng.below(pool.size())];
                if (std::find(touched.begin(), touched.end(), extra) == touched.end()) {
                    touched.push_back(extra);
                    if (std::find(paths.begin(), paths.end(), extra) == paths.end()) revision_only.push_back(extra);
                }
            }
            if (touched.empty()) touched.push_back(paths[rng.below(paths.size())]);
            for (const auto& path : touched) c.files.push_back(random_file(rng, path, o));
            p.commits.push_back(std::move(c));
        }

        for (std::size_t k = 0, m = rng.below(o.max_comments + 1); k < m; ++k) {
            ReviewComment rc;
            const auto& commit = p.commits[rng.below(p.commits.size())];
            rc.commit_id = commit.commit_id;
            rc.author_id = p.reviewer_ids.empty() ? "r0" : p.reviewer_ids[rng.below(p.reviewer_ids.size())];
            rc.timestamp = commit.timestamp + std::int64_t(rng.below(600));
            switch (rng.below(6)) {
            case 0: break; // general comment
            case 1: rc.file_path = pool[rng.below(pool.size())]; break;
            case 2:
                if (!revision_only.empty()) rc.file_path = revision_only[rng.below(revision_only.size())];
                break;
            default: rc.file_path = commit.files[rng.below(commit.files.size())].path; break;
            }
            if (rc.file_path && rng.below(2)) rc.line = 1 + std::int64_t(rng.below(200));
            p.comments.push_back(std::move(rc));
        }
        corpus.push_back(std::move(p));
    }
    sort_corpus(corpus);
    return corpus;
}

inline Corpus random_corpus(std::uint64_t seed, const RandomCorpusOptions& o = {}) {
    Rng rng(seed);
    return random_corpus(rng, o);
}

/// Corpus for ordering tests: every file's hot-spot label is decided by its
/// added-line count (more than `cutoff` added lines gets a revision), while
/// file names are random so the alphabetical order carries no signal. Patch
/// sizes cycle through 2..14 files so every size bucket is populated.
inline Corpus ordering_corpus(std::uint64_t seed, std::size_t patches, std::size_t cutoff = 12) {
    Rng rng(seed);
    Corpus corpus;
    std::int64_t t = 1'600'000'000;
    for (std::size_t i = 0; i < patches; ++i) {
        t += 3600;
        Patch p;
        p.patch_id = "o" + std::to_string(1000 + i);
        p.project = "ordering";
        p.author_id = "a" + std::to_string(rng.below(3));
        p.reviewer_ids = {"r" + std::to_string(rng.below(3))};
        p.submitted_at = t;
        const std::size_t size = 2 + (i % 13);
        Commit initial{p.patch_id + "-c0", CommitKind::initial, t, {}};
        Commit revision{p.patch_id + "-c1", CommitKind::revision, t + 60, {}};
        std::vector<std::string> names;
        while (names.size() < size) {
            std::string name;
            for (int c = 0; c < 6; ++c) name += char('a' + rng.below(26));
            name += ".cpp";
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
        }
        for (const auto& name : names) {
            ChangedFile f;
            f.path = name;
            Hunk h;
            const auto added = 1 + rng.below(2 * cutoff);
            for (std::size_t l = 0; l < added; ++l) h.added.push_back("v" + std::to_string(l) + " = w;");
            f.hunks.push_back(std::move(h));
            if (added > cutoff) {
                ChangedFile again;
                again.path = name;
                again.hunks.push_back(Hunk{{"fix();"}, {}, {}, {}});
                revision.files.push_back(std::move(again));
            }
            initial.files.push_back(std::move(f));
        }
        p.commits.push_back(std::move(initial));
        if (!revision.files.empty()) p.commits.push_back(std::move(revision));
        corpus.push_back(std::move(p));
    }
    return corpus;
}

} // namespace radar::testing

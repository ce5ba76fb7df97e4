#pragma once

// Slow, direct re-implementations used as references for the streaming and
// rank-based code paths. Nothing here shares code with the library beyond
// the data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "radar/corpus.hpp"
#include "radar/features.hpp"
#include "radar/labeling.hpp"

namespace radar::oracle {

// ---- labels: comments x files and revisions x files ------------------------

inline std::map<FileKey, FileLabels> brute_labels(const Corpus& corpus, CommentsScope scope = CommentsScope::any) {
    std::map<FileKey, FileLabels> out;
    for (const auto& p : corpus) {
        for (const auto& f : p.commits[0].files) {
            FileLabels l;
            for (const auto& c : p.comments) {
                if (!c.file_path || *c.file_path != f.path) continue;
                if (scope == CommentsScope::initial && c.commit_id != p.commits[0].commit_id) continue;
                l.commented = true;
            }
            for (std::size_t k = 1; k < p.commits.size(); ++k)
                for (const auto& g : p.commits[k].files)
                    if (g.path == f.path) l.revised = true;
            l.hot_spot = l.commented || l.revised;
            out[{p.patch_id, f.path}] = l;
        }
    }
    return out;
}

// ---- features: full re-scan of the history for every row -------------------

inline std::string dir_of(const std::string& path) {
    const auto slash = path.rfind('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

inline std::vector<FeatureVector> brute_features(const Corpus& corpus, const std::map<FileKey, FileLabels>& labels) {
    auto lab = [&](const Patch& p, const std::string& path, int k) {
        const auto& l = labels.at({p.patch_id, path});
        return k == 0 ? l.commented : k == 1 ? l.revised : l.hot_spot;
    };
    // Labelled fraction of p's files that satisfy keep.
    auto fraction = [&](const Patch& p, int k, auto keep) {
        double n = 0, hit = 0;
        for (const auto& f : p.commits[0].files) {
            if (!keep(f.path)) continue;
            n += 1;
            hit += lab(p, f.path, k) ? 1 : 0;
        }
        return n == 0 ? 0.0 : hit / n;
    };
    auto touches = [](const Patch& p, auto keep) {
        for (const auto& f : p.commits[0].files)
            if (keep(f.path)) return true;
        return false;
    };
    // exp and the three mean ratios over prior patches selected by `select`,
    // each contributing fraction(keep).
    auto history = [&](std::size_t upto, auto select, auto keep) {
        std::array<double, 4> out{}; // exp, r_commented, r_revised, r_hot_spot
        double n = 0;
        std::array<double, 3> sums{};
        for (std::size_t j = 0; j < upto; ++j) {
            const auto& q = corpus[j];
            if (!select(q)) continue;
            n += 1;
            for (int k = 0; k < 3; ++k) sums[k] += fraction(q, k, keep);
        }
        out[0] = n + 1;
        for (int k = 0; k < 3; ++k) out[k + 1] = n == 0 ? 0.0 : sums[k] / n;
        return out;
    };
    auto any = [](const std::string&) { return true; };

    std::vector<FeatureVector> rows;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& p = corpus[i];
        double add_rev = 0, rem_rev = 0, ctx_rev = 0;
        auto count = [](const ChangedFile& f, int which) {
            double n = 0;
            for (const auto& h : f.hunks) {
                if (which == 0) n += double(h.added.size());
                if (which == 1) n += double(h.removed.size());
                if (which == 2) n += double(h.context_before.size() + h.context_after.size());
            }
            return n;
        };
        for (const auto& f : p.commits[0].files) {
            add_rev += count(f, 0);
            rem_rev += count(f, 1);
            ctx_rev += count(f, 2);
        }
        for (const auto& f : p.commits[0].files) {
            FeatureVector v{};
            std::size_t x = 0;
            const double add = count(f, 0), rem = count(f, 1), ctx = count(f, 2);
            for (double d : {add, rem, ctx, add_rev, rem_rev, ctx_rev, add_rev ? add / add_rev : 0.0,
                             rem_rev ? rem / rem_rev : 0.0, ctx_rev ? ctx / ctx_rev : 0.0})
                v[x++] = d;

            const auto path = f.path;
            const auto dir = dir_of(path);
            auto is_file = [&](const std::string& s) { return s == path; };
            auto in_dir = [&](const std::string& s) { return dir_of(s) == dir; };
            const auto hf = history(i, [&](const Patch& q) { return touches(q, is_file); }, is_file);
            const auto hd = history(i, [&](const Patch& q) { return touches(q, in_dir); }, in_dir);
            v[x++] = hf[0];
            v[x++] = hd[0];
            for (int k = 1; k <= 3; ++k) v[x++] = hf[k];
            for (int k = 1; k <= 3; ++k) v[x++] = hd[k];

            const auto ha = history(i, [&](const Patch& q) { return q.author_id == p.author_id; }, any);
            const auto haf = history(
                i, [&](const Patch& q) { return q.author_id == p.author_id && touches(q, is_file); }, is_file);
            const auto had = history(
                i, [&](const Patch& q) { return q.author_id == p.author_id && touches(q, in_dir); }, in_dir);
            v[x++] = ha[0];
            v[x++] = haf[0];
            v[x++] = had[0];
            for (int k = 1; k <= 3; ++k) v[x++] = ha[k];
            for (int k = 1; k <= 3; ++k) v[x++] = haf[k];
            for (int k = 1; k <= 3; ++k) v[x++] = had[k];

            std::array<double, 4> mx{}, mean{};
            if (p.reviewer_ids.empty()) {
                mx[0] = mean[0] = 1.0;
            } else {
                for (const auto& r : p.reviewer_ids) {
                    const auto h = history(
                        i,
                        [&](const Patch& q) {
                            return std::find(q.reviewer_ids.begin(), q.reviewer_ids.end(), r) != q.reviewer_ids.end();
                        },
                        any);
                    for (int k = 0; k < 4; ++k) {
                        mx[k] = std::max(mx[k], h[k]);
                        mean[k] += h[k] / double(p.reviewer_ids.size());
                    }
                }
            }
            v[x++] = mx[0];
            v[x++] = mean[0];
            for (int k = 1; k <= 3; ++k) v[x++] = mx[k];
            for (int k = 1; k <= 3; ++k) v[x++] = mean[k];
            rows.push_back(v);
        }
    }
    return rows;
}

// ---- metrics ---------------------------------------------------------------

/// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
inline double pair_auc(std::span<const double> s, std::span<const std::uint8_t> y) {
    double good = 0, pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!y[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j]) continue;
            pairs += 1;
            good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    }
    return good / pairs;
}

inline double f1_at(std::span<const double> s, std::span<const std::uint8_t> y, double t) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool pred = s[i] >= t;
        tp += pred && y[i];
        fp += pred && !y[i];
        fn += !pred && y[i];
    }
    return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

// ---- statistics ------------------------------------------------------------

/// Two-sided signed-rank p-value by enumerating all 2^n sign patterns of the
/// non-zero differences (average ranks for tied magnitudes).
inline double wilcoxon_enumerated(std::span<const double> x, std::span<const double> y) {
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) d.push_back(x[i] - y[i]);
    const std::size_t n = d.size();
    if (n == 0) return 1.0;
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::fabs(d[j]) < std::fabs(d[i])) less += 1;
            if (std::fabs(d[j]) == std::fabs(d[i])) equal += 1;
        }
        rank[i] = less + (equal + 1) / 2;
    }
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) observed += rank[i];
    double lower = 0, upper = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) w += rank[i];
        if (w <= observed + 1e-9) lower += 1;
        if (w >= observed - 1e-9) upper += 1;
    }
    return std::min(1.0, 2 * std::min(lower, upper) / double(total));
}

inline double cliffs_pairs(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (double a : x)
        for (double b : y) s += a > b ? 1 : a < b ? -1 : 0;
    return s / double(x.size() * y.size());
}

// ---- ordering --------------------------------------------------------------

/// Expected Recall@k of a uniformly random order: hot-spots in the first k
/// follow a hypergeometric law.
inline double random_recall_expectation(std::size_t n, std::size_t h, std::size_t k) {
    auto choose = [](std::size_t a, std::size_t b) {
        if (b > a) return 0.0;
        double r = 1;
        for (std::size_t i = 1; i <= b; ++i) r = r * double(a - b + i) / double(i);
        return r;
    };
    double e = 0;
    const double all = choose(n, k);
    for (std::size_t x = 0; x <= std::min(h, k); ++x)
        e += double(x) * choose(h, x) * choose(n - h, k - x) / all;
    return e / double(std::min(h, k));
}

} // namespace radar::oracle

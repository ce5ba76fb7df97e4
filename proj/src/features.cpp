#include "radar/features.hpp"
#include "radar/error.hpp"
#include "radar/format.hpp"

#include <algorithm>
#include <set>

namespace radar {

const std::array<std::string, kFeatureCount>& feature_names() {
    static const auto names = [] {
        std::array<std::string, kFeatureCount> n;
        std::size_t i = 0;
        for (const char* base : {"c_add", "c_rem", "c_unchanged", "c_add_rev", "c_rem_rev", "c_unchanged_rev",
                                 "r_add_rev", "r_rem_rev", "r_unchanged_rev", "file_exp", "dir_exp"}) {
            n[i++] = base;
        }
        auto per_label = [&](const char* suffix) {
            for (auto l : kAllLabels) n[i++] = std::string("r_") + to_string(l) + "_" + suffix;
        };
        per_label("file");
        per_label("dir");
        n[i++] = "auth_exp";
        n[i++] = "authfile_exp";
        n[i++] = "authdir_exp";
        per_label("author");
        per_label("authfile");
        per_label("authdir");
        n[i++] = "max_reviewers_exp";
        n[i++] = "mean_reviewers_exp";
        per_label("max_reviewers");
        per_label("mean_reviewers");
        return n;
    }();
    return names;
}

std::size_t feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

namespace {

double ratio(double num, double den) {
    return den == 0.0 ? 0.0 : num / den;
}

} // namespace

std::array<double, kCountFeatureCount> count_features(const Patch& patch, const ChangedFile& file) {
    double add_rev = 0, rem_rev = 0, unchanged_rev = 0;
    for (const auto& f : patch.initial().files) {
        add_rev += double(f.added_lines());
        rem_rev += double(f.removed_lines());
        unchanged_rev += double(f.context_lines());
    }
    const double add = double(file.added_lines());
    const double rem = double(file.removed_lines());
    const double unchanged = double(file.context_lines());
    return {add,           rem,          unchanged,        add_rev,
            rem_rev,       unchanged_rev, ratio(add, add_rev), ratio(rem, rem_rev),
            ratio(unchanged, unchanged_rev)};
}

void HistoryState::Accumulator::add(const std::array<double, 3>& fractions) {
    ++patches;
    for (std::size_t k = 0; k < 3; ++k) ratio_sum[k] += fractions[k];
}

const HistoryState::Accumulator& HistoryState::lookup(const std::map<std::string, Accumulator>& m,
                                                      const std::string& key) {
    static const Accumulator empty;
    auto it = m.find(key);
    return it == m.end() ? empty : it->second;
}

const HistoryState::Accumulator& HistoryState::lookup(const std::map<PairKey, Accumulator>& m,
                                                      const PairKey& key) {
    static const Accumulator empty;
    auto it = m.find(key);
    return it == m.end() ? empty : it->second;
}

std::array<double, kFeatureCount - kCountFeatureCount> HistoryState::features(const Patch& patch,
                                                                                const ChangedFile& file) const {
    std::array<double, kFeatureCount - kCountFeatureCount> out{};
    std::size_t i = 0;
    const auto dir = parent_dir(file.path);

    const auto& f = lookup(file_, file.path);
    const auto& d = lookup(dir_, dir);
    out[i++] = double(f.patches + 1);
    out[i++] = double(d.patches + 1);
    for (std::size_t k = 0; k < 3; ++k) out[i++] = f.mean(k);
    for (std::size_t k = 0; k < 3; ++k) out[i++] = d.mean(k);

    const auto& a = lookup(author_, patch.author_id);
    const auto& af = lookup(author_file_, {patch.author_id, file.path});
    const auto& ad = lookup(author_dir_, {patch.author_id, dir});
    out[i++] = double(a.patches + 1);
    out[i++] = double(af.patches + 1);
    out[i++] = double(ad.patches + 1);
    for (std::size_t k = 0; k < 3; ++k) out[i++] = a.mean(k);
    for (std::size_t k = 0; k < 3; ++k) out[i++] = af.mean(k);
    for (std::size_t k = 0; k < 3; ++k) out[i++] = ad.mean(k);

    if (patch.reviewer_ids.empty()) {
        out[i++] = 1.0;
        out[i++] = 1.0;
        return out; // ratios stay 0
    }
    double max_exp = 0, sum_exp = 0;
    std::array<double, 3> max_ratio{}, sum_ratio{};
    for (const auto& r : patch.reviewer_ids) {
        const auto& acc = lookup(reviewer_, r);
        const double exp = double(acc.patches + 1);
        max_exp = std::max(max_exp, exp);
        sum_exp += exp;
        for (std::size_t k = 0; k < 3; ++k) {
            max_ratio[k] = std::max(max_ratio[k], acc.mean(k));
            sum_ratio[k] += acc.mean(k);
        }
    }
    const double n = double(patch.reviewer_ids.size());
    out[i++] = max_exp;
    out[i++] = sum_exp / n;
    for (std::size_t k = 0; k < 3; ++k) out[i++] = max_ratio[k];
    for (std::size_t k = 0; k < 3; ++k) out[i++] = sum_ratio[k] / n;
    return out;
}

void HistoryState::record(const Patch& patch, const LabelTable& labels) {
    struct Tally {
        std::size_t files = 0;
        std::array<std::size_t, 3> labelled{};

        std::array<double, 3> fractions() const {
            std::array<double, 3> out{};
            for (std::size_t k = 0; k < 3; ++k) out[k] = ratio(double(labelled[k]), double(files));
            return out;
        }
    };

    Tally whole;
    std::map<std::string, Tally> per_dir;
    for (const auto& f : patch.initial().files) {
        const auto& l = labels.at({patch.patch_id, f.path});
        Tally single;
        single.files = 1;
        auto& dir_tally = per_dir[parent_dir(f.path)];
        ++whole.files;
        ++dir_tally.files;
        for (std::size_t k = 0; k < 3; ++k) {
            const bool on = l.get(kAllLabels[k]);
            single.labelled[k] = on ? 1 : 0;
            whole.labelled[k] += on ? 1 : 0;
            dir_tally.labelled[k] += on ? 1 : 0;
        }
        file_[f.path].add(single.fractions());
        author_file_[{patch.author_id, f.path}].add(single.fractions());
    }
    for (const auto& [dir, tally] : per_dir) {
        dir_[dir].add(tally.fractions());
        author_dir_[{patch.author_id, dir}].add(tally.fractions());
    }
    author_[patch.author_id].add(whole.fractions());
    for (const auto& r : patch.reviewer_ids) reviewer_[r].add(whole.fractions());
}

void FeatureMatrix::push_back(FeatureRow row) {
    index.emplace(row.key, rows.size());
    rows.push_back(std::move(row));
}

const FeatureRow* FeatureMatrix::find(const FileKey& key) const {
    auto it = index.find(key);
    return it == index.end() ? nullptr : &rows[it->second];
}

FeatureMatrix extract_all(const Corpus& corpus, const LabelTable& labels) {
    FeatureMatrix matrix;
    HistoryState state;
    for (const auto& patch : corpus) {
        for (const auto& file : patch.initial().files) {
            FeatureRow row{{patch.patch_id, file.path}, {}};
            const auto counts = count_features(patch, file);
            const auto history = state.features(patch, file);
            std::copy(counts.begin(), counts.end(), row.values.begin());
            std::copy(history.begin(), history.end(), row.values.begin() + kCountFeatureCount);
            matrix.push_back(std::move(row));
        }
        state.record(patch, labels);
    }
    return matrix;
}

std::string features_to_csv(const FeatureMatrix& matrix) {
    std::string out = "patch_id,path";
    for (const auto& n : feature_names()) {
        out += ',';
        out += n;
    }
    out += '\n';
    for (const auto& row : matrix.rows) {
        out += csv_field(row.key.patch_id);
        out += ',';
        out += csv_field(row.key.path);
        for (double v : row.values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

} // namespace radar

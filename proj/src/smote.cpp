#include "radar/diagnostics.hpp"
#include "radar/error.hpp"
#include "radar/learning.hpp"
#include "radar/rng.hpp"

#include <algorithm>
#include <numeric>

namespace radar {
namespace {

double squared_distance(const DenseRow& a, const DenseRow& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

// k nearest minority neighbours of every minority row, ties broken by index.
std::vector<std::vector<std::size_t>> nearest_neighbours(std::span<const DenseRow> rows, std::size_t k) {
    const std::size_t m = rows.size();
    std::vector<std::vector<std::size_t>> out(m);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < m; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) dist.emplace_back(squared_distance(rows[i], rows[j]), j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        for (std::size_t n = 0; n < k; ++n) out[i].push_back(dist[n].second);
    }
    return out;
}

} // namespace

SmoteResult smote(std::span<const DenseRow> minority, std::size_t k, std::size_t n_synthetic, std::uint64_t seed) {
    SmoteResult result;
    if (n_synthetic == 0) return result;
    if (minority.size() < 2) {
        warn("TooFewMinority: SMOTE needs at least 2 minority rows, got " + std::to_string(minority.size()) +
             "; sampling skipped");
        return result;
    }
    const std::size_t dim = minority.front().size();
    for (const auto& r : minority) {
        if (r.size() != dim) throw DimensionMismatch("SMOTE rows have different widths");
    }
    k = std::clamp<std::size_t>(k, 1, minority.size() - 1);
    const auto neighbours = nearest_neighbours(minority, k);

    Rng rng(seed);
    result.rows.reserve(n_synthetic);
    result.parents.reserve(n_synthetic);
    for (std::size_t s = 0; s < n_synthetic; ++s) {
        const std::size_t base = rng.below(minority.size());
        const std::size_t nn = neighbours[base][rng.below(k)];
        const double u = rng.uniform();
        DenseRow row(dim);
        for (std::size_t j = 0; j < dim; ++j) row[j] = minority[base][j] + u * (minority[nn][j] - minority[base][j]);
        result.rows.push_back(std::move(row));
        result.parents.emplace_back(base, nn);
    }
    return result;
}

BalancedSet balance_with_smote(const SparseMatrix& x, std::span<const std::uint8_t> y, std::size_t k,
                               std::uint64_t seed) {
    BalancedSet out{SparseMatrix(x.cols()), std::vector<std::uint8_t>(y.begin(), y.end())};
    std::size_t positives = 0;
    for (auto v : y) positives += v ? 1 : 0;
    const std::size_t negatives = y.size() - positives;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto r = x.row(i);
        out.rows.append_row(SparseVector{{r.indices.begin(), r.indices.end()}, {r.values.begin(), r.values.end()}});
    }
    if (positives == negatives) return out;

    const std::uint8_t minority_label = positives < negatives ? 1 : 0;
    std::vector<DenseRow> minority;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (y[i] == minority_label) minority.push_back(x.dense_row(i));
    }
    const std::size_t deficit = std::max(positives, negatives) - std::min(positives, negatives);
    auto synthetic = smote(minority, k, deficit, seed);
    for (const auto& row : synthetic.rows) {
        out.rows.append_dense_row(row);
        out.labels.push_back(minority_label);
    }
    return out;
}

} // namespace radar

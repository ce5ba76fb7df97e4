#include "radar/sparse.hpp"
#include "radar/error.hpp"

#include <algorithm>

namespace radar {

void SparseMatrix::append_row(const SparseVector& row) {
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
        if (row.indices[k] >= cols_) throw DimensionMismatch("sparse row index out of range");
        if (k > 0 && row.indices[k] <= row.indices[k - 1]) throw InvalidArgument("sparse row indices not sorted");
        if (row.values[k] == 0.0) continue;
        col_.push_back(row.indices[k]);
        values_.push_back(row.values[k]);
    }
    row_ptr_.push_back(values_.size());
}

void SparseMatrix::append_dense_row(std::span<const double> row) {
    if (row.size() != cols_) throw DimensionMismatch("dense row has the wrong width");
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] == 0.0) continue;
        col_.push_back(static_cast<std::uint32_t>(j));
        values_.push_back(row[j]);
    }
    row_ptr_.push_back(values_.size());
}

RowView SparseMatrix::row(std::size_t i) const {
    const auto b = row_ptr_[i];
    const auto e = row_ptr_[i + 1];
    return {std::span<const std::uint32_t>(col_.data() + b, e - b), std::span<const double>(values_.data() + b, e - b)};
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto r = row(i);
    auto it = std::lower_bound(r.indices.begin(), r.indices.end(), static_cast<std::uint32_t>(j));
    if (it == r.indices.end() || *it != j) return 0.0;
    return r.values[static_cast<std::size_t>(it - r.indices.begin())];
}

void SparseMatrix::densify_row(std::size_t i, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const auto r = row(i);
    for (std::size_t k = 0; k < r.indices.size(); ++k) out[r.indices[k]] = r.values[k];
}

std::vector<double> SparseMatrix::dense_row(std::size_t i) const {
    std::vector<double> out(cols_);
    densify_row(i, out);
    return out;
}

} // namespace radar

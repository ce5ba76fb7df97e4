#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace radar {

/// Sorted column indices with matching non-zero values.
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;

    std::size_t nnz() const { return indices.size(); }
    bool operator==(const SparseVector&) const = default;
};

struct RowView {
    std::span<const std::uint32_t> indices;
    std::span<const double> values;
};

/// Row-major compressed storage. Explicit zeros are never stored.
class SparseMatrix {
public:
    explicit SparseMatrix(std::size_t cols = 0) : cols_(cols) {}

    std::size_t rows() const { return row_ptr_.size() - 1; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    void append_row(const SparseVector& row);
    void append_dense_row(std::span<const double> row);

    RowView row(std::size_t i) const;
    double at(std::size_t i, std::size_t j) const;
    void densify_row(std::size_t i, std::span<double> out) const;
    std::vector<double> dense_row(std::size_t i) const;

    bool operator==(const SparseMatrix&) const = default;

private:
    std::size_t cols_;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_;
    std::vector<double> values_;
};

} // namespace radar

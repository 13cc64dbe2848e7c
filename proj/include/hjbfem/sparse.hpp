#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hjb {

/// Compressed-row sparsity structure, shareable between matrices.
///
/// Rows may be a subset of the nodes (e.g. interior nodes only) while columns
/// range over all nodes; `row_node[r]` names the column that holds row r's own
/// node, so the diagonal of a rectangular operator is well defined.
struct SparsityPattern {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<int> col_indices;
    std::vector<int> row_node;
    std::vector<std::ptrdiff_t> diag_slot;  // -1 if the diagonal is not stored

    /// Slot index of (row, col), or -1.
    std::ptrdiff_t find(std::size_t row, int col) const;

    /// Builds a pattern from per-row column lists (sorted and de-duplicated here).
    static std::shared_ptr<const SparsityPattern> from_rows(std::vector<std::vector<int>> rows,
                                                            std::size_t n_cols,
                                                            std::vector<int> row_node);
};

class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(std::shared_ptr<const SparsityPattern> pattern);
    SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values);

    /// Dense row-major input; stores every non-zero plus each row's diagonal.
    static SparseMatrix from_dense(std::size_t n_rows, std::size_t n_cols, std::span<const double> dense,
                                   std::vector<int> row_node = {});

    std::size_t n_rows() const noexcept { return pattern_ ? pattern_->n_rows : 0; }
    std::size_t n_cols() const noexcept { return pattern_ ? pattern_->n_cols : 0; }
    std::size_t nnz() const noexcept { return values_.size(); }

    const SparsityPattern& pattern() const noexcept { return *pattern_; }
    const std::shared_ptr<const SparsityPattern>& pattern_ptr() const noexcept { return pattern_; }
    std::span<const std::size_t> row_offsets() const noexcept { return pattern_->row_offsets; }
    std::span<const int> col_indices() const noexcept { return pattern_->col_indices; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Stored value at (row, col), 0 when not stored.
    double coeff(std::size_t row, int col) const;
    double diagonal(std::size_t row) const;

    double row_dot(std::size_t row, std::span<const double> x) const;
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;

private:
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
};

}  // namespace hjb

#include "hjbfem/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hjbfem/errors.hpp"

namespace hjb {

std::ptrdiff_t SparsityPattern::find(std::size_t row, int col) const {
    const auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row]);
    const auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return -1;
    return it - col_indices.begin();
}

std::shared_ptr<const SparsityPattern> SparsityPattern::from_rows(std::vector<std::vector<int>> rows,
                                                                  std::size_t n_cols,
                                                                  std::vector<int> row_node) {
    auto p = std::make_shared<SparsityPattern>();
    p->n_rows = rows.size();
    p->n_cols = n_cols;
    if (row_node.empty()) {
        row_node.resize(rows.size());
        std::iota(row_node.begin(), row_node.end(), 0);
    }
    if (row_node.size() != rows.size()) throw InputError("row_node size does not match the row count");
    p->row_node = std::move(row_node);
    p->row_offsets.reserve(rows.size() + 1);
    p->row_offsets.push_back(0);
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        for (int c : r) {
            if (c < 0 || static_cast<std::size_t>(c) >= n_cols) throw InputError("column index out of range");
            p->col_indices.push_back(c);
        }
        p->row_offsets.push_back(p->col_indices.size());
    }
    p->diag_slot.resize(p->n_rows);
    for (std::size_t r = 0; r < p->n_rows; ++r) {
        p->diag_slot[r] = p->row_node[r] < 0 ? -1 : p->find(r, p->row_node[r]);
    }
    return p;
}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->col_indices.size(), 0.0) {}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
    if (values_.size() != pattern_->col_indices.size()) throw InputError("value count does not match the pattern");
}

SparseMatrix SparseMatrix::from_dense(std::size_t n_rows, std::size_t n_cols, std::span<const double> dense,
                                      std::vector<int> row_node) {
    if (dense.size() != n_rows * n_cols) throw InputError("dense matrix has the wrong size");
    if (row_node.empty()) {
        row_node.resize(n_rows);
        std::iota(row_node.begin(), row_node.end(), 0);
    }
    std::vector<std::vector<int>> rows(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (dense[r * n_cols + c] != 0.0 || static_cast<int>(c) == row_node[r]) {
                rows[r].push_back(static_cast<int>(c));
            }
        }
    }
    SparseMatrix m(SparsityPattern::from_rows(std::move(rows), n_cols, std::move(row_node)));
    const auto& p = m.pattern();
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t k = p.row_offsets[r]; k < p.row_offsets[r + 1]; ++k) {
            m.values_[k] = dense[r * n_cols + static_cast<std::size_t>(p.col_indices[k])];
        }
    }
    return m;
}

double SparseMatrix::coeff(std::size_t row, int col) const {
    const auto k = pattern_->find(row, col);
    return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

double SparseMatrix::diagonal(std::size_t row) const {
    const auto k = pattern_->diag_slot[row];
    return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

double SparseMatrix::row_dot(std::size_t row, std::span<const double> x) const {
    const auto& p = *pattern_;
    double sum = 0.0;
    for (std::size_t k = p.row_offsets[row]; k < p.row_offsets[row + 1]; ++k) {
        sum += values_[k] * x[static_cast<std::size_t>(p.col_indices[k])];
    }
    return sum;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < n_rows(); ++r) y[r] = row_dot(r, x);
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
    std::vector<double> y(n_rows());
    multiply(x, y);
    return y;
}

}  // namespace hjb

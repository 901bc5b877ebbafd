#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "dpgexp/types.hpp"

namespace dpgexp {

/// Compressed sparse row matrix with sorted column indices per row.
class CsrMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  CsrMatrix() = default;

  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<double> values)
      : rows_(rows),
        cols_(cols),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from unordered triplets; duplicate entries are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      require(e.row < rows && e.col < cols, "CsrMatrix: triplet out of range");
      if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
        values.back() += e.value;
        continue;
      }
      col_idx.push_back(e.col);
      values.push_back(e.value);
      ++row_ptr[e.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// y = A x
  void multiply(const double* x, double* y) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      double sum = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        sum += values_[k] * x[col_idx_[k]];
      y[i] = sum;
    }
  }

  Vector operator*(const Vector& x) const {
    require(static_cast<std::size_t>(x.size()) == cols_, "CsrMatrix: dimension mismatch");
    Vector y(rows_);
    multiply(x.data(), y.data());
    return y;
  }

  double at(std::size_t i, std::size_t j) const {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  }

  Vector diagonal() const {
    Vector d = Vector::Zero(std::min(rows_, cols_));
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = at(i, i);
    return d;
  }

  /// Maximum absolute column sum.
  double norm1() const {
    std::vector<double> colsum(cols_, 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) colsum[col_idx_[k]] += std::abs(values_[k]);
    return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
  }

  DenseMatrix to_dense() const {
    DenseMatrix m = DenseMatrix::Zero(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) m(i, col_idx_[k]) = values_[k];
    return m;
  }

  CsrMatrix transpose() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        t.push_back({col_idx_[k], i, values_[k]});
    return from_triplets(cols_, rows_, std::move(t));
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  void validate() const {
    require(row_ptr_.size() == rows_ + 1, "CsrMatrix: row_ptr must have rows+1 entries");
    require(row_ptr_.front() == 0, "CsrMatrix: row_ptr must start at 0");
    require(row_ptr_.back() == col_idx_.size() && col_idx_.size() == values_.size(),
            "CsrMatrix: row_ptr/col_idx/values size mismatch");
    for (std::size_t i = 0; i < rows_; ++i) {
      require(row_ptr_[i] <= row_ptr_[i + 1], "CsrMatrix: row_ptr not monotone");
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        require(col_idx_[k] < cols_, "CsrMatrix: column index out of range");
        require(k == row_ptr_[i] || col_idx_[k - 1] < col_idx_[k],
                "CsrMatrix: column indices must be strictly increasing within a row");
        require(std::isfinite(values_[k]), "CsrMatrix: non-finite entry");
      }
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace dpgexp

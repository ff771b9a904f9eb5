#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sketchpca {

/// Thrown when an iterative kernel fails to meet its tolerance and the
/// operation has no way to hand back a partial result.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the file loaders; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Immutable real matrix, either dense row-major or coordinate-sparse.
///
/// Construction validates: positive dimensions, finite values, in-range
/// indices, and no repeated coordinates in sparse form (duplicates are a
/// construction error, never silently summed).
class Matrix {
 public:
  static Matrix dense(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Matrix sparse(std::size_t rows, std::size_t cols, std::vector<Entry> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool sparse_storage() const { return sparse_; }

  /// Count of entries whose value is nonzero (independent of storage).
  std::size_t nnz() const { return nnz_; }
  /// Count of stored entries (m*n for dense, coordinate count for sparse).
  std::size_t stored() const { return sparse_ ? entries_.size() : values_.size(); }

  double at(std::size_t i, std::size_t j) const;

  const std::vector<double>& dense_values() const;
  const std::vector<Entry>& sparse_entries() const;

  template <typename F>
  void for_each_stored(F&& f) const {
    if (sparse_) {
      for (const Entry& e : entries_) f(e.row, e.col, e.value);
    } else {
      for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) f(i, j, values_[i * cols_ + j]);
    }
  }

  /// y = A x
  std::vector<double> apply(std::span<const double> x) const;
  /// y = A^T x
  std::vector<double> apply_transpose(std::span<const double> x) const;

  /// Row-major dense copy of the values.
  std::vector<double> to_dense() const;

 private:
  Matrix() = default;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t nnz_ = 0;
  bool sparse_ = false;
  std::vector<double> values_;   // dense storage
  std::vector<Entry> entries_;   // sparse storage, row-major sorted, unique
};

/// A^T (A x) without forming the Gram matrix; O(stored) per call.
std::vector<double> gram_apply(const Matrix& a, std::span<const double> x);

/// Subtract each column's mean. Output is dense (centering destroys sparsity).
Matrix center_columns(const Matrix& a);

}  // namespace sketchpca

#include "sketchpca/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sketchpca {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("matrix dimensions must be positive, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
}

void check_finite(double v, std::size_t i, std::size_t j) {
  if (!std::isfinite(v))
    throw std::invalid_argument("non-finite value at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
}

}  // namespace

Matrix Matrix::dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
  check_dims(rows, cols);
  if (values.size() != rows * cols)
    throw std::invalid_argument("dense storage size " + std::to_string(values.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.sparse_ = false;
  m.values_ = std::move(values);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = m.values_[i * cols + j];
      check_finite(v, i, j);
      if (v != 0.0) ++m.nnz_;
    }
  return m;
}

Matrix Matrix::sparse(std::size_t rows, std::size_t cols, std::vector<Entry> entries) {
  check_dims(rows, cols);
  for (const Entry& e : entries) {
    if (e.row >= rows || e.col >= cols)
      throw std::invalid_argument("coordinate (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ") out of range for " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
    check_finite(e.value, e.row, e.col);
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t t = 1; t < entries.size(); ++t) {
    if (entries[t].row == entries[t - 1].row && entries[t].col == entries[t - 1].col)
      throw std::invalid_argument("duplicate coordinate (" + std::to_string(entries[t].row) +
                                  ", " + std::to_string(entries[t].col) + ")");
  }
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.sparse_ = true;
  m.entries_ = std::move(entries);
  for (const Entry& e : m.entries_)
    if (e.value != 0.0) ++m.nnz_;
  return m;
}

double Matrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw std::invalid_argument("index out of range");
  if (!sparse_) return values_[i * cols_ + j];
  const Entry probe{i, j, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                             [](const Entry& a, const Entry& b) {
                               return a.row != b.row ? a.row < b.row : a.col < b.col;
                             });
  if (it != entries_.end() && it->row == i && it->col == j) return it->value;
  return 0.0;
}

const std::vector<double>& Matrix::dense_values() const {
  if (sparse_) throw std::logic_error("dense_values() on sparse matrix");
  return values_;
}

const std::vector<Entry>& Matrix::sparse_entries() const {
  if (!sparse_) throw std::logic_error("sparse_entries() on dense matrix");
  return entries_;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols_)
    throw std::invalid_argument("apply: vector length " + std::to_string(x.size()) +
                                " != cols " + std::to_string(cols_));
  std::vector<double> y(rows_, 0.0);
  if (sparse_) {
    for (const Entry& e : entries_) y[e.row] += e.value * x[e.col];
  } else {
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = values_.data() + i * cols_;
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
  }
  return y;
}

std::vector<double> Matrix::apply_transpose(std::span<const double> x) const {
  if (x.size() != rows_)
    throw std::invalid_argument("apply_transpose: vector length " + std::to_string(x.size()) +
                                " != rows " + std::to_string(rows_));
  std::vector<double> y(cols_, 0.0);
  if (sparse_) {
    for (const Entry& e : entries_) y[e.col] += e.value * x[e.row];
  } else {
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = values_.data() + i * cols_;
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
    }
  }
  return y;
}

std::vector<double> Matrix::to_dense() const {
  if (!sparse_) return values_;
  std::vector<double> out(rows_ * cols_, 0.0);
  for (const Entry& e : entries_) out[e.row * cols_ + e.col] = e.value;
  return out;
}

std::vector<double> gram_apply(const Matrix& a, std::span<const double> x) {
  return a.apply_transpose(a.apply(x));
}

Matrix center_columns(const Matrix& a) {
  std::vector<double> mean(a.cols(), 0.0);
  a.for_each_stored([&](std::size_t, std::size_t j, double v) { mean[j] += v; });
  for (double& m : mean) m /= static_cast<double>(a.rows());
  std::vector<double> values(a.rows() * a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) values[i * a.cols() + j] = -mean[j];
  a.for_each_stored(
      [&](std::size_t i, std::size_t j, double v) { values[i * a.cols() + j] += v; });
  return Matrix::dense(a.rows(), a.cols(), std::move(values));
}

}  // namespace sketchpca

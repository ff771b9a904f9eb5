#include "sketchpca/io.hpp"

#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sketchpca {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix load_matrixmarket(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, fmt, field, symmetry;
  header >> banner >> object >> fmt >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || fmt != "coordinate" ||
      field != "real" || symmetry != "general")
    fail(path, 1, "expected header '%%MatrixMarket matrix coordinate real general'");

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    break;
  }
  std::size_t rows = 0, cols = 0, count = 0;
  {
    std::istringstream dims(line);
    if (!(dims >> rows >> cols >> count)) fail(path, lineno, "expected 'rows cols nnz'");
  }
  std::vector<Entry> entries;
  entries.reserve(count);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream row(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(row >> i >> j >> v)) fail(path, lineno, "expected 'i j value'");
    if (i < 1 || j < 1) fail(path, lineno, "indices are 1-based");
    entries.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v});
  }
  if (entries.size() != count)
    throw ParseError(path + ": entry count " + std::to_string(entries.size()) +
                     " does not match declared " + std::to_string(count));
  return Matrix::sparse(rows, cols, std::move(entries));
}

Matrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<double> values;
  std::size_t rows = 0, cols = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) fail(path, lineno, "bad number near column " +
                                                    std::to_string(p - line.data() + 1));
      values.push_back(v);
      ++row_cols;
      p = next;
      if (p < end) {
        if (*p != ',') fail(path, lineno, "expected ',' near column " +
                                              std::to_string(p - line.data() + 1));
        ++p;
      }
    }
    if (cols == 0)
      cols = row_cols;
    else if (row_cols != cols)
      fail(path, lineno, "row has " + std::to_string(row_cols) + " fields, expected " +
                             std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw ParseError(path + ": empty file");
  return Matrix::dense(rows, cols, std::move(values));
}

}  // namespace

Matrix load_matrix(const std::string& path, const std::string& format) {
  if (format == "matrixmarket" || format == "mm" || format == "mtx")
    return load_matrixmarket(path);
  if (format == "csv" || format == "csv-dense") return load_csv(path);
  throw std::invalid_argument("load_matrix: unknown format '" + format + "'");
}

void save_matrix(const Matrix& a, const std::string& path, const std::string& format) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  if (format == "matrixmarket" || format == "mm" || format == "mtx") {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
    a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
      if (v != 0.0) out << (i + 1) << " " << (j + 1) << " " << format_value(v) << "\n";
    });
  } else if (format == "csv" || format == "csv-dense") {
    const std::vector<double> values = a.to_dense();
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (j) out << ",";
        out << format_value(values[i * a.cols() + j]);
      }
      out << "\n";
    }
  } else {
    throw std::invalid_argument("save_matrix: unknown format '" + format + "'");
  }
  if (!out.flush()) throw ParseError(path + ": write failed");
}

}  // namespace sketchpca

#pragma once

#include <string>

#include "sketchpca/matrix.hpp"

namespace sketchpca {

/// Formats: "matrixmarket" (coordinate real general, 1-based) and "csv"
/// (dense, one row per line, no header). Parse failures throw ParseError
/// naming the line.
Matrix load_matrix(const std::string& path, const std::string& format);

/// Write with full round-trip precision. MatrixMarket stores nonzeros only;
/// CSV stores the dense grid.
void save_matrix(const Matrix& a, const std::string& path, const std::string& format);

}  // namespace sketchpca

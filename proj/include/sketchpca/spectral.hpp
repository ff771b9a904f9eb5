#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sketchpca/matrix.hpp"

namespace sketchpca {

struct SpectralSummary {
  double spectral_norm = 0.0;
  double frobenius_norm = 0.0;
  double l1_norm = 0.0;
  double min_singular = 0.0;  // 0 when skipped
  bool min_singular_computed = false;
  double stable_rank = 1.0;  // frobenius^2 / spectral^2; 1 for the zero matrix
};

/// Norms of `a`. The spectral norm comes from power iteration on the Gram
/// operator; min_singular (the min(m,n)-th singular value) is computed only
/// when requested, by shifted power iteration on the small-side Gram.
SpectralSummary norms(const Matrix& a, bool compute_min_singular = false,
                      std::uint64_t seed = 0);

struct OperatorEig {
  double value = 0.0;
  std::vector<double> vector;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Dominant eigenvalue of a symmetric PSD operator by seeded power iteration.
/// Stops when the relative Rayleigh-quotient change and the residual
/// ||op(v) - lambda v|| both fall below tol (residual measured against
/// max(|lambda|, ref_scale)).
OperatorEig dominant_eigenvalue(
    const std::function<std::vector<double>(std::span<const double>)>& op,
    std::size_t dim, double tol, std::size_t max_iter, std::uint64_t seed,
    double ref_scale = 0.0);

struct SingularTriplet {
  double sigma = 0.0;
  std::vector<double> left;   // length m
  std::vector<double> right;  // length n
};

struct SvdResult {
  std::vector<SingularTriplet> triplets;
  bool converged = true;
  std::size_t iterations = 0;  // total across triplets
};

/// Top-k singular triplets via power iteration on the Gram operator with
/// projection deflation. Deterministic given seed; right vectors carry the
/// sign convention (largest-magnitude coordinate nonnegative). On
/// non-convergence the best iterate is returned with converged = false.
SvdResult top_singular_triplets(const Matrix& a, std::size_t k, double tol = 1e-8,
                                std::size_t max_iter = 5000, std::uint64_t seed = 0);

struct SymEigResult {
  std::size_t n = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column-major; vectors[i + j*n] = i-th comp of j-th
};

/// Full eigendecomposition of a small dense symmetric matrix (cyclic Jacobi).
/// `g` is row-major n*n and assumed symmetric.
SymEigResult sym_eig_dense(std::vector<double> g, std::size_t n);

/// Smallest eigenvalue of the small-side Gram (= squared min(m,n)-th singular
/// value), computed exactly via the dense Jacobi path. Intended for small
/// matrices; cost O(min(m,n)^2 * max + jacobi).
double min_singular_sq_exact(const Matrix& a);

}  // namespace sketchpca

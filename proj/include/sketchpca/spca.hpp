#pragma once

#include <cstdint>
#include <vector>

#include "sketchpca/matrix.hpp"

namespace sketchpca {

enum class SpcaMethod { Exact, MaxR, IterSparse, BruteForce };

/// k loading columns of length dim, each unit-norm with at most r nonzeros
/// (r = dim means unconstrained). Columns of sparse methods are not
/// guaranteed mutually orthogonal.
struct ComponentSet {
  std::size_t dim = 0;
  std::size_t k = 0;
  std::size_t r = 0;
  SpcaMethod method = SpcaMethod::Exact;
  std::vector<std::vector<double>> columns;
  bool converged = true;
};

/// Top-k right singular vectors. Throws ConvergenceError when the iteration
/// fails to meet its tolerance.
ComponentSet exact_pca(const Matrix& a, std::size_t k, std::uint64_t seed = 0);

/// Keep the r largest-magnitude entries per column (ties to the lower
/// index), zero the rest, rescale to unit norm.
ComponentSet truncate_components(const ComponentSet& v, std::size_t r);

/// Truncated power iteration on the Gram operator with projection deflation
/// for k > 1. Runs `restarts` random starts plus a warm start at the
/// truncated exact component; keeps the best objective (ties to the lowest
/// start index). Never throws on convergence trouble; the flag reports it.
ComponentSet iter_sparse_pca(const Matrix& a, std::size_t k, std::size_t r,
                             std::size_t restarts = 8, double tol = 1e-9,
                             std::size_t max_iter = 2000, std::uint64_t seed = 0);

/// Exact r-sparse maximizer by support enumeration (k = 1), extended to
/// k = 2 greedily: exact second component on the deflated operator given the
/// first. Guarded to n <= 16, C(n, r) <= 10^4, k <= 2.
ComponentSet brute_force_spca(const Matrix& a, std::size_t k, std::size_t r);

/// f(V) = sum over columns v of ||A v||^2, always against the matrix passed
/// here (callers evaluate sketch-derived components against the original).
double variance(const Matrix& a, const ComponentSet& v);

struct RecoveryGap {
  double lhs_deficit = 0.0;  // f(A, best-of-A) - f(A, best-of-sketch)
  double bound = 0.0;        // 2 k ||A^T A - sketch^T sketch||_2
};

/// Compare optimal components of `a` and of `sketch` (both by brute force),
/// evaluated on `a`, against the spectral-deviation bound.
RecoveryGap recovery_gap(const Matrix& a, const Matrix& sketch, std::size_t k, std::size_t r,
                         std::uint64_t seed = 0);

}  // namespace sketchpca

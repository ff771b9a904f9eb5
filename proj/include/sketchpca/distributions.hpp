#pragma once

#include <cstdint>
#include <vector>

#include "sketchpca/matrix.hpp"

namespace sketchpca {

enum class DistributionKind { Hybrid, Uniform, Leverage };
enum class SupportKind { NonzerosOnly, AllEntries };

/// Probability table over matrix entries. The table covers exactly the
/// distribution's support and sums to 1.
struct SamplingDistribution {
  DistributionKind kind = DistributionKind::Uniform;
  double alpha = 0.0;      // hybrid only
  std::size_t rank = 0;    // leverage only
  SupportKind support = SupportKind::AllEntries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Entry> table;  // (i, j, p)
};

/// p_ij = alpha |A_ij| / ||A||_1 + (1 - alpha) A_ij^2 / ||A||_F^2 over the
/// nonzero entries of A. alpha in (0, 1].
SamplingDistribution hybrid_probabilities(const Matrix& a, double alpha);

/// p_ij = 1/(m n) over every position (default), or 1/nnz over the nonzeros
/// when nonzeros_only is set.
SamplingDistribution uniform_probabilities(const Matrix& a, bool nonzeros_only = false);

struct LeverageScores {
  std::vector<double> row_scores;  // squared row norms of the m x rank left factor
  std::vector<double> col_scores;  // squared row norms of the n x rank right factor
  std::size_t rank = 0;
};

/// Scores from the top-`rank` singular triplets of A. Throws ConvergenceError
/// if the underlying iteration fails.
LeverageScores leverage_scores(const Matrix& a, std::size_t rank, std::uint64_t seed = 0);

/// p_ij = (row_i + col_j) / (2 (m+n) rank) + 1/(2 m n) over all positions.
SamplingDistribution leverage_probabilities(const LeverageScores& scores, std::size_t rows,
                                            std::size_t cols);

}  // namespace sketchpca

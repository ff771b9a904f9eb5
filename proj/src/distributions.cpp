#include "sketchpca/distributions.hpp"

#include <cmath>
#include <string>

#include "sketchpca/spectral.hpp"

namespace sketchpca {

SamplingDistribution hybrid_probabilities(const Matrix& a, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("hybrid_probabilities: alpha must be in (0, 1], got " +
                                std::to_string(alpha));
  if (a.nnz() == 0)
    throw std::invalid_argument("hybrid_probabilities: zero matrix has no support");
  double l1 = 0.0, fro2 = 0.0;
  a.for_each_stored([&](std::size_t, std::size_t, double v) {
    l1 += std::fabs(v);
    fro2 += v * v;
  });
  SamplingDistribution dist;
  dist.kind = DistributionKind::Hybrid;
  dist.alpha = alpha;
  dist.support = SupportKind::NonzerosOnly;
  dist.rows = a.rows();
  dist.cols = a.cols();
  dist.table.reserve(a.nnz());
  a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
    if (v == 0.0) return;
    const double p = alpha * std::fabs(v) / l1 + (1.0 - alpha) * v * v / fro2;
    dist.table.push_back({i, j, p});
  });
  return dist;
}

SamplingDistribution uniform_probabilities(const Matrix& a, bool nonzeros_only) {
  SamplingDistribution dist;
  dist.kind = DistributionKind::Uniform;
  dist.rows = a.rows();
  dist.cols = a.cols();
  if (nonzeros_only) {
    if (a.nnz() == 0)
      throw std::invalid_argument("uniform_probabilities: zero matrix has no nonzero support");
    dist.support = SupportKind::NonzerosOnly;
    const double p = 1.0 / static_cast<double>(a.nnz());
    dist.table.reserve(a.nnz());
    a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
      if (v != 0.0) dist.table.push_back({i, j, p});
    });
  } else {
    dist.support = SupportKind::AllEntries;
    const double p = 1.0 / (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
    dist.table.reserve(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) dist.table.push_back({i, j, p});
  }
  return dist;
}

LeverageScores leverage_scores(const Matrix& a, std::size_t rank, std::uint64_t seed) {
  if (rank == 0 || rank > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("leverage_scores: rank out of range");
  const SvdResult svd = top_singular_triplets(a, rank, 1e-8, 5000, seed);
  if (!svd.converged)
    throw ConvergenceError("leverage_scores: singular triplet iteration did not converge");
  LeverageScores scores;
  scores.rank = rank;
  scores.row_scores.assign(a.rows(), 0.0);
  scores.col_scores.assign(a.cols(), 0.0);
  for (const SingularTriplet& t : svd.triplets) {
    for (std::size_t i = 0; i < a.rows(); ++i) scores.row_scores[i] += t.left[i] * t.left[i];
    for (std::size_t j = 0; j < a.cols(); ++j)
      scores.col_scores[j] += t.right[j] * t.right[j];
  }
  return scores;
}

SamplingDistribution leverage_probabilities(const LeverageScores& scores, std::size_t rows,
                                            std::size_t cols) {
  if (scores.row_scores.size() != rows || scores.col_scores.size() != cols)
    throw std::invalid_argument("leverage_probabilities: scores do not match shape");
  SamplingDistribution dist;
  dist.kind = DistributionKind::Leverage;
  dist.rank = scores.rank;
  dist.support = SupportKind::AllEntries;
  dist.rows = rows;
  dist.cols = cols;
  const double denom = 2.0 * static_cast<double>(rows + cols) * static_cast<double>(scores.rank);
  const double floor_p = 0.5 / (static_cast<double>(rows) * static_cast<double>(cols));
  dist.table.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double p = (scores.row_scores[i] + scores.col_scores[j]) / denom + floor_p;
      dist.table.push_back({i, j, p});
    }
  return dist;
}

}  // namespace sketchpca

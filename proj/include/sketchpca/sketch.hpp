#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sketchpca/distributions.hpp"
#include "sketchpca/matrix.hpp"
#include "sketchpca/rng.hpp"

namespace sketchpca {

/// Walker/Vose alias table; O(n) build, O(1) per draw.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);

  std::size_t draw(Rng& rng) const;
  std::size_t size() const { return accept_.size(); }

 private:
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

struct SketchResult {
  Matrix sketch;
  std::size_t samples = 0;  // s
  std::uint64_t seed = 0;
  DistributionKind kind = DistributionKind::Uniform;
  double alpha = 0.0;
  std::size_t distinct_entries_hit = 0;
};

/// s i.i.d. categorical draws from `dist`, each adding A_ij / (s p_ij) to the
/// sketch entry; repeated hits accumulate. The trial sequence is partitioned
/// into fixed-size blocks with seed-derived streams, so the result is
/// identical for any `threads` value (blocks merge in index order).
SketchResult sample_sketch(const Matrix& a, const SamplingDistribution& dist, std::size_t s,
                           std::uint64_t seed, unsigned threads = 1);

/// Keep entries with |A_ij| >= delta verbatim, zero the rest.
Matrix threshold_sketch(const Matrix& a, double delta);

struct ThresholdChoice {
  double delta = 0.0;
  double lost_energy = 0.0;  // sum of squared zeroed entries
};

/// Largest cutoff from the sorted distinct entry magnitudes whose zeroed-out
/// energy stays within eps^2 ||A||_F^2 / stable_rank. Exact scan over the
/// candidate thresholds with a prefix sum of squares.
ThresholdChoice select_threshold(const Matrix& a, double eps, std::uint64_t seed = 0);

struct SpectralDeviation {
  double op_norm_diff = 0.0;  // ||A - B||_2
  double gram_diff = 0.0;     // ||A^T A - B^T B||_2
};

/// Both deviation norms by power iteration on the corresponding PSD
/// operators; the Gram difference is indefinite, so its norm comes from the
/// squared operator (dominant eigenvalue = gram_diff^2).
SpectralDeviation spectral_deviation(const Matrix& a, const Matrix& b,
                                     std::uint64_t seed = 0);

}  // namespace sketchpca

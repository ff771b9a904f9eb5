#pragma once

#include <cstdint>
#include <vector>

#include "sketchpca/matrix.hpp"

namespace sketchpca {

/// Per-nonzero variance proxy: xi_ij = ||A||_F^2 / (alpha ||A||_F^2 /
/// (|A_ij| ||A||_1) + (1 - alpha)). Satisfies xi_ij * p_ij = A_ij^2 with the
/// hybrid probabilities at the same alpha.
std::vector<Entry> xi_table(const Matrix& a, double alpha);

/// max{max_i sum_j xi_ij, max_j sum_i xi_ij} - sigma_min_sq.
double rho_squared(const Matrix& a, double alpha, double sigma_min_sq);

/// max over nonzeros of ||A||_1 / (alpha + (1-alpha) ||A||_1 |A_ij| /
/// ||A||_F^2) plus ||A||_2. The max is attained at the smallest |A_ij|.
double gamma_bound(const Matrix& a, double alpha, std::uint64_t seed = 0);

struct MixingProfile {
  std::vector<double> alpha_grid;
  std::vector<double> objective_values;  // same length as alpha_grid
  double alpha_star = 0.0;
  double objective_at_star = 0.0;
  double rho2_at_star = 0.0;
  double gamma_at_star = 0.0;
  double eps = 0.0;
  double sigma_min_sq = 0.0;  // 0 when skipped
  bool sigma_min_exact = false;
  double spectral_norm = 0.0;
};

/// Minimize rho^2(alpha) + gamma(alpha) eps ||A||_2 / 3 over a uniform grid,
/// then refine by golden-section search in the bracketing interval (ties
/// toward the smallest alpha). sigma_min_sq < 0 requests the automatic
/// policy: exact dense value when min(m, n) <= 64, else 0 (conservative).
MixingProfile optimize_alpha(const Matrix& a, double eps, double grid_lo = 0.01,
                             double grid_hi = 1.0, std::size_t grid_steps = 100,
                             double sigma_min_sq = -1.0, std::uint64_t seed = 0);

/// ceil((2 k^2 / eps^2) (rho2 + eps gamma / (3k)) log((m+n)/delta)).
std::size_t sample_complexity(double rho2, double gamma, double eps, double delta,
                              std::size_t m, std::size_t n, std::size_t k);

}  // namespace sketchpca

#include "sketchpca/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sketchpca/spectral.hpp"

namespace sketchpca {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("alpha must be in (0, 1], got " + std::to_string(alpha));
}

struct EntryStats {
  std::vector<std::size_t> rows, cols;
  std::vector<double> mags;  // |A_ij| over nonzeros
  double l1 = 0.0;
  double fro2 = 0.0;
  double min_mag = std::numeric_limits<double>::infinity();
  std::size_t m = 0, n = 0;
};

EntryStats collect_stats(const Matrix& a) {
  if (a.nnz() == 0) throw std::invalid_argument("zero matrix");
  EntryStats st;
  st.m = a.rows();
  st.n = a.cols();
  st.rows.reserve(a.nnz());
  st.cols.reserve(a.nnz());
  st.mags.reserve(a.nnz());
  a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
    if (v == 0.0) return;
    const double mag = std::fabs(v);
    st.rows.push_back(i);
    st.cols.push_back(j);
    st.mags.push_back(mag);
    st.l1 += mag;
    st.fro2 += v * v;
    st.min_mag = std::min(st.min_mag, mag);
  });
  return st;
}

double xi_value(const EntryStats& st, double mag, double alpha) {
  return st.fro2 / (alpha * st.fro2 / (mag * st.l1) + (1.0 - alpha));
}

double rho_squared_stats(const EntryStats& st, double alpha, double sigma_min_sq) {
  std::vector<double> row_sum(st.m, 0.0), col_sum(st.n, 0.0);
  for (std::size_t t = 0; t < st.mags.size(); ++t) {
    const double xi = xi_value(st, st.mags[t], alpha);
    row_sum[st.rows[t]] += xi;
    col_sum[st.cols[t]] += xi;
  }
  const double max_row = *std::max_element(row_sum.begin(), row_sum.end());
  const double max_col = *std::max_element(col_sum.begin(), col_sum.end());
  return std::max(max_row, max_col) - sigma_min_sq;
}

double gamma_stats(const EntryStats& st, double alpha, double spectral) {
  // Denominator is increasing in |A_ij|, so the max sits at the smallest
  // nonzero magnitude.
  const double denom = alpha + (1.0 - alpha) * st.l1 * st.min_mag / st.fro2;
  return st.l1 / denom + spectral;
}

}  // namespace

std::vector<Entry> xi_table(const Matrix& a, double alpha) {
  check_alpha(alpha);
  const EntryStats st = collect_stats(a);
  std::vector<Entry> table;
  table.reserve(st.mags.size());
  for (std::size_t t = 0; t < st.mags.size(); ++t)
    table.push_back({st.rows[t], st.cols[t], xi_value(st, st.mags[t], alpha)});
  return table;
}

double rho_squared(const Matrix& a, double alpha, double sigma_min_sq) {
  check_alpha(alpha);
  if (sigma_min_sq < 0.0)
    throw std::invalid_argument("rho_squared: sigma_min_sq must be >= 0");
  return rho_squared_stats(collect_stats(a), alpha, sigma_min_sq);
}

double gamma_bound(const Matrix& a, double alpha, std::uint64_t seed) {
  check_alpha(alpha);
  const EntryStats st = collect_stats(a);
  return gamma_stats(st, alpha, norms(a, false, seed).spectral_norm);
}

MixingProfile optimize_alpha(const Matrix& a, double eps, double grid_lo, double grid_hi,
                             std::size_t grid_steps, double sigma_min_sq,
                             std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("optimize_alpha: eps must be positive");
  if (!(grid_lo > 0.0) || !(grid_lo < grid_hi) || grid_hi > 1.0)
    throw std::invalid_argument("optimize_alpha: need 0 < grid_lo < grid_hi <= 1");
  if (grid_steps < 2) throw std::invalid_argument("optimize_alpha: grid_steps must be >= 2");

  const EntryStats st = collect_stats(a);
  MixingProfile profile;
  profile.eps = eps;
  profile.spectral_norm = norms(a, false, seed).spectral_norm;
  if (sigma_min_sq < 0.0) {
    if (std::min(a.rows(), a.cols()) <= 64) {
      profile.sigma_min_sq = min_singular_sq_exact(a);
      profile.sigma_min_exact = true;
    } else {
      profile.sigma_min_sq = 0.0;  // conservative skip
    }
  } else {
    profile.sigma_min_sq = sigma_min_sq;
  }

  auto objective = [&](double alpha) {
    return rho_squared_stats(st, alpha, profile.sigma_min_sq) +
           gamma_stats(st, alpha, profile.spectral_norm) * eps * profile.spectral_norm / 3.0;
  };

  profile.alpha_grid.resize(grid_steps);
  profile.objective_values.resize(grid_steps);
  const double step = (grid_hi - grid_lo) / static_cast<double>(grid_steps - 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid_steps; ++i) {
    const double alpha = i + 1 == grid_steps ? grid_hi : grid_lo + step * static_cast<double>(i);
    profile.alpha_grid[i] = alpha;
    profile.objective_values[i] = objective(alpha);
    if (profile.objective_values[i] < profile.objective_values[best]) best = i;
  }

  double best_alpha = profile.alpha_grid[best];
  double best_value = profile.objective_values[best];
  auto consider = [&](double alpha, double value) {
    if (value < best_value || (value == best_value && alpha < best_alpha)) {
      best_alpha = alpha;
      best_value = value;
    }
  };

  // Golden-section refinement in the bracket around the best grid point;
  // equal comparisons shrink toward the left end (ties to smaller alpha).
  // The objective is a max of per-row/column sums, so its minimum can sit on
  // a kink; the interval is driven to 1e-8 to pin the value there.
  double lo = profile.alpha_grid[best > 0 ? best - 1 : 0];
  double hi = profile.alpha_grid[std::min(best + 1, grid_steps - 1)];
  constexpr double kInvPhi = 0.6180339887498948482;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  consider(x1, f1);
  consider(x2, f2);
  while (hi - lo > 1e-8) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
      consider(x2, f2);
    }
  }

  profile.alpha_star = best_alpha;
  profile.objective_at_star = best_value;
  profile.rho2_at_star = rho_squared_stats(st, best_alpha, profile.sigma_min_sq);
  profile.gamma_at_star = gamma_stats(st, best_alpha, profile.spectral_norm);
  return profile;
}

std::size_t sample_complexity(double rho2, double gamma, double eps, double delta,
                              std::size_t m, std::size_t n, std::size_t k) {
  if (!(rho2 > 0.0) || !(gamma > 0.0) || !(eps > 0.0) || !(delta > 0.0) || k == 0)
    throw std::invalid_argument("sample_complexity: parameters must be strictly positive");
  if (delta >= static_cast<double>(m + n))
    throw std::invalid_argument("sample_complexity: delta must be < m + n");
  const double kd = static_cast<double>(k);
  const double bound = (2.0 * kd * kd / (eps * eps)) * (rho2 + eps * gamma / (3.0 * kd)) *
                       std::log(static_cast<double>(m + n) / delta);
  return static_cast<std::size_t>(std::ceil(bound));
}

}  // namespace sketchpca

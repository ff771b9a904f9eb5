#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "sketchpca/distributions.hpp"
#include "sketchpca/generate.hpp"
#include "sketchpca/mixing.hpp"
#include "sketchpca/spectral.hpp"

using namespace sketchpca;

namespace {

Matrix diag34() { return Matrix::dense(2, 2, {3, 0, 0, 4}); }

double xi_at(const std::vector<Entry>& table, std::size_t i, std::size_t j) {
  for (const Entry& e : table)
    if (e.row == i && e.col == j) return e.value;
  FAIL("missing xi entry");
  return 0.0;
}

// Direct re-evaluation of the bound objective on one alpha, written from the
// displayed formulas without the library's shared-stats shortcuts.
double objective_oracle(const Matrix& a, double alpha, double eps, double spectral,
                        double sigma_min_sq) {
  double l1 = 0.0, fro2 = 0.0;
  a.for_each_stored([&](std::size_t, std::size_t, double v) {
    l1 += std::fabs(v);
    fro2 += v * v;
  });
  std::vector<double> row_sum(a.rows(), 0.0), col_sum(a.cols(), 0.0);
  double gamma_max = 0.0;
  a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
    if (v == 0.0) return;
    const double mag = std::fabs(v);
    const double xi = fro2 / (alpha * fro2 / (mag * l1) + (1.0 - alpha));
    row_sum[i] += xi;
    col_sum[j] += xi;
    gamma_max = std::max(gamma_max, l1 / (alpha + (1.0 - alpha) * l1 * mag / fro2));
  });
  double peak = 0.0;
  for (double s : row_sum) peak = std::max(peak, s);
  for (double s : col_sum) peak = std::max(peak, s);
  const double rho2 = peak - sigma_min_sq;
  return rho2 + (gamma_max + spectral) * eps * spectral / 3.0;
}

}  // namespace

TEST_CASE("xi collapses to |A_ij| l1 at alpha = 1") {
  const std::vector<Entry> table = xi_table(diag34(), 1.0);
  CHECK(xi_at(table, 0, 0) == doctest::Approx(21.0).epsilon(1e-12));
  CHECK(xi_at(table, 1, 1) == doctest::Approx(28.0).epsilon(1e-12));
}

TEST_CASE("xi is constant across alpha for equal magnitudes") {
  const Matrix flat = Matrix::dense(2, 2, {2, -2, -2, 2});
  for (double alpha : {0.2, 0.6, 1.0}) {
    const std::vector<Entry> table = xi_table(flat, alpha);
    for (const Entry& e : table) CHECK(e.value == doctest::Approx(4.0 * 4).epsilon(1e-12));
  }
}

TEST_CASE("xi times the hybrid probability gives the squared entry") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Matrix a = oracle::random_dense(6, 5, 40 + seed);
    for (double alpha : {0.1, 0.5, 1.0}) {
      const std::vector<Entry> xis = xi_table(a, alpha);
      const SamplingDistribution probs = hybrid_probabilities(a, alpha);
      REQUIRE(xis.size() == probs.table.size());
      for (std::size_t t = 0; t < xis.size(); ++t) {
        const double aij = a.at(xis[t].row, xis[t].col);
        CHECK(xis[t].value * probs.table[t].value ==
              doctest::Approx(aij * aij).epsilon(1e-10));
      }
    }
  }
  CHECK_THROWS_AS(xi_table(diag34(), 0.0), std::invalid_argument);
}

TEST_CASE("rho_squared") {
  CHECK(rho_squared(diag34(), 1.0, 9.0) == doctest::Approx(19.0).epsilon(1e-12));
  CHECK(rho_squared(diag34(), 1.0, 0.0) == doctest::Approx(28.0).epsilon(1e-12));
  // A single entry is its own extreme: xi = c^2, sigma_min^2 = c^2.
  const Matrix c = Matrix::dense(1, 1, {2.5});
  CHECK(rho_squared(c, 0.7, 2.5 * 2.5) == doctest::Approx(0.0).epsilon(1e-12));
  // Skipping sigma_min only enlarges the value.
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix a = oracle::random_dense(5, 4, 60 + seed);
    const double smin_sq = min_singular_sq_exact(a);
    for (double alpha : {0.3, 0.9})
      CHECK(rho_squared(a, alpha, 0.0) >= rho_squared(a, alpha, smin_sq));
  }
}

TEST_CASE("gamma_bound") {
  const SpectralSummary s = norms(diag34());
  CHECK(gamma_bound(diag34(), 1.0) == doctest::Approx(7.0 + s.spectral_norm).epsilon(1e-10));
  // Exact identity at alpha = 1.
  const Matrix a = oracle::random_dense(6, 6, 8);
  const SpectralSummary sa = norms(a);
  CHECK(gamma_bound(a, 1.0) == sa.l1_norm + sa.spectral_norm);

  // Equal-magnitude matrices: the ratio term is 1, so gamma ignores alpha.
  const Matrix flat = Matrix::dense(2, 2, {1, -1, 1, 1});
  const double at1 = gamma_bound(flat, 1.0);
  for (double alpha : {0.2, 0.5, 0.9})
    CHECK(gamma_bound(flat, alpha) == doctest::Approx(at1).epsilon(1e-12));

  // Nonincreasing in alpha whenever min|A_ij| l1 <= F^2.
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix r = oracle::random_dense(5, 5, 70 + seed);
    double l1 = 0.0, fro2 = 0.0, min_mag = 1e300;
    r.for_each_stored([&](std::size_t, std::size_t, double v) {
      l1 += std::fabs(v);
      fro2 += v * v;
      if (v != 0.0) min_mag = std::min(min_mag, std::fabs(v));
    });
    if (min_mag * l1 > fro2) continue;
    double prev = gamma_bound(r, 0.1);
    for (double alpha : {0.3, 0.5, 0.7, 0.9, 1.0}) {
      const double g = gamma_bound(r, alpha);
      CHECK(g <= prev + 1e-9);
      prev = g;
    }
  }
}

TEST_CASE("optimize_alpha ties break toward the smallest alpha") {
  const Matrix flat = Matrix::dense(3, 3, {1, -1, 1, -1, 1, -1, 1, -1, 1});
  const MixingProfile p = optimize_alpha(flat, 0.1, 0.05, 1.0, 20);
  CHECK(p.alpha_star == doctest::Approx(0.05).epsilon(1e-12));
  // Constant objective across the grid.
  for (double v : p.objective_values)
    CHECK(v == doctest::Approx(p.objective_values.front()).epsilon(1e-10));
}

TEST_CASE("rho_squared stays nonnegative with the exact sigma_min") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix a = oracle::random_dense(6, 5, 250 + seed);
    const double smin_sq = min_singular_sq_exact(a);
    for (double alpha : {0.05, 0.4, 1.0}) CHECK(rho_squared(a, alpha, smin_sq) >= 0.0);
  }
}

TEST_CASE("spiky data keeps the optimal mixture away from the pure-l2 end") {
  for (std::uint64_t seed : {1ULL, 5ULL, 9ULL}) {
    const Matrix a = center_columns(generate_spiky_powerlaw(120, 90, 4, 0.9, seed));
    CHECK(optimize_alpha(a, 0.5).alpha_star >= 0.3);
  }
}

TEST_CASE("optimize_alpha matches a fine-grid scan") {
  {
    // Closed-form instance: the minimum sits at the grid's left end.
    const MixingProfile p = optimize_alpha(diag34(), 0.05);
    double best_alpha = 0.0, best_val = 1e300;
    for (std::size_t i = 0; i < 10000; ++i) {
      const double alpha = 0.01 + (1.0 - 0.01) * static_cast<double>(i) / 9999.0;
      const double val = objective_oracle(diag34(), alpha, 0.05, p.spectral_norm,
                                          p.sigma_min_sq);
      if (val < best_val) {
        best_val = val;
        best_alpha = alpha;
      }
    }
    CHECK(std::fabs(p.alpha_star - best_alpha) <= 1e-3);
    CHECK(p.objective_at_star == doctest::Approx(best_val).epsilon(1e-6));
  }
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Matrix a = oracle::random_dense(8, 6, 500 + seed);
    const MixingProfile p = optimize_alpha(a, 0.05);
    // Independent scan over 10^4 points with the directly-coded objective.
    double best_alpha = 0.0, best_val = 1e300;
    for (std::size_t i = 0; i < 10000; ++i) {
      const double alpha = 0.01 + (1.0 - 0.01) * static_cast<double>(i) / 9999.0;
      const double val = objective_oracle(a, alpha, 0.05, p.spectral_norm, p.sigma_min_sq);
      if (val < best_val) {
        best_val = val;
        best_alpha = alpha;
      }
    }
    CHECK(std::fabs(p.alpha_star - best_alpha) <= 1e-3);
    CHECK(p.objective_at_star == doctest::Approx(best_val).epsilon(1e-6));
    // The refined optimum never loses to the evaluated grid.
    for (double v : p.objective_values) CHECK(p.objective_at_star <= v + 1e-12);
  }
  CHECK_THROWS_AS(optimize_alpha(diag34(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimize_alpha(diag34(), 0.5, 0.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("sample_complexity") {
  // Hand-checked value for rho2=19, gamma=11, eps=0.5, delta=0.1, m=n=2, k=1.
  CHECK(sample_complexity(19.0, 11.0, 0.5, 0.1, 2, 2, 1) == 615);

  // k enters quadratically in the leading term.
  const double r2 = 10.0, g = 1e-6;
  const std::size_t k1 = sample_complexity(r2, g, 0.5, 0.1, 10, 10, 1);
  const std::size_t k2 = sample_complexity(r2, g, 0.5, 0.1, 10, 10, 2);
  CHECK(static_cast<double>(k2) >= 4.0 * static_cast<double>(k1) - 4.0);

  // Halving eps quadruples s when the gamma term is negligible.
  const std::size_t at_half = sample_complexity(100.0, 0.1, 0.25, 0.1, 10, 10, 1);
  const std::size_t at_full = sample_complexity(100.0, 0.1, 0.5, 0.1, 10, 10, 1);
  CHECK(std::fabs(static_cast<double>(at_half) / static_cast<double>(at_full) - 4.0) < 0.05 * 4.0);

  CHECK_THROWS_AS(sample_complexity(0.0, 1.0, 0.5, 0.1, 2, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_complexity(1.0, 1.0, 0.5, 5.0, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("sample_complexity monotone in eps and k") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix a = oracle::random_dense(6, 5, 90 + seed);
    for (double alpha : {0.2, 0.6, 1.0}) {
      const double r2 = rho_squared(a, alpha, 0.0);
      const double g = gamma_bound(a, alpha);
      std::size_t prev_eps = static_cast<std::size_t>(-1);
      for (double eps : {0.1, 0.2, 0.5}) {
        const std::size_t s = sample_complexity(r2, g, eps, 0.1, 6, 5, 1);
        CHECK(s <= prev_eps);  // nonincreasing in eps
        prev_eps = s;
      }
      std::size_t prev_k = 0;
      for (std::size_t k : {1, 2, 3}) {
        const std::size_t s = sample_complexity(r2, g, 0.2, 0.1, 6, 5, k);
        CHECK(s >= prev_k);  // nondecreasing in k
        prev_k = s;
      }
    }
  }
}

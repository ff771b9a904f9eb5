#include "sketchpca/spca.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sketchpca/rng.hpp"
#include "sketchpca/sketch.hpp"
#include "sketchpca/spectral.hpp"

namespace sketchpca {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void fix_sign(std::vector<double>& v) {
  std::size_t idx = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::fabs(v[i]) > best) {
      best = std::fabs(v[i]);
      idx = i;
    }
  if (v[idx] < 0.0)
    for (double& x : v) x = -x;
}

// Zero all but the r largest-magnitude entries; ties keep the lower index.
void keep_top_r(std::vector<double>& v, std::size_t r) {
  if (r >= v.size()) return;
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + r, idx.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::fabs(v[a]);
    const double mb = std::fabs(v[b]);
    return ma != mb ? ma > mb : a < b;
  });
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t t = 0; t < r; ++t) out[idx[t]] = v[idx[t]];
  v = std::move(out);
}

std::vector<double> deflated_gram(const Matrix& a,
                                  const std::vector<std::vector<double>>& found,
                                  const std::vector<double>& x) {
  std::vector<double> px = x;
  for (const auto& b : found) {
    const double c = dot(b, px);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] -= c * b[i];
  }
  std::vector<double> gx = gram_apply(a, px);
  for (const auto& b : found) {
    const double c = dot(b, gx);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] -= c * b[i];
  }
  return gx;
}

struct TPowerRun {
  std::vector<double> vec;
  double objective = 0.0;
  bool converged = false;
};

TPowerRun truncated_power(const Matrix& a, const std::vector<std::vector<double>>& found,
                          std::vector<double> v, std::size_t r, double tol,
                          std::size_t max_iter) {
  TPowerRun run;
  keep_top_r(v, r);
  double vn = norm2(v);
  if (vn == 0.0) {
    run.vec = std::move(v);
    return run;
  }
  for (double& x : v) x /= vn;
  std::vector<double> w = deflated_gram(a, found, v);
  double obj = dot(v, w);
  for (std::size_t it = 0; it < max_iter; ++it) {
    keep_top_r(w, r);
    const double wn = norm2(w);
    if (wn == 0.0) break;  // operator annihilated the support
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / wn;
    w = deflated_gram(a, found, v);
    const double next = dot(v, w);
    assert(next >= obj - 1e-9 * std::max(std::fabs(obj), 1.0));
    if (std::fabs(next - obj) <= tol * std::max(std::fabs(next), 1e-300)) {
      obj = next;
      run.converged = true;
      break;
    }
    obj = next;
  }
  run.vec = std::move(v);
  run.objective = obj;
  return run;
}

std::vector<std::size_t> first_combination(std::size_t r) {
  std::vector<std::size_t> c(r);
  std::iota(c.begin(), c.end(), 0);
  return c;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t r = c.size();
  std::size_t i = r;
  while (i-- > 0) {
    if (c[i] + (r - i) < n) {
      ++c[i];
      for (std::size_t j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double binomial(std::size_t n, std::size_t r) {
  double acc = 1.0;
  for (std::size_t t = 0; t < r; ++t)
    acc = acc * static_cast<double>(n - t) / static_cast<double>(t + 1);
  return acc;
}

// Best r-sparse unit maximizer of the dense symmetric operator `g` (n x n,
// row-major) by support enumeration; exact per support via Jacobi.
std::pair<std::vector<double>, double> best_sparse_direction(const std::vector<double>& g,
                                                             std::size_t n, std::size_t r) {
  std::vector<std::size_t> support = first_combination(r);
  std::vector<double> best_vec;
  double best_val = -std::numeric_limits<double>::infinity();
  do {
    std::vector<double> sub(r * r);
    for (std::size_t p = 0; p < r; ++p)
      for (std::size_t q = 0; q < r; ++q) sub[p * r + q] = g[support[p] * n + support[q]];
    SymEigResult eig = sym_eig_dense(std::move(sub), r);
    const double lambda = eig.values.back();
    if (lambda > best_val) {
      best_val = lambda;
      best_vec.assign(n, 0.0);
      for (std::size_t p = 0; p < r; ++p)
        best_vec[support[p]] = eig.vectors[p + (r - 1) * r];
    }
  } while (next_combination(support, n));
  fix_sign(best_vec);
  return {best_vec, best_val};
}

}  // namespace

ComponentSet exact_pca(const Matrix& a, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("exact_pca: k out of range");
  const SvdResult svd = top_singular_triplets(a, k, 1e-8, 5000, seed);
  if (!svd.converged)
    throw ConvergenceError("exact_pca: singular triplet iteration did not converge");
  ComponentSet set;
  set.dim = a.cols();
  set.k = k;
  set.r = a.cols();
  set.method = SpcaMethod::Exact;
  for (const SingularTriplet& t : svd.triplets) set.columns.push_back(t.right);
  return set;
}

ComponentSet truncate_components(const ComponentSet& v, std::size_t r) {
  if (r == 0 || r > v.dim) throw std::invalid_argument("truncate_components: r out of range");
  ComponentSet out = v;
  out.r = r;
  out.method = SpcaMethod::MaxR;
  for (auto& col : out.columns) {
    keep_top_r(col, r);
    const double n = norm2(col);
    if (n == 0.0) throw std::invalid_argument("truncate_components: zero column");
    for (double& x : col) x /= n;
  }
  return out;
}

ComponentSet iter_sparse_pca(const Matrix& a, std::size_t k, std::size_t r,
                             std::size_t restarts, double tol, std::size_t max_iter,
                             std::uint64_t seed) {
  const std::size_t n = a.cols();
  if (k == 0 || k > std::min(a.rows(), n))
    throw std::invalid_argument("iter_sparse_pca: k out of range");
  if (r == 0 || r > n) throw std::invalid_argument("iter_sparse_pca: r out of range");
  if (restarts == 0) throw std::invalid_argument("iter_sparse_pca: restarts must be >= 1");

  // Warm starts from the (possibly unconverged) exact components.
  const SvdResult svd = top_singular_triplets(a, k, 1e-8, 5000, seed);

  ComponentSet set;
  set.dim = n;
  set.k = k;
  set.r = r;
  set.method = SpcaMethod::IterSparse;

  Rng rng(derive_seed(seed, 0x7350'6341));
  std::vector<std::vector<double>> found;
  for (std::size_t c = 0; c < k; ++c) {
    TPowerRun best;
    best.objective = -std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start <= restarts; ++start) {
      std::vector<double> v0;
      if (start == 0) {
        v0 = svd.triplets[c].right;
      } else {
        v0.resize(n);
        Rng srng = rng.split(c * (restarts + 1) + start);
        for (double& x : v0) x = srng.normal();
      }
      TPowerRun run = truncated_power(a, found, std::move(v0), r, tol, max_iter);
      if (run.objective > best.objective) best = std::move(run);
    }
    fix_sign(best.vec);
    set.converged = set.converged && best.converged;
    found.push_back(best.vec);
    set.columns.push_back(std::move(best.vec));
  }
  return set;
}

ComponentSet brute_force_spca(const Matrix& a, std::size_t k, std::size_t r) {
  const std::size_t n = a.cols();
  if (k == 0 || k > 2) throw std::invalid_argument("brute_force_spca: k must be 1 or 2");
  if (r == 0 || r > n) throw std::invalid_argument("brute_force_spca: r out of range");
  if (n > 16) throw std::invalid_argument("brute_force_spca: refused, n > 16");
  if (binomial(n, r) > 1e4)
    throw std::invalid_argument("brute_force_spca: refused, C(n, r) > 1e4");

  // Dense Gram, accumulated row-by-row of A.
  std::vector<double> g(n * n, 0.0);
  {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(a.rows());
    a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
      if (v != 0.0) rows[i].push_back({j, v});
    });
    for (const auto& row : rows)
      for (const auto& [j1, v1] : row)
        for (const auto& [j2, v2] : row) g[j1 * n + j2] += v1 * v2;
  }

  ComponentSet set;
  set.dim = n;
  set.k = k;
  set.r = r;
  set.method = SpcaMethod::BruteForce;
  auto [v1, val1] = best_sparse_direction(g, n, r);
  set.columns.push_back(v1);
  if (k == 2) {
    // Deflate: (I - v1 v1^T) G (I - v1 v1^T), exact given the first component.
    std::vector<double> gv(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) gv[i] += g[i * n + j] * v1[j];
    const double vgv = dot(v1, gv);
    std::vector<double> g2(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        g2[i * n + j] =
            g[i * n + j] - v1[i] * gv[j] - gv[i] * v1[j] + vgv * v1[i] * v1[j];
    auto [v2, val2] = best_sparse_direction(g2, n, r);
    set.columns.push_back(v2);
  }
  return set;
}

double variance(const Matrix& a, const ComponentSet& v) {
  if (v.dim != a.cols())
    throw std::invalid_argument("variance: component dimension " + std::to_string(v.dim) +
                                " != cols " + std::to_string(a.cols()));
  double f = 0.0;
  for (const auto& col : v.columns) {
    const std::vector<double> av = a.apply(col);
    f += dot(av, av);
  }
  return f;
}

RecoveryGap recovery_gap(const Matrix& a, const Matrix& sketch, std::size_t k, std::size_t r,
                         std::uint64_t seed) {
  const ComponentSet from_a = brute_force_spca(a, k, r);
  const ComponentSet from_sketch = brute_force_spca(sketch, k, r);
  RecoveryGap gap;
  gap.lhs_deficit = variance(a, from_a) - variance(a, from_sketch);
  gap.bound = 2.0 * static_cast<double>(k) * spectral_deviation(a, sketch, seed).gram_diff;
  return gap;
}

}  // namespace sketchpca

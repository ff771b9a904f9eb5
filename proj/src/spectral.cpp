#include "sketchpca/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchpca/rng.hpp"

namespace sketchpca {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  double n = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    n = norm2(v);
  } while (n == 0.0);
  for (double& x : v) x /= n;
  return v;
}

// y -= sum_t basis[t] (basis[t] . y)
void project_out(const std::vector<std::vector<double>>& basis, std::vector<double>& y) {
  for (const auto& b : basis) {
    const double c = dot(b, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * b[i];
  }
}

// Sign convention: the largest-magnitude coordinate is made nonnegative.
// Returns true if the vector was flipped.
bool fix_sign(std::vector<double>& v) {
  std::size_t idx = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::fabs(v[i]);
    if (m > best) {
      best = m;
      idx = i;
    }
  }
  if (v[idx] < 0.0) {
    for (double& x : v) x = -x;
    return true;
  }
  return false;
}

}  // namespace

OperatorEig dominant_eigenvalue(
    const std::function<std::vector<double>(std::span<const double>)>& op,
    std::size_t dim, double tol, std::size_t max_iter, std::uint64_t seed,
    double ref_scale) {
  Rng rng(seed);
  OperatorEig out;
  out.vector = random_unit(dim, rng);
  double lambda_prev = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::vector<double> w = op(out.vector);
    const double lambda = dot(out.vector, w);
    double resid_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = w[i] - lambda * out.vector[i];
      resid_sq += r * r;
    }
    const double scale = std::max(std::fabs(lambda), ref_scale);
    out.value = lambda;
    out.iterations = it;
    const double wn = norm2(w);
    if (wn == 0.0) {
      // Operator annihilates the iterate: eigenvalue 0 (exact).
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    const bool rayleigh_ok = it > 1 && std::fabs(lambda - lambda_prev) <= tol * scale;
    const bool resid_ok = std::sqrt(resid_sq) <= tol * std::max(scale, 1e-300);
    if (rayleigh_ok && resid_ok) {
      out.converged = true;
      return out;
    }
    lambda_prev = lambda;
    for (std::size_t i = 0; i < dim; ++i) out.vector[i] = w[i] / wn;
  }
  out.converged = false;
  return out;
}

SpectralSummary norms(const Matrix& a, bool compute_min_singular, std::uint64_t seed) {
  SpectralSummary s;
  a.for_each_stored([&](std::size_t, std::size_t, double v) {
    s.frobenius_norm += v * v;
    s.l1_norm += std::fabs(v);
  });
  s.frobenius_norm = std::sqrt(s.frobenius_norm);
  if (a.nnz() == 0) {
    // Zero matrix: all norms 0, stable rank 1 by convention.
    s.min_singular_computed = compute_min_singular;
    return s;
  }
  auto gram = [&](std::span<const double> x) { return gram_apply(a, x); };
  const OperatorEig top =
      dominant_eigenvalue(gram, a.cols(), 1e-8, 5000, derive_seed(seed, 0));
  s.spectral_norm = std::sqrt(std::max(top.value, 0.0));
  s.stable_rank = s.spectral_norm > 0.0
                      ? (s.frobenius_norm * s.frobenius_norm) /
                            (s.spectral_norm * s.spectral_norm)
                      : 1.0;
  if (compute_min_singular) {
    // Smallest eigenvalue of the small-side Gram via the spectral shift
    // c - lambda; the small side makes min_singular the min(m,n)-th
    // singular value for rectangular inputs.
    const bool row_side = a.rows() <= a.cols();
    const std::size_t dim = row_side ? a.rows() : a.cols();
    const double c = s.spectral_norm * s.spectral_norm + 1.0;
    auto shifted = [&](std::span<const double> x) {
      std::vector<double> gx = row_side ? a.apply(a.apply_transpose(x))
                                        : a.apply_transpose(a.apply(x));
      for (std::size_t i = 0; i < dim; ++i) gx[i] = c * x[i] - gx[i];
      return gx;
    };
    const OperatorEig low =
        dominant_eigenvalue(shifted, dim, 1e-8, 20000, derive_seed(seed, 1));
    s.min_singular = std::sqrt(std::max(c - low.value, 0.0));
    s.min_singular_computed = true;
  }
  return s;
}

SvdResult top_singular_triplets(const Matrix& a, std::size_t k, double tol,
                                std::size_t max_iter, std::uint64_t seed) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (k == 0 || k > std::min(m, n))
    throw std::invalid_argument("top_singular_triplets: k out of range");
  SvdResult out;
  std::vector<std::vector<double>> found;
  double sigma1_sq = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    auto deflated = [&](std::span<const double> x) {
      std::vector<double> px(x.begin(), x.end());
      project_out(found, px);
      std::vector<double> gx = gram_apply(a, px);
      project_out(found, gx);
      return gx;
    };
    OperatorEig eig = dominant_eigenvalue(deflated, n, tol, max_iter,
                                          derive_seed(seed, t), sigma1_sq);
    out.iterations += eig.iterations;
    out.converged = out.converged && eig.converged;
    std::vector<double> v = std::move(eig.vector);
    project_out(found, v);
    const double vn = norm2(v);
    if (vn > 1e-12) {
      for (double& x : v) x /= vn;
    } else {
      // Iterate collapsed into the deflated span; fall back to the first
      // coordinate direction orthogonal to what was found.
      for (std::size_t j = 0; j < n; ++j) {
        std::fill(v.begin(), v.end(), 0.0);
        v[j] = 1.0;
        project_out(found, v);
        const double cn = norm2(v);
        if (cn > 1e-6) {
          for (double& x : v) x /= cn;
          break;
        }
      }
    }
    fix_sign(v);
    const double lambda = std::max(eig.value, 0.0);
    const double sigma = std::sqrt(lambda);
    if (t == 0) sigma1_sq = lambda;
    SingularTriplet trip;
    trip.sigma = sigma;
    trip.right = v;
    if (sigma > 1e-14 * std::sqrt(std::max(sigma1_sq, 1.0))) {
      trip.left = a.apply(v);
      for (double& x : trip.left) x /= sigma;
    } else {
      trip.left.assign(m, 0.0);
    }
    found.push_back(trip.right);
    out.triplets.push_back(std::move(trip));
  }
  return out;
}

SymEigResult sym_eig_dense(std::vector<double> g, std::size_t n) {
  SymEigResult out;
  out.n = n;
  std::vector<double> v(n * n, 0.0);  // row-major rotation accumulator
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) scale += g[i] * g[i];
  const double off_tol = 1e-28 * std::max(scale, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += g[p * n + q] * g[p * n + q];
    if (off <= off_tol) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = g[p * n + q];
        if (apq == 0.0) continue;
        const double app = g[p * n + p];
        const double aqq = g[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double gip = g[i * n + p];
          const double giq = g[i * n + q];
          g[i * n + p] = c * gip - s * giq;
          g[i * n + q] = s * gip + c * giq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double gpj = g[p * n + j];
          const double gqj = g[q * n + j];
          g[p * n + j] = c * gpj - s * gqj;
          g[q * n + j] = s * gpj + c * gqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v[i * n + p];
          const double viq = v[i * n + q];
          v[i * n + p] = c * vip - s * viq;
          v[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return g[x * n + x] < g[y * n + y]; });
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = g[order[j] * n + order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors[i + j * n] = v[i * n + order[j]];
  }
  return out;
}

double min_singular_sq_exact(const Matrix& a) {
  const bool row_side = a.rows() <= a.cols();
  const std::size_t dim = row_side ? a.rows() : a.cols();
  // Bucket stored entries by the summed-over index, then accumulate the
  // small-side Gram from each bucket's pairwise products.
  const std::size_t nbuckets = row_side ? a.cols() : a.rows();
  std::vector<std::vector<std::pair<std::size_t, double>>> buckets(nbuckets);
  a.for_each_stored([&](std::size_t i, std::size_t j, double val) {
    if (val == 0.0) return;
    if (row_side)
      buckets[j].push_back({i, val});
    else
      buckets[i].push_back({j, val});
  });
  std::vector<double> gram(dim * dim, 0.0);
  for (const auto& bucket : buckets)
    for (const auto& [p, vp] : bucket)
      for (const auto& [q, vq] : bucket) gram[p * dim + q] += vp * vq;
  const SymEigResult eig = sym_eig_dense(std::move(gram), dim);
  return std::max(eig.values.front(), 0.0);
}

}  // namespace sketchpca

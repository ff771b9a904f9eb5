#include "sketchpca/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sketchpca/rng.hpp"

namespace sketchpca {

namespace {

void check_shape(std::size_t m, std::size_t n, std::size_t rank) {
  if (m == 0 || n == 0) throw std::invalid_argument("generator: dimensions must be positive");
  if (rank == 0 || rank > std::min(m, n))
    throw std::invalid_argument("generator: rank out of range");
}

// Heavy-tailed factor with modified-Gram-Schmidt orthonormal columns. Cubing
// the Gaussian draws concentrates each factor on a few coordinates, matching
// the uneven loading profiles of real low-rank data.
std::vector<double> orthonormal_factor(std::size_t rows, std::size_t rank, Rng& rng) {
  std::vector<double> f(rows * rank);
  for (double& x : f) {
    const double g = rng.normal();
    x = g * g * g;
  }
  for (std::size_t c = 0; c < rank; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double d = 0.0;
      for (std::size_t i = 0; i < rows; ++i) d += f[i * rank + p] * f[i * rank + c];
      for (std::size_t i = 0; i < rows; ++i) f[i * rank + c] -= d * f[i * rank + p];
    }
    double n2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) n2 += f[i * rank + c] * f[i * rank + c];
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t i = 0; i < rows; ++i) f[i * rank + c] *= inv;
  }
  return f;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.uniform_index(i)]);
  return p;
}

}  // namespace

Matrix generate_spiky_powerlaw(std::size_t m, std::size_t n, std::size_t rank,
                               double exponent, std::uint64_t seed) {
  check_shape(m, n, rank);
  if (exponent < 0.0) throw std::invalid_argument("spiky_powerlaw: exponent must be >= 0");
  Rng rng(derive_seed(seed, 0));
  std::vector<double> left(m * rank), right(n * rank);
  for (double& x : left) x = rng.normal();
  for (double& x : right) x = rng.normal();
  const std::vector<std::size_t> row_perm = random_permutation(m, rng);
  const std::vector<std::size_t> col_perm = random_permutation(n, rng);

  std::vector<double> values(m * n, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double rscale = std::pow(static_cast<double>(row_perm[i] + 1), -exponent);
    for (std::size_t j = 0; j < n; ++j) {
      const double cscale = std::pow(static_cast<double>(col_perm[j] + 1), -exponent);
      double acc = 0.0;
      for (std::size_t t = 0; t < rank; ++t) acc += left[i * rank + t] * right[j * rank + t];
      const double v = rscale * cscale * acc;
      values[i * n + j] = v;
      peak = std::max(peak, std::fabs(v));
    }
  }
  if (peak > 0.0)
    for (double& v : values) v /= peak;
  return Matrix::dense(m, n, std::move(values));
}

Matrix generate_low_rank_noise(std::size_t m, std::size_t n, std::size_t rank, double noise,
                               std::uint64_t seed) {
  check_shape(m, n, rank);
  if (noise < 0.0) throw std::invalid_argument("low_rank_noise: noise must be >= 0");
  Rng rng(derive_seed(seed, 1));
  const std::vector<double> left = orthonormal_factor(m, rank, rng);
  const std::vector<double> right = orthonormal_factor(n, rank, rng);
  std::vector<double> sigma(rank);
  double signal_fro2 = 0.0;
  for (std::size_t t = 0; t < rank; ++t) {
    sigma[t] = std::pow(0.98, static_cast<double>(t));
    signal_fro2 += sigma[t] * sigma[t];
  }
  std::vector<double> values(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < rank; ++t)
        acc += sigma[t] * left[i * rank + t] * right[j * rank + t];
      values[i * n + j] = acc;
    }
  if (noise > 0.0) {
    const double scale =
        noise * std::sqrt(signal_fro2 / (static_cast<double>(m) * static_cast<double>(n)));
    for (double& v : values) v += scale * rng.normal();
  }
  return Matrix::dense(m, n, std::move(values));
}

Matrix generate_binary_pixel(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw std::invalid_argument("binary_pixel: dimensions must be positive");
  Rng rng(derive_seed(seed, 2));
  const std::size_t blocks_r = std::max<std::size_t>(1, std::min<std::size_t>(4, m));
  const std::size_t blocks_c = std::max<std::size_t>(1, std::min<std::size_t>(4, n));
  // Corner magnitudes in [0.8, 1]; bilinear interpolation stays inside.
  std::vector<double> corners((blocks_r + 1) * (blocks_c + 1));
  for (double& c : corners) c = 0.8 + 0.2 * rng.uniform();
  std::vector<double> sign(blocks_r * blocks_c);
  for (double& s : sign) s = rng.uniform() < 0.5 ? -1.0 : 1.0;

  std::vector<double> values(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double fr = static_cast<double>(i) * blocks_r / static_cast<double>(m);
    const std::size_t br = std::min<std::size_t>(static_cast<std::size_t>(fr), blocks_r - 1);
    const double tr = fr - static_cast<double>(br);
    for (std::size_t j = 0; j < n; ++j) {
      const double fc = static_cast<double>(j) * blocks_c / static_cast<double>(n);
      const std::size_t bc = std::min<std::size_t>(static_cast<std::size_t>(fc), blocks_c - 1);
      const double tc = fc - static_cast<double>(bc);
      const double top = corners[br * (blocks_c + 1) + bc] * (1.0 - tc) +
                         corners[br * (blocks_c + 1) + bc + 1] * tc;
      const double bot = corners[(br + 1) * (blocks_c + 1) + bc] * (1.0 - tc) +
                         corners[(br + 1) * (blocks_c + 1) + bc + 1] * tc;
      const double mag = top * (1.0 - tr) + bot * tr;
      values[i * n + j] = sign[br * blocks_c + bc] * mag;
    }
  }
  return Matrix::dense(m, n, std::move(values));
}

Matrix generate(const std::string& name, const GeneratorParams& params, std::uint64_t seed) {
  if (name == "spiky_powerlaw")
    return generate_spiky_powerlaw(params.m, params.n, params.rank, params.exponent, seed);
  if (name == "low_rank_noise")
    return generate_low_rank_noise(params.m, params.n, params.rank, params.noise, seed);
  if (name == "binary_pixel") return generate_binary_pixel(params.m, params.n, seed);
  throw std::invalid_argument("generate: unknown generator '" + name + "'");
}

}  // namespace sketchpca

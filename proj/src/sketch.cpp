#include "sketchpca/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <unordered_map>

#include "sketchpca/spectral.hpp"

namespace sketchpca {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("AliasTable: empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("AliasTable: weights must be positive");
    total += w;
  }
  accept_.resize(n);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;
  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    const std::uint32_t l = large.back();
    small.pop_back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers on either stack are 1 up to rounding.
  for (std::uint32_t i : large) {
    accept_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::uint32_t i : small) {
    accept_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::draw(Rng& rng) const {
  const std::size_t slot = static_cast<std::size_t>(rng.uniform_index(accept_.size()));
  return rng.uniform() < accept_[slot] ? slot : static_cast<std::size_t>(alias_[slot]);
}

namespace {

constexpr std::size_t kDrawBlock = 1 << 16;

using AccumMap = std::unordered_map<std::uint64_t, double>;

AccumMap sample_block(const AliasTable& alias, const SamplingDistribution& dist,
                      std::span<const double> values, double inv_s, std::uint64_t block_seed,
                      std::size_t count) {
  AccumMap acc;
  Rng rng(block_seed);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t idx = alias.draw(rng);
    const Entry& e = dist.table[idx];
    const std::uint64_t key =
        static_cast<std::uint64_t>(e.row) * dist.cols + static_cast<std::uint64_t>(e.col);
    acc[key] += values[idx] * inv_s / e.value;
  }
  return acc;
}

}  // namespace

SketchResult sample_sketch(const Matrix& a, const SamplingDistribution& dist, std::size_t s,
                           std::uint64_t seed, unsigned threads) {
  if (s == 0) throw std::invalid_argument("sample_sketch: sample count must be >= 1");
  if (dist.rows != a.rows() || dist.cols != a.cols())
    throw std::invalid_argument("sample_sketch: distribution shape does not match matrix");
  if (dist.table.empty()) throw std::invalid_argument("sample_sketch: empty distribution");
  if (dist.support == SupportKind::NonzerosOnly && dist.table.size() != a.nnz())
    throw std::invalid_argument("sample_sketch: distribution support does not match nonzeros");
  if (dist.support == SupportKind::AllEntries && dist.table.size() != a.rows() * a.cols())
    throw std::invalid_argument("sample_sketch: distribution support does not cover all entries");

  std::vector<double> weights(dist.table.size());
  std::vector<double> values(dist.table.size());
  for (std::size_t idx = 0; idx < dist.table.size(); ++idx) {
    weights[idx] = dist.table[idx].value;
    values[idx] = a.at(dist.table[idx].row, dist.table[idx].col);
  }
  const AliasTable alias(weights);
  const double inv_s = 1.0 / static_cast<double>(s);

  const std::size_t nblocks = (s + kDrawBlock - 1) / kDrawBlock;
  std::vector<AccumMap> partials(nblocks);
  auto block_count = [&](std::size_t b) {
    return b + 1 < nblocks ? kDrawBlock : s - b * kDrawBlock;
  };
  if (threads <= 1 || nblocks == 1) {
    for (std::size_t b = 0; b < nblocks; ++b)
      partials[b] =
          sample_block(alias, dist, values, inv_s, derive_seed(seed, b), block_count(b));
  } else {
    std::vector<std::future<AccumMap>> jobs;
    jobs.reserve(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b)
      jobs.push_back(std::async(std::launch::async, [&, b] {
        return sample_block(alias, dist, values, inv_s, derive_seed(seed, b), block_count(b));
      }));
    for (std::size_t b = 0; b < nblocks; ++b) partials[b] = jobs[b].get();
  }

  // Merge in block order: per-key sums see one addend per block, so the
  // result does not depend on scheduling.
  AccumMap merged = std::move(partials[0]);
  for (std::size_t b = 1; b < nblocks; ++b)
    for (const auto& [key, val] : partials[b]) merged[key] += val;

  std::vector<Entry> entries;
  entries.reserve(merged.size());
  for (const auto& [key, val] : merged) {
    if (val == 0.0) continue;  // uniform draws of zero positions
    entries.push_back({static_cast<std::size_t>(key / dist.cols),
                       static_cast<std::size_t>(key % dist.cols), val});
  }
  SketchResult result{Matrix::sparse(a.rows(), a.cols(), std::move(entries)),
                      s,
                      seed,
                      dist.kind,
                      dist.alpha,
                      merged.size()};
  return result;
}

Matrix threshold_sketch(const Matrix& a, double delta) {
  if (delta < 0.0) throw std::invalid_argument("threshold_sketch: delta must be >= 0");
  std::vector<Entry> kept;
  a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
    if (v != 0.0 && std::fabs(v) >= delta) kept.push_back({i, j, v});
  });
  return Matrix::sparse(a.rows(), a.cols(), std::move(kept));
}

ThresholdChoice select_threshold(const Matrix& a, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("select_threshold: eps must be positive");
  if (a.nnz() == 0) throw std::invalid_argument("select_threshold: zero matrix");
  std::vector<double> mags;
  mags.reserve(a.nnz());
  a.for_each_stored([&](std::size_t, std::size_t, double v) {
    if (v != 0.0) mags.push_back(std::fabs(v));
  });
  std::sort(mags.begin(), mags.end());
  const SpectralSummary summary = norms(a, false, seed);
  // stable_rank = F^2 / sigma1^2, so the budget collapses to eps^2 sigma1^2.
  const double budget = eps * eps * summary.frobenius_norm * summary.frobenius_norm /
                        summary.stable_rank;

  ThresholdChoice choice{0.0, 0.0};
  double below = 0.0;  // energy strictly below the current candidate
  for (std::size_t t = 0; t < mags.size(); ++t) {
    if (t > 0 && mags[t] == mags[t - 1]) {
      below += mags[t] * mags[t];
      continue;
    }
    if (below <= budget) {
      choice.delta = mags[t];
      choice.lost_energy = below;
    } else {
      return choice;
    }
    below += mags[t] * mags[t];
  }
  if (below <= budget) {
    // Everything may be zeroed; report a cutoff just above the largest entry.
    choice.delta = std::nextafter(mags.back(), std::numeric_limits<double>::infinity());
    choice.lost_energy = below;
  }
  return choice;
}

SpectralDeviation spectral_deviation(const Matrix& a, const Matrix& b, std::uint64_t seed) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("spectral_deviation: shape mismatch");
  SpectralDeviation dev;
  const std::size_t n = a.cols();

  auto diff_gram = [&](std::span<const double> x) {
    std::vector<double> ax = a.apply(x);
    std::vector<double> bx = b.apply(x);
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] -= bx[i];
    std::vector<double> y = a.apply_transpose(ax);
    std::vector<double> yb = b.apply_transpose(ax);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= yb[i];
    return y;
  };
  const OperatorEig top =
      dominant_eigenvalue(diff_gram, n, 1e-10, 20000, derive_seed(seed, 0));
  dev.op_norm_diff = std::sqrt(std::max(top.value, 0.0));

  auto sym_diff = [&](std::span<const double> x) {
    std::vector<double> y = gram_apply(a, x);
    std::vector<double> yb = gram_apply(b, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= yb[i];
    return y;
  };
  // The Gram difference is indefinite; its squared operator is PSD with
  // dominant eigenvalue max(|lambda|)^2.
  auto squared = [&](std::span<const double> x) { return sym_diff(sym_diff(x)); };
  const OperatorEig sq =
      dominant_eigenvalue(squared, n, 1e-10, 20000, derive_seed(seed, 1));
  dev.gram_diff = std::sqrt(std::max(sq.value, 0.0));
  return dev;
}

}  // namespace sketchpca

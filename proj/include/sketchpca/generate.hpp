#pragma once

#include <cstdint>
#include <string>

#include "sketchpca/matrix.hpp"

namespace sketchpca {

struct GeneratorParams {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t rank = 2;
  double exponent = 1.0;  // spiky_powerlaw
  double noise = 0.0;     // low_rank_noise, relative Frobenius fraction
};

/// Low-rank template with power-law row/column scalings; larger exponent
/// gives a larger max/median magnitude ratio. Max |entry| normalized to 1.
Matrix generate_spiky_powerlaw(std::size_t m, std::size_t n, std::size_t rank,
                               double exponent, std::uint64_t seed);

/// Orthonormal rank-`rank` factors with heavy-tailed loadings and spectrum
/// sigma_t = 0.98^t (top singular value 1), plus dense Gaussian noise of
/// Frobenius norm ~ `noise` times the signal's.
Matrix generate_low_rank_noise(std::size_t m, std::size_t n, std::size_t rank, double noise,
                               std::uint64_t seed);

/// Entries near +-1 on a smooth block pattern; every |entry| in [0.8, 1].
Matrix generate_binary_pixel(std::size_t m, std::size_t n, std::uint64_t seed);

/// Dispatch by generator name: spiky_powerlaw, low_rank_noise, binary_pixel.
Matrix generate(const std::string& name, const GeneratorParams& params, std::uint64_t seed);

}  // namespace sketchpca

// Test-only oracles, independent of the library's iterative kernels: dense
// decompositions come from Eigen, everything else is direct enumeration.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sketchpca/matrix.hpp"
#include "sketchpca/rng.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const sketchpca::Matrix& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()),
                                            static_cast<Eigen::Index>(a.cols()));
  a.for_each_stored([&](std::size_t i, std::size_t j, double v) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
  });
  return m;
}

inline std::vector<double> singular_values(const sketchpca::Matrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

inline double spectral_norm(const sketchpca::Matrix& a) {
  const std::vector<double> sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

// ||A^T A - B^T B||_2 by dense symmetric eigendecomposition.
inline double gram_diff(const sketchpca::Matrix& a, const sketchpca::Matrix& b) {
  const Eigen::MatrixXd ea = to_eigen(a);
  const Eigen::MatrixXd eb = to_eigen(b);
  const Eigen::MatrixXd d = ea.transpose() * ea - eb.transpose() * eb;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d);
  double best = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    best = std::max(best, std::fabs(eig.eigenvalues()[i]));
  return best;
}

inline sketchpca::Matrix random_dense(std::size_t m, std::size_t n, std::uint64_t seed) {
  sketchpca::Rng rng(seed);
  std::vector<double> values(m * n);
  for (double& v : values) v = rng.normal();
  return sketchpca::Matrix::dense(m, n, std::move(values));
}

}  // namespace oracle

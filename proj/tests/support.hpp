#pragma once

#include <random>

#include "qdgate/linalg.hpp"

namespace qdgate::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline MatrixXc random_matrix(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g;
  MatrixXc m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline MatrixXc random_hermitian(Eigen::Index n, Rng& rng) {
  const MatrixXc m = random_matrix(n, rng);
  return 0.5 * (m + m.adjoint());
}

inline VectorXc random_state(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g;
  VectorXc v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace qdgate::test

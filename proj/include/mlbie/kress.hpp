#pragma once
// Quadrature weights for periodic integrals with a logarithmic kernel:
//   int_0^{2pi} ln(4 sin^2((t_i - tau)/2)) f(tau) dtau ~= sum_j R_{ij} f(t_j),
// exact for trigonometric polynomials of degree < M/2.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "mlbie/geometry.hpp"

namespace mlbie {

/// First column of the circulant weight matrix: R_{ij} = w[(i - j) mod M].
inline std::vector<double> kress_log_weights(int M) {
  require_even_count(M);
  const int n = M / 2;
  const double pi = std::numbers::pi;
  std::vector<double> w(M);
  for (int d = 0; d < M; ++d) {
    const double t = pi * d / n;
    double s = 0.0;
    for (int m = 1; m < n; ++m) s += std::cos(m * t) / m;
    w[d] = -2.0 * pi / n * s - pi / (static_cast<double>(n) * n) * std::cos(n * t);
  }
  return w;
}

/// Dense form of the weight matrix.
inline Eigen::MatrixXd kress_weight_matrix(int M) {
  const std::vector<double> w = kress_log_weights(M);
  Eigen::MatrixXd r(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) r(i, j) = w[((i - j) % M + M) % M];
  }
  return r;
}

}  // namespace mlbie

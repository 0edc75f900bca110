#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <numbers>

#include "mlbie/kress.hpp"

using namespace mlbie;

namespace {

constexpr double kPi = std::numbers::pi;

// Product quadrature of int_0^{2 pi} ln(4 sin^2((t_i - tau) / 2)) f(tau) dtau at node i.
double kress_apply(const std::function<double(double)>& f, int M, int i) {
  const std::vector<double> w = kress_log_weights(M);
  double s = 0.0;
  for (int j = 0; j < M; ++j) s += w[((i - j) % M + M) % M] * f(2.0 * kPi * j / M);
  return s;
}

// The same integral by tanh-sinh on (t, t + 2 pi), where the log singularity sits at both ends.
double oracle(const std::function<double(double)>& f, double t) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(
      [&](double tau, double dist) {
        return (std::log(4.0) + 2.0 * std::log(std::abs(std::sin(0.5 * dist)))) * f(tau);
      },
      t, t + 2.0 * kPi);
}

}  // namespace

TEST(KressWeights, AnnihilateConstants) {
  for (int M : {4, 8, 16, 64, 200}) {
    const std::vector<double> w = kress_log_weights(M);
    double sum = 0.0;
    for (double v : w) sum += v;
    EXPECT_NEAR(sum, 0.0, 1e-13) << M;
    const Eigen::MatrixXd R = kress_weight_matrix(M);
    EXPECT_LT(R.rowwise().sum().cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((R - R.transpose()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(KressWeights, ExactOnTrigonometricPolynomials) {
  const int M = 32;
  for (int m = 1; m < M / 2; ++m) {
    auto f = [m](double tau) { return std::cos(m * tau); };
    for (int i : {0, 5, 17}) {
      const double t = 2.0 * kPi * i / M;
      EXPECT_NEAR(kress_apply(f, M, i), -2.0 * kPi / m * std::cos(m * t), 1e-12) << m;
    }
  }
}

TEST(KressWeights, CosineShiftAgainstAdaptiveQuadrature) {
  const int M = 32;
  for (int i : {0, 3, 11, 26}) {
    const double t = 2.0 * kPi * i / M;
    auto f = [t](double tau) { return std::cos(tau - t); };
    EXPECT_NEAR(kress_apply(f, M, i), oracle(f, t), 1e-12);
    EXPECT_NEAR(oracle(f, t), -2.0 * kPi, 1e-12);
  }
}

TEST(KressWeights, SpectralConvergenceForAnalyticDensity) {
  auto f = [](double tau) { return std::exp(std::cos(tau)) * std::sin(2.0 * tau + 0.3); };
  std::vector<double> err;
  for (int M : {8, 16, 32, 64}) {
    double worst = 0.0;
    for (int i : {0, M / 4, M / 2 + 1}) {
      const double t = 2.0 * kPi * i / M;
      worst = std::max(worst, std::abs(kress_apply(f, M, i) - oracle(f, t)));
    }
    err.push_back(worst);
  }
  EXPECT_LT(err[1], 1e-3 * err[0]);
  EXPECT_LT(err[2], 1e-5 * err[1]);
  EXPECT_LT(err[3], 1e-13);
}

TEST(KressWeights, RejectsOddCounts) { EXPECT_THROW(kress_log_weights(9), ConfigError); }

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mlbie/analytic.hpp"
#include "mlbie/cases.hpp"

using namespace mlbie;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

struct InterfaceResidual {
  double value = 0.0;
  double flux = 0.0;
};

// Max over 4 m_max angles of the continuity and flux mismatch on Gamma_j, relative to the field scale there.
InterfaceResidual interface_residual(const ModeCoefficients& c, const LayerConfig& config, int j) {
  const int n = 4 * c.m_max;
  const double R = config.radius(j);
  double du = 0.0, dflux = 0.0, su = 0.0, sflux = 0.0;
  for (int q = 0; q < n; ++q) {
    const double t = 2.0 * kPi * q / n;
    const RadialSample out = eval_analytic_in_layer(c, config, j, R, t);
    const RadialSample in = eval_analytic_in_layer(c, config, j + 1, R, t);
    du = std::max(du, std::abs(out.value - in.value));
    dflux = std::max(dflux, std::abs(config.contrast(j) * out.radial_derivative - in.radial_derivative));
    su = std::max(su, std::abs(out.value));
    sflux = std::max(sflux, std::abs(in.radial_derivative));
  }
  return {du / su, dflux / sflux};
}

}  // namespace

class AllCases : public ::testing::TestWithParam<std::string> {};

TEST_P(AllCases, TransmissionConditionsHold) {
  const LayerConfig config = find_case(GetParam()).to_config();
  const ModeCoefficients c = solve_mode_coefficients(config);
  EXPECT_LT(c.a_tail_ratio(), 1e-14);
  for (int j = 0; j < config.num_interfaces(); ++j) {
    const InterfaceResidual r = interface_residual(c, config, j);
    EXPECT_LT(r.value, 1e-10) << "interface " << j;
    EXPECT_LT(r.flux, 1e-10) << "interface " << j;
  }
}

TEST_P(AllCases, SolvesHelmholtzInEachLayer) {
  const LayerConfig config = find_case(GetParam()).to_config();
  const ModeCoefficients c = solve_mode_coefficients(config);
  const double h = 1e-3;
  for (int layer = 0; layer < config.num_layers(); ++layer) {
    const double hi = layer == 0 ? 2.0 * config.radius(0) : config.radius(layer - 1);
    const double lo = layer == config.num_interfaces() ? 0.0 : config.radius(layer);
    const double r = 0.5 * (lo + hi) + 0.05;
    const double k = config.wavenumbers[layer];
    for (double theta : {0.4, 1.9, 3.5, 5.2}) {
      const double x = r * std::cos(theta), y = r * std::sin(theta);
      auto f = [&](double px, double py) {
        return eval_analytic_in_layer(c, config, layer, std::hypot(px, py), std::atan2(py, px)).value;
      };
      const cd u = f(x, y);
      const cd lap = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * u) / (h * h);
      // The 5-point stencil's own truncation is k^4 h^2 / 12 relative to |u|, so scale by k^2 |u|.
      EXPECT_LT(std::abs(lap + k * k * u), 1e-4 * k * k * std::abs(u)) << "layer " << layer;
    }
  }
}

TEST_P(AllCases, DoublingModeCountIsStable) {
  const LayerConfig config = find_case(GetParam()).to_config();
  const ModeCoefficients c = solve_mode_coefficients(config);
  const ModeCoefficients d = solve_mode_coefficients(config, std::min(2 * c.m_max, kDefaultOrderCap));
  for (double r : {0.3, 0.5 * config.radius(0), config.radius(0), 1.5 * config.radius(0)}) {
    for (double theta : {0.0, 1.0, 2.5}) {
      const cd a = eval_analytic(c, config, r, theta);
      const cd b = eval_analytic(d, config, r, theta);
      EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a))) << r << " " << theta;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Registry, AllCases,
                         ::testing::Values("case1", "case2", "case3", "case4", "case5a", "case5b", "case6", "case7"));

TEST(Analytic, TransparentInterfaceGivesPlaneWave) {
  const LayerConfig config = LayerConfig::concentric({2.0, 2.0}, {4.0});
  const ModeCoefficients c = solve_mode_coefficients(config);
  for (cd a : c.A) EXPECT_LT(std::abs(a), 1e-14);
  for (double r : {0.0, 1.0, 3.9, 4.0, 6.0}) {
    for (double theta : {0.0, 0.8, 2.2, 4.7}) {
      const cd expected = std::exp(cd(0.0, 2.0 * r * std::sin(theta)));
      EXPECT_LT(std::abs(eval_analytic(c, config, r, theta) - expected), 1e-12) << r << " " << theta;
    }
  }
}

TEST(Analytic, ExtraModesDoNotChangeCase1) {
  const LayerConfig config = find_case("case1").to_config();
  const ModeCoefficients c = solve_mode_coefficients(config);
  const ModeCoefficients more = solve_mode_coefficients(config, c.m_max + 20);
  EXPECT_LT(std::abs(eval_analytic(c, config, 5.0, kPi / 3) - eval_analytic(more, config, 5.0, kPi / 3)), 1e-13);
  EXPECT_LT(std::abs(eval_analytic(c, config, 2.0, 1.0) - eval_analytic(more, config, 2.0, 1.0)), 1e-13);
}

TEST(Analytic, IncidentDirectionRotatesField) {
  LayerConfig config = find_case("case1").to_config();
  const ModeCoefficients c = solve_mode_coefficients(config);
  LayerConfig turned = config;
  turned.incident_direction = {1.0, 0.0};
  const ModeCoefficients ct = solve_mode_coefficients(turned);
  for (double r : {1.0, 5.0}) {
    EXPECT_LT(std::abs(eval_analytic(c, config, r, 1.2) - eval_analytic(ct, turned, r, 1.2 - 0.5 * kPi)), 1e-12);
  }
}

TEST(SoundHard, CoefficientsAndNeumannCondition) {
  const LayerConfig config = find_case("case1").to_config();
  const ModeCoefficients c = solve_sound_hard_coefficients(config);
  EXPECT_EQ(c.condition, BoundaryCondition::sound_hard);
  const CylinderTable t = cylinder_table(c.m_max, 8.0);
  for (int m = 0; m <= c.m_max; ++m) {
    EXPECT_LT(std::abs(c.A[m] + t.jprime[m] / t.hankel_prime(m)), 1e-15 * (1.0 + std::abs(c.A[m])));
  }
  for (double theta : {0.0, 1.1, 2.9, 4.4}) {
    const RadialSample s = eval_analytic_in_layer(c, config, 0, 4.0, theta);
    EXPECT_LT(std::abs(s.radial_derivative), 1e-11);
    EXPECT_EQ(eval_sound_hard(c, config, 3.0, theta), cd(0.0));
  }
}

TEST(SoundHard, MatchesDirectSeries) {
  const LayerConfig config = find_case("case1").to_config();
  // Direct two-sided Jacobi-Anger series with the sound-hard scattering coefficients.
  const int m_max = 60;
  const double k = 2.0, R = 4.0, r = 6.0, theta = 0.0;
  const double psi = theta - 0.5 * kPi;
  cd sum = std::exp(cd(0.0, k * r * std::cos(psi)));
  auto jd = [](int m, double x) {
    return m == 0 ? -std::cyl_bessel_j(1.0, x) : std::cyl_bessel_j(m - 1.0, x) - m / x * std::cyl_bessel_j(m, x);
  };
  auto yd = [](int m, double x) {
    return m == 0 ? -std::cyl_neumann(1.0, x) : std::cyl_neumann(m - 1.0, x) - m / x * std::cyl_neumann(m, x);
  };
  for (int m = -m_max; m <= m_max; ++m) {
    const int am = std::abs(m);
    const cd a = -jd(am, k * R) / cd(jd(am, k * R), yd(am, k * R));
    const cd h = cd(std::cyl_bessel_j(am, k * r), std::cyl_neumann(am, k * r));
    sum += std::pow(cd(0.0, 1.0), am) * a * h * std::exp(cd(0.0, m * psi));
  }
  EXPECT_LT(std::abs(eval_sound_hard(config, r, theta) - sum), 1e-12);
}

TEST(Analytic, Errors) {
  const LayerConfig config = find_case("case1").to_config();
  EXPECT_THROW(solve_mode_coefficients(config, -1), ConfigError);
  LayerConfig star = config;
  star.interfaces[0] = InterfaceCurve::star(4.0, 0.1, 10);
  EXPECT_THROW(solve_mode_coefficients(star), ConfigError);
  const ModeCoefficients c = solve_mode_coefficients(config);
  EXPECT_THROW(eval_analytic_in_layer(c, config, 0, 0.0, 0.0), DomainError);
  EXPECT_NO_THROW(eval_analytic_in_layer(c, config, 1, 0.0, 0.0));
  EXPECT_THROW(eval_sound_hard(c, config, 5.0, 0.0), ConfigError);
  AnalyticOptions tight;
  tight.order_cap = 20;
  EXPECT_THROW(solve_mode_coefficients(config, tight), CapReachedError);
}

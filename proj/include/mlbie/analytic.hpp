#pragma once
// Separation-of-variables reference solutions for concentric circular
// interfaces: the multilayer transmission problem and the single sound-hard
// obstacle.
//
// The total field is expanded as
//   u(r, theta) = sum_{m>=0} eps_m i^m cos(m psi) u_m(r),   psi = theta - alpha,
// (eps_0 = 1, eps_m = 2), the standard two-sided Jacobi-Anger form of the plane
// wave exp(i k_0 r cos psi) folded onto nonnegative orders. Per order m:
//   Omega_0 : J_m(k_0 r) + A_m H_m(k_0 r)
//   Omega_j : B_{j,m} H_m(k_j r) + C_{j,m} J_m(k_j r),   R_j <= r <= R_{j-1}
//   Omega_N : E_m J_m(k_N r)

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "mlbie/errors.hpp"
#include "mlbie/layer_config.hpp"
#include "mlbie/specfun.hpp"

namespace mlbie {

enum class BoundaryCondition { transmission, sound_hard };

struct ModeCoefficients {
  BoundaryCondition condition = BoundaryCondition::transmission;
  int m_max = 0;
  std::vector<std::complex<double>> A;
  /// B[j-1][m], C[j-1][m] for intermediate layers j = 1..N-1.
  std::vector<std::vector<std::complex<double>>> B;
  std::vector<std::vector<std::complex<double>>> C;
  std::vector<std::complex<double>> E;
  /// Condition number of each equilibrated per-order system.
  std::vector<double> condition_numbers;
  /// Largest |u_m| over the interfaces, per order; drives the truncation check.
  std::vector<double> mode_magnitudes;

  /// |A_{m_max}| / max_m |A_m| (0 when A vanishes identically).
  [[nodiscard]] double a_tail_ratio() const {
    double peak = 0.0;
    for (const auto& a : A) peak = std::max(peak, std::abs(a));
    return peak == 0.0 ? 0.0 : std::abs(A.back()) / peak;
  }
  /// Magnitude of the last retained order relative to the largest one.
  [[nodiscard]] double mode_tail_ratio() const {
    const double peak = *std::max_element(mode_magnitudes.begin(), mode_magnitudes.end());
    return peak == 0.0 ? 0.0 : mode_magnitudes.back() / peak;
  }
};

struct AnalyticOptions {
  double tail_tol = 1e-14;
  double max_condition = 1e14;
  int order_cap = kDefaultOrderCap;
  int extension_step = 8;
};

/// ceil(k_max R_0) + 16.
inline int default_mode_count(const LayerConfig& config) {
  return static_cast<int>(std::ceil(config.max_wavenumber() * config.radius(0))) + 16;
}

namespace detail {

inline void require_circles(const LayerConfig& config) {
  config.validate();
  if (!config.all_circles()) throw ConfigError("analytic reference requires circular interfaces");
}

inline double equilibrated_condition(Eigen::MatrixXcd& a, Eigen::VectorXcd& b, Eigen::VectorXd& col_scale) {
  const Eigen::Index n = a.rows();
  col_scale.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double s = a.col(c).cwiseAbs().maxCoeff();
    col_scale(c) = s > 0.0 ? 1.0 / s : 1.0;
    a.col(c) *= col_scale(c);
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const double s = a.row(r).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      a.row(r) /= s;
      b(r) /= s;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  return sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Solves the per-order transmission systems for m = 0..m_max.
inline ModeCoefficients solve_mode_coefficients(const LayerConfig& config, int m_max,
                                                const AnalyticOptions& options = {}) {
  detail::require_circles(config);
  if (m_max < 1) throw ConfigError("m_max must be >= 1");
  const int n_if = config.num_interfaces();
  const int n_unknown = 2 * n_if;
  const auto& k = config.wavenumbers;

  // outer[j]: layer j evaluated at R_j; inner[j]: layer j+1 evaluated at R_j.
  std::vector<CylinderTable> outer;
  std::vector<CylinderTable> inner;
  for (int j = 0; j < n_if; ++j) {
    const double r = config.radius(j);
    outer.push_back(cylinder_table(m_max, k[j] * r, BesselParts::j_and_y, options.order_cap));
    const bool core = (j + 1 == n_if);
    inner.push_back(cylinder_table(m_max, k[j + 1] * r, core ? BesselParts::j_only : BesselParts::j_and_y,
                                   options.order_cap));
  }

  ModeCoefficients out;
  out.condition = BoundaryCondition::transmission;
  out.m_max = m_max;
  out.A.resize(m_max + 1);
  out.E.resize(m_max + 1);
  out.B.assign(n_if - 1, std::vector<std::complex<double>>(m_max + 1));
  out.C.assign(n_if - 1, std::vector<std::complex<double>>(m_max + 1));
  out.condition_numbers.resize(m_max + 1);
  out.mode_magnitudes.resize(m_max + 1);

  // Unknown layout: [A, B_1, C_1, ..., B_{N-1}, C_{N-1}, E].
  for (int m = 0; m <= m_max; ++m) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_unknown, n_unknown);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n_unknown);
    for (int j = 0; j < n_if; ++j) {
      const int row_u = 2 * j;
      const int row_flux = 2 * j + 1;
      const double beta = config.contrast(j);
      const CylinderTable& to = outer[j];
      const CylinderTable& ti = inner[j];
      const double ko = k[j];
      const double ki = k[j + 1];
      if (j == 0) {
        a(row_u, 0) = to.hankel(m);
        a(row_flux, 0) = beta * ko * to.hankel_prime(m);
        b(row_u) = -to.j[m];
        b(row_flux) = -beta * ko * to.jprime[m];
      } else {
        a(row_u, 2 * j - 1) = to.hankel(m);
        a(row_u, 2 * j) = to.j[m];
        a(row_flux, 2 * j - 1) = beta * ko * to.hankel_prime(m);
        a(row_flux, 2 * j) = beta * ko * to.jprime[m];
      }
      if (j + 1 == n_if) {
        a(row_u, n_unknown - 1) = -ti.j[m];
        a(row_flux, n_unknown - 1) = -ki * ti.jprime[m];
      } else {
        a(row_u, 2 * j + 1) = -ti.hankel(m);
        a(row_u, 2 * j + 2) = -ti.j[m];
        a(row_flux, 2 * j + 1) = -ki * ti.hankel_prime(m);
        a(row_flux, 2 * j + 2) = -ki * ti.jprime[m];
      }
    }
    Eigen::VectorXd col_scale;
    const double cond = detail::equilibrated_condition(a, b, col_scale);
    out.condition_numbers[m] = cond;
    if (!(cond <= options.max_condition)) {
      throw SingularSystemError("per-order analytic system m = " + std::to_string(m) +
                                " is near-singular (condition " + std::to_string(cond) + ")");
    }
    const Eigen::VectorXcd scaled = a.fullPivLu().solve(b);
    const Eigen::VectorXcd x = scaled.cwiseProduct(col_scale.cast<std::complex<double>>());
    out.A[m] = x(0);
    for (int j = 1; j < n_if; ++j) {
      out.B[j - 1][m] = x(2 * j - 1);
      out.C[j - 1][m] = x(2 * j);
    }
    out.E[m] = x(n_unknown - 1);

    double mag = std::abs(outer[0].j[m] + out.A[m] * outer[0].hankel(m));
    for (int j = 1; j < n_if; ++j) {
      mag = std::max(mag, std::abs(out.B[j - 1][m] * outer[j].hankel(m) + out.C[j - 1][m] * outer[j].j[m]));
    }
    out.mode_magnitudes[m] = mag;
  }
  return out;
}

/// Default truncation, extended until both tail checks fall below tail_tol.
inline ModeCoefficients solve_mode_coefficients(const LayerConfig& config, const AnalyticOptions& options = {}) {
  int m_max = std::min(default_mode_count(config), options.order_cap);
  while (true) {
    ModeCoefficients c = solve_mode_coefficients(config, m_max, options);
    const bool converged = c.a_tail_ratio() < options.tail_tol && c.mode_tail_ratio() < options.tail_tol;
    if (converged) return c;
    if (m_max >= options.order_cap) {
      throw CapReachedError("analytic series did not reach tail tolerance within the order cap");
    }
    m_max = std::min(m_max + options.extension_step, options.order_cap);
  }
}

/// A_m = -J'_m(k_0 R_0) / H'_m(k_0 R_0) for a single sound-hard circle.
inline ModeCoefficients solve_sound_hard_coefficients(const LayerConfig& config, int m_max,
                                                      const AnalyticOptions& options = {}) {
  detail::require_circles(config);
  if (config.num_interfaces() != 1) throw ConfigError("sound-hard reference needs exactly one interface");
  if (m_max < 1) throw ConfigError("m_max must be >= 1");
  const CylinderTable t = cylinder_table(m_max, config.wavenumbers[0] * config.radius(0),
                                         BesselParts::j_and_y, options.order_cap);
  ModeCoefficients out;
  out.condition = BoundaryCondition::sound_hard;
  out.m_max = m_max;
  out.A.resize(m_max + 1);
  out.E.assign(m_max + 1, 0.0);
  out.condition_numbers.assign(m_max + 1, 1.0);
  out.mode_magnitudes.resize(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    out.A[m] = -t.jprime[m] / t.hankel_prime(m);
    out.mode_magnitudes[m] = std::abs(t.j[m] + out.A[m] * t.hankel(m));
  }
  return out;
}

inline ModeCoefficients solve_sound_hard_coefficients(const LayerConfig& config, const AnalyticOptions& options = {}) {
  int m_max = std::min(default_mode_count(config), options.order_cap);
  while (true) {
    ModeCoefficients c = solve_sound_hard_coefficients(config, m_max, options);
    if (c.a_tail_ratio() < options.tail_tol && c.mode_tail_ratio() < options.tail_tol) return c;
    if (m_max >= options.order_cap) {
      throw CapReachedError("sound-hard series did not reach tail tolerance within the order cap");
    }
    m_max = std::min(m_max + options.extension_step, options.order_cap);
  }
}

/// Value and radial derivative of the field of one layer's representation.
struct RadialSample {
  std::complex<double> value;
  std::complex<double> radial_derivative;
};

/// Evaluates layer `layer`'s series at (r, theta), whether or not r lies inside
/// that layer; used for one-sided interface limits.
inline RadialSample eval_analytic_in_layer(const ModeCoefficients& coeffs, const LayerConfig& config, int layer,
                                           double r, double theta) {
  using cd = std::complex<double>;
  const int n_if = config.num_interfaces();
  const double k = config.wavenumbers.at(layer);
  const double psi = theta - config.incident_angle();
  RadialSample out{0.0, 0.0};

  if (coeffs.condition == BoundaryCondition::sound_hard && layer > 0) return out;

  const bool core = (layer == n_if);
  const bool need_y = !core;
  const double x = k * r;
  if (need_y && !(x > 0.0)) throw DomainError("outgoing-wave expansion evaluated at r = 0");
  const CylinderTable t = cylinder_table(coeffs.m_max, x, need_y ? BesselParts::j_and_y : BesselParts::j_only);

  static constexpr cd kPowI[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  for (int m = 0; m <= coeffs.m_max; ++m) {
    const cd angular = (m == 0 ? 1.0 : 2.0) * kPowI[m % 4] * std::cos(m * psi);
    cd radial;
    cd dradial;
    if (layer == 0) {
      radial = coeffs.A[m] * t.hankel(m);
      dradial = coeffs.A[m] * k * t.hankel_prime(m);
    } else if (core) {
      radial = coeffs.E[m] * t.j[m];
      dradial = coeffs.E[m] * k * t.jprime[m];
    } else {
      const cd bm = coeffs.B[layer - 1][m];
      const cd cm = coeffs.C[layer - 1][m];
      radial = bm * t.hankel(m) + cm * t.j[m];
      dradial = k * (bm * t.hankel_prime(m) + cm * t.jprime[m]);
    }
    out.value += angular * radial;
    out.radial_derivative += angular * dradial;
  }
  if (layer == 0) {
    const double c = std::cos(psi);
    const cd incident = std::exp(cd(0.0, k * r * c));
    out.value += incident;
    out.radial_derivative += cd(0.0, k * c) * incident;
  }
  return out;
}

/// Layer of a point at polar radius r for concentric circles.
inline int circular_layer_of(const LayerConfig& config, double r) {
  for (int i = 0; i < config.num_interfaces(); ++i) {
    if (r >= config.radius(i)) return i;
  }
  return config.num_interfaces();
}

/// Total field u^ana at (r, theta).
inline std::complex<double> eval_analytic(const ModeCoefficients& coeffs, const LayerConfig& config, double r,
                                          double theta) {
  const int layer = circular_layer_of(config, r);
  return eval_analytic_in_layer(coeffs, config, layer, r, theta).value;
}

/// Sound-hard reference: exterior series, zero inside the obstacle.
inline std::complex<double> eval_sound_hard(const ModeCoefficients& coeffs, const LayerConfig& config, double r,
                                            double theta) {
  if (coeffs.condition != BoundaryCondition::sound_hard) {
    throw ConfigError("eval_sound_hard needs sound-hard coefficients");
  }
  if (r < config.radius(0)) return 0.0;
  return eval_analytic_in_layer(coeffs, config, 0, r, theta).value;
}

inline std::complex<double> eval_sound_hard(const LayerConfig& config, double r, double theta) {
  return eval_sound_hard(solve_sound_hard_coefficients(config), config, r, theta);
}

}  // namespace mlbie

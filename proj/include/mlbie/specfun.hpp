#pragma once
// Cylinder functions of integer order and real argument, and the 2D Helmholtz
// fundamental solution built on them.
//
// J_m is obtained from a power series for small arguments and from normalized
// backward recurrence (Miller) otherwise. Y_0 and Y_1 come from Neumann series
// over the same J_m sequence, higher Y_m from forward recurrence.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mlbie/errors.hpp"
#include "mlbie/vec2.hpp"

namespace mlbie {

inline constexpr int kDefaultOrderCap = 200;
inline constexpr double kDefaultSingularityFloor = 1e-14;

struct CylinderEval {
  int order = 0;
  double argument = 0.0;
  double j_value = 0.0;
  double y_value = 0.0;
  double jprime_value = 0.0;
  double yprime_value = 0.0;
};

/// J_m, Y_m and their derivatives for m = 0..max_order at one argument.
/// `y` and `yprime` are empty when Y was not requested.
struct CylinderTable {
  double argument = 0.0;
  std::vector<double> j;
  std::vector<double> jprime;
  std::vector<double> y;
  std::vector<double> yprime;

  [[nodiscard]] int max_order() const { return static_cast<int>(j.size()) - 1; }
  [[nodiscard]] std::complex<double> hankel(int m) const { return {j[m], y[m]}; }
  [[nodiscard]] std::complex<double> hankel_prime(int m) const { return {jprime[m], yprime[m]}; }
};

enum class BesselParts { j_only, j_and_y };

struct HankelValue {
  std::complex<double> value;
  std::complex<double> derivative;
};

namespace detail {

inline constexpr double kSeriesCrossover = 1.0;
inline constexpr int kSeriesTableOrder = 25;

inline int miller_start(int order, double x) {
  const double base = std::max(static_cast<double>(order), x);
  const int start = static_cast<int>(base + 14.0 * std::cbrt(base) + 20.0);
  return start + (start & 1);
}

inline double series_j(int m, double x) {
  const double q = -0.25 * x * x;
  double term = std::exp(m * std::log(0.5 * x) - std::lgamma(m + 1.0));
  if (term == 0.0) return 0.0;
  double sum = term;
  for (int k = 1; k < 100; ++k) {
    term *= q / (static_cast<double>(k) * (k + m));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Sums S0 = sum_{n>=1} (-1)^n J_2n / n and S1 = sum_{n>=1} (-1)^{n+1} (2n+1)/(n(n+1)) J_{2n+1}
// feed the Neumann series of Y_0 and Y_1.
struct NeumannSums {
  double s0 = 0.0;
  double s1 = 0.0;

  void add(int k, double jk) {
    if (k < 2) return;
    if ((k & 1) == 0) {
      const int n = k / 2;
      s0 += ((n & 1) ? -jk : jk) / n;
    } else {
      const int n = (k - 1) / 2;
      const double c = (2.0 * n + 1.0) / (static_cast<double>(n) * (n + 1));
      s1 += ((n & 1) ? c : -c) * jk;
    }
  }
};

// Fills j[m] = J_m(x) for m < j.size() by Miller's algorithm (x >= crossover).
inline NeumannSums miller_j(double x, std::span<double> j) {
  constexpr double kBig = 1e250;
  constexpr double kShrink = 1e-250;
  const int top = static_cast<int>(j.size()) - 1;
  const int start = miller_start(top, x);

  double norm = 0.0;
  NeumannSums sums;
  auto accumulate = [&](int k, double f) {
    if (k <= top) j[k] = f;
    if (k == 0) {
      norm += f;
    } else if ((k & 1) == 0) {
      norm += 2.0 * f;
    }
    sums.add(k, f);
  };

  double f_hi = 0.0;
  double f = 1e-30;
  accumulate(start, f);
  for (int k = start - 1; k >= 0; --k) {
    const double f_lo = 2.0 * (k + 1) / x * f - f_hi;
    f_hi = f;
    f = f_lo;
    accumulate(k, f);
    if (std::abs(f) > kBig) {
      f *= kShrink;
      f_hi *= kShrink;
      norm *= kShrink;
      sums.s0 *= kShrink;
      sums.s1 *= kShrink;
      for (int m = k; m <= std::min(top, start); ++m) j[m] *= kShrink;
    }
  }
  const double inv = 1.0 / norm;
  for (double& v : j) v *= inv;
  sums.s0 *= inv;
  sums.s1 *= inv;
  return sums;
}

inline NeumannSums series_table(double x, std::span<double> j) {
  NeumannSums sums;
  const int top = static_cast<int>(j.size()) - 1;
  const int last = std::max(top, kSeriesTableOrder);
  for (int m = 0; m <= last; ++m) {
    const double v = series_j(m, x);
    if (m <= top) j[m] = v;
    sums.add(m, v);
  }
  return sums;
}

// J_0..J_{j.size()-1} at x > 0, plus Y_0 and Y_1 when requested.
inline void jy_low(double x, std::span<double> j, double* y0, double* y1) {
  const NeumannSums sums = (x < kSeriesCrossover) ? series_table(x, j) : miller_j(x, j);
  if (y0 == nullptr) return;
  constexpr double two_over_pi = 2.0 / std::numbers::pi;
  const double lg = std::log(0.5 * x) + std::numbers::egamma;
  *y0 = two_over_pi * lg * j[0] - 2.0 * two_over_pi * sums.s0;
  *y1 = two_over_pi * ((lg - 1.0) * j[1] - j[0] / x + sums.s1);
}

struct Jy01 {
  double j0, j1, y0, y1;
};

// Orders 0 and 1 without allocation; bit-identical to cylinder_table(1, x).
inline Jy01 jy01(double x) {
  std::array<double, 2> j{};
  double y0 = 0.0;
  double y1 = 0.0;
  jy_low(x, j, &y0, &y1);
  return {j[0], j[1], y0, y1};
}

inline void check_order(int order, int cap) {
  if (order < 0) throw DomainError("negative Bessel order " + std::to_string(order));
  if (order > cap) {
    throw DomainError("Bessel order " + std::to_string(order) + " exceeds cap " + std::to_string(cap));
  }
}

}  // namespace detail

/// Table of J_m (and optionally Y_m) with derivatives for m = 0..max_order.
inline CylinderTable cylinder_table(int max_order, double x, BesselParts parts = BesselParts::j_and_y,
                                    int order_cap = kDefaultOrderCap) {
  detail::check_order(max_order, order_cap);
  const bool want_y = parts == BesselParts::j_and_y;
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("Bessel argument must be finite and >= 0");
  if (want_y && x == 0.0) throw DomainError("Y_m is singular at x = 0");

  const int top = std::max(max_order, 1);
  CylinderTable t;
  t.argument = x;
  t.j.assign(top + 1, 0.0);
  t.jprime.assign(top + 1, 0.0);

  if (x == 0.0) {
    t.j[0] = 1.0;
    t.jprime[1] = 0.5;
  } else {
    double y0 = 0.0;
    double y1 = 0.0;
    detail::jy_low(x, t.j, want_y ? &y0 : nullptr, want_y ? &y1 : nullptr);
    t.jprime[0] = -t.j[1];
    for (int m = 1; m <= top; ++m) t.jprime[m] = t.j[m - 1] - (m / x) * t.j[m];

    if (want_y) {
      t.y.assign(top + 1, 0.0);
      t.yprime.assign(top + 1, 0.0);
      t.y[0] = y0;
      t.y[1] = y1;
      for (int m = 1; m < top; ++m) {
        t.y[m + 1] = (2.0 * m / x) * t.y[m] - t.y[m - 1];
        if (!std::isfinite(t.y[m + 1])) {
          throw OverflowError("Y_" + std::to_string(m + 1) + "(" + std::to_string(x) + ") overflows");
        }
      }
      t.yprime[0] = -t.y[1];
      for (int m = 1; m <= top; ++m) {
        t.yprime[m] = t.y[m - 1] - (m / x) * t.y[m];
        if (!std::isfinite(t.yprime[m])) {
          throw OverflowError("Y'_" + std::to_string(m) + "(" + std::to_string(x) + ") overflows");
        }
      }
    }
  }
  const auto keep = static_cast<std::size_t>(max_order + 1);
  t.j.resize(keep);
  t.jprime.resize(keep);
  if (want_y) {
    t.y.resize(keep);
    t.yprime.resize(keep);
  }
  return t;
}

inline CylinderEval bessel_jy(int order, double x, BesselParts parts = BesselParts::j_and_y,
                              int order_cap = kDefaultOrderCap) {
  const CylinderTable t = cylinder_table(order, x, parts, order_cap);
  CylinderEval e;
  e.order = order;
  e.argument = x;
  e.j_value = t.j[order];
  e.jprime_value = t.jprime[order];
  if (parts == BesselParts::j_and_y) {
    e.y_value = t.y[order];
    e.yprime_value = t.yprime[order];
  } else {
    e.y_value = std::numeric_limits<double>::quiet_NaN();
    e.yprime_value = std::numeric_limits<double>::quiet_NaN();
  }
  return e;
}

/// H_m^(1)(x) = J_m(x) + i Y_m(x) and its derivative.
inline HankelValue hankel1(int order, double x, int order_cap = kDefaultOrderCap) {
  if (!(x > 0.0)) throw DomainError("Hankel function requires x > 0");
  const CylinderEval e = bessel_jy(order, x, BesselParts::j_and_y, order_cap);
  return {{e.j_value, e.y_value}, {e.jprime_value, e.yprime_value}};
}

/// Phi(x, y) = (i/4) H_0^(1)(k |x - y|).
inline std::complex<double> fundamental_solution(double k, Vec2 x, Vec2 y,
                                                 double floor = kDefaultSingularityFloor) {
  const double d = norm(x - y);
  if (d < floor) throw SingularityError("fundamental solution evaluated at coincident points");
  const HankelValue h = hankel1(0, k * d);
  return std::complex<double>(0.0, 0.25) * h.value;
}

/// dPhi/dn_y = (ik/4) H_1^(1)(k d) ((x - y) . n_y) / d.
inline std::complex<double> fundamental_solution_normal_derivative(double k, Vec2 x, Vec2 y, Vec2 n_y,
                                                                   double floor = kDefaultSingularityFloor) {
  const Vec2 diff = x - y;
  const double d = norm(diff);
  if (d < floor) throw SingularityError("fundamental solution evaluated at coincident points");
  const HankelValue h = hankel1(1, k * d);
  return std::complex<double>(0.0, 0.25 * k) * h.value * (dot(diff, n_y) / d);
}

}  // namespace mlbie

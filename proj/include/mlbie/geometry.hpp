#pragma once
// Smooth closed interfaces r(theta) = R + a cos(n theta) around the origin and
// their equispaced parameter grids.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mlbie/errors.hpp"
#include "mlbie/vec2.hpp"

namespace mlbie {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class CurveKind { circle, star };

struct CurveDerivatives {
  Vec2 first;
  Vec2 second;
};

/// Star-shaped curve x(theta) = (R + a cos(n theta)) (cos theta, sin theta),
/// counter-clockwise. A circle is the a = 0 (or n = 0) member of the family.
class InterfaceCurve {
 public:
  InterfaceCurve() = default;

  static InterfaceCurve circle(double radius) { return InterfaceCurve(CurveKind::circle, radius, 0.0, 0); }

  static InterfaceCurve star(double radius, double amplitude, int lobes) {
    return InterfaceCurve(CurveKind::star, radius, amplitude, lobes);
  }

  [[nodiscard]] CurveKind kind() const { return kind_; }
  [[nodiscard]] double base_radius() const { return radius_; }
  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] int lobes() const { return lobes_; }

  /// True when the curve is geometrically a circle (a = 0 or n = 0).
  [[nodiscard]] bool is_circle() const { return amplitude_ == 0.0 || lobes_ == 0; }

  /// rho(theta), the polar radius of the curve.
  [[nodiscard]] double radius_at(double theta) const {
    return radius_ + amplitude_ * std::cos(lobes_ * theta);
  }
  [[nodiscard]] double radius_derivative(double theta) const {
    return -amplitude_ * lobes_ * std::sin(lobes_ * theta);
  }
  [[nodiscard]] double min_radius() const { return radius_ - amplitude_; }
  [[nodiscard]] double max_radius() const { return radius_ + amplitude_; }

  [[nodiscard]] Vec2 point(double theta) const {
    const double rho = radius_at(theta);
    return {rho * std::cos(theta), rho * std::sin(theta)};
  }

  [[nodiscard]] CurveDerivatives derivatives(double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double rho = radius_at(theta);
    const double d1 = radius_derivative(theta);
    const double d2 = -amplitude_ * lobes_ * lobes_ * std::cos(lobes_ * theta);
    CurveDerivatives d;
    d.first = {d1 * c - rho * s, d1 * s + rho * c};
    d.second = {d2 * c - 2.0 * d1 * s - rho * c, d2 * s + 2.0 * d1 * c - rho * s};
    return d;
  }

  /// Signed curvature, positive for the counter-clockwise convex case.
  [[nodiscard]] double curvature(double theta) const {
    const CurveDerivatives d = derivatives(theta);
    const double speed = norm(d.first);
    return cross(d.first, d.second) / (speed * speed * speed);
  }

  /// Outward unit normal (right of the counter-clockwise tangent).
  [[nodiscard]] Vec2 normal(double theta) const {
    const Vec2 t = derivatives(theta).first;
    const double s = norm(t);
    return {t.y / s, -t.x / s};
  }

  /// Signed distance estimate from p to the curve along the polar ray through p,
  /// corrected by the local slope; positive outside.
  [[nodiscard]] double signed_distance_estimate(Vec2 p) const {
    const double theta = std::atan2(p.y, p.x);
    const double rho = radius_at(theta);
    const double drho = radius_derivative(theta);
    return (std::hypot(p.x, p.y) - rho) * rho / std::hypot(rho, drho);
  }

 private:
  InterfaceCurve(CurveKind kind, double radius, double amplitude, int lobes)
      : kind_(kind), radius_(radius), amplitude_(amplitude), lobes_(lobes) {
    if (!(radius > 0.0)) throw ConfigError("interface radius must be positive");
    if (!(amplitude >= 0.0)) throw ConfigError("star amplitude must be >= 0");
    if (lobes < 0) throw ConfigError("star lobe count must be >= 0");
    if (!(amplitude < radius)) throw ConfigError("star amplitude must be smaller than the base radius");
  }

  CurveKind kind_ = CurveKind::circle;
  double radius_ = 1.0;
  double amplitude_ = 0.0;
  int lobes_ = 0;
};

/// Nodes theta_m = 2 pi m / M of one interface with the geometric data the
/// quadratures need. `tangents` are x'(theta_m); `jacobians` are |x'(theta_m)|.
struct BoundaryGrid {
  InterfaceCurve curve;
  int M = 0;
  std::vector<double> nodes;
  std::vector<Vec2> points;
  std::vector<Vec2> tangents;
  std::vector<Vec2> normals;
  std::vector<double> jacobians;
  std::vector<double> curvatures;

  [[nodiscard]] double step() const { return kTwoPi / M; }
  /// Mean arclength between nodes.
  [[nodiscard]] double spacing() const {
    double length = 0.0;
    for (double j : jacobians) length += j;
    return length * step() / M;
  }
};

inline void require_even_count(int M) {
  if (M < 4 || (M % 2) != 0) {
    throw ConfigError("equispaced grids need an even node count >= 4, got " + std::to_string(M));
  }
}

inline BoundaryGrid make_grid(const InterfaceCurve& curve, int M) {
  require_even_count(M);
  BoundaryGrid g;
  g.curve = curve;
  g.M = M;
  g.nodes.resize(M);
  g.points.resize(M);
  g.tangents.resize(M);
  g.normals.resize(M);
  g.jacobians.resize(M);
  g.curvatures.resize(M);
  for (int m = 0; m < M; ++m) {
    const double theta = kTwoPi * m / M;
    const CurveDerivatives d = curve.derivatives(theta);
    const double speed = norm(d.first);
    g.nodes[m] = theta;
    g.points[m] = curve.point(theta);
    g.tangents[m] = d.first;
    g.normals[m] = {d.first.y / speed, -d.first.x / speed};
    g.jacobians[m] = speed;
    g.curvatures[m] = cross(d.first, d.second) / (speed * speed * speed);
  }
  return g;
}

/// Curve length by the periodic trapezoid rule on M nodes.
inline double curve_length(const InterfaceCurve& curve, int M) {
  double sum = 0.0;
  for (int m = 0; m < M; ++m) sum += norm(curve.derivatives(kTwoPi * m / M).first);
  return sum * kTwoPi / M;
}

}  // namespace mlbie

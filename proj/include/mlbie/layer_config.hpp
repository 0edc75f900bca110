#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mlbie/errors.hpp"
#include "mlbie/geometry.hpp"
#include "mlbie/vec2.hpp"

namespace mlbie {

/// N interfaces Gamma_0..Gamma_{N-1} (outermost first) separating N+1 layers
/// Omega_0 (exterior) .. Omega_N (core), each with its own wavenumber.
struct LayerConfig {
  std::vector<double> wavenumbers;
  std::vector<InterfaceCurve> interfaces;
  /// Direction of the incident plane wave exp(i k_0 a.x).
  Vec2 incident_direction{0.0, 1.0};

  [[nodiscard]] int num_interfaces() const { return static_cast<int>(interfaces.size()); }
  [[nodiscard]] int num_layers() const { return num_interfaces() + 1; }
  [[nodiscard]] double radius(int i) const { return interfaces.at(i).base_radius(); }

  /// beta_j = k_{j+1}^2 / k_j^2 across Gamma_j.
  [[nodiscard]] double contrast(int j) const {
    const double ratio = wavenumbers.at(j + 1) / wavenumbers.at(j);
    return ratio * ratio;
  }
  [[nodiscard]] std::vector<double> contrasts() const {
    std::vector<double> b;
    for (int j = 0; j < num_interfaces(); ++j) b.push_back(contrast(j));
    return b;
  }

  [[nodiscard]] bool all_circles() const {
    return std::all_of(interfaces.begin(), interfaces.end(), [](const InterfaceCurve& c) { return c.is_circle(); });
  }

  /// Largest wavenumber of the two layers adjacent to Gamma_j.
  [[nodiscard]] double adjacent_max_wavenumber(int j) const {
    return std::max(wavenumbers.at(j), wavenumbers.at(j + 1));
  }

  [[nodiscard]] double max_wavenumber() const { return *std::max_element(wavenumbers.begin(), wavenumbers.end()); }

  /// Angle alpha of the incident direction, a = (cos alpha, sin alpha).
  [[nodiscard]] double incident_angle() const { return std::atan2(incident_direction.y, incident_direction.x); }

  /// Layer index containing p (interfaces are star-shaped about the origin).
  [[nodiscard]] int layer_of(Vec2 p) const {
    const double r = std::hypot(p.x, p.y);
    const double theta = std::atan2(p.y, p.x);
    for (int i = 0; i < num_interfaces(); ++i) {
      if (r >= interfaces[i].radius_at(theta)) return i;
    }
    return num_interfaces();
  }

  void validate() const {
    if (interfaces.empty()) throw ConfigError("at least one interface is required");
    if (wavenumbers.size() != interfaces.size() + 1) {
      throw ConfigError("need one more wavenumber than interfaces (got " + std::to_string(wavenumbers.size()) +
                        " wavenumbers for " + std::to_string(interfaces.size()) + " interfaces)");
    }
    for (double k : wavenumbers) {
      if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("wavenumbers must be positive");
    }
    for (std::size_t i = 1; i < interfaces.size(); ++i) {
      if (!(interfaces[i - 1].min_radius() > interfaces[i].max_radius())) {
        throw ConfigError("interfaces must be strictly nested (radii strictly decreasing)");
      }
    }
    const double a = norm(incident_direction);
    if (std::abs(a - 1.0) > 1e-12) throw ConfigError("incident direction must be a unit vector");
  }

  static LayerConfig concentric(std::vector<double> k, const std::vector<double>& radii) {
    LayerConfig c;
    c.wavenumbers = std::move(k);
    for (double r : radii) c.interfaces.push_back(InterfaceCurve::circle(r));
    c.validate();
    return c;
  }
};

}  // namespace mlbie

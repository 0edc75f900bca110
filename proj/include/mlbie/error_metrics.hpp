#pragma once
// L2 error functionals against the analytic reference: interface traces,
// circular rings, and the volume with bands around the interfaces removed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlbie/analytic.hpp"
#include "mlbie/bie.hpp"
#include "mlbie/errors.hpp"

namespace mlbie {

/// Exclusion vicinity of Gamma_i: |r - R_i| < max(min_width, factor * h_i), h_i = 2 pi R_i / M_i.
struct ExclusionBand {
  double min_width = 0.15;
  double factor = 5.0;

  [[nodiscard]] double width(double radius, int M) const { return std::max(min_width, factor * kTwoPi * radius / M); }
};

enum class ErrorLocation { boundary, ring, volume };

/// Weight of the discrete sum: 2 pi / M (parameter-measure L2) or 1 / M (root mean square).
enum class ErrorNormalization { parameter, mean };

struct ErrorReport {
  ErrorLocation location = ErrorLocation::boundary;
  /// Interface index for boundary errors, -1 otherwise.
  int interface_index = -1;
  /// Ring radius for ring errors.
  double radius = 0.0;
  double value = 0.0;
  bool skipped = false;
  std::vector<int> M_used;
  double excluded_band = 0.0;
};

/// ((2 pi / M) sum |a_m - b_m|^2)^(1/2), or with weight 1 / M for the mean normalization.
inline double discrete_l2_distance(std::span<const cplx> a, std::span<const cplx> b,
                                   ErrorNormalization normalization = ErrorNormalization::parameter) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("sample vectors must have equal nonzero length");
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += std::norm(a[m] - b[m]);
  const double weight = normalization == ErrorNormalization::parameter ? kTwoPi : 1.0;
  return std::sqrt(s * weight / static_cast<double>(a.size()));
}

/// Analytic trace of layer i's field on Gamma_i at the solution's nodes.
inline std::vector<cplx> analytic_trace(const TraceSolution& sol, const ModeCoefficients& coeffs, int i) {
  const BoundaryGrid& g = sol.grids.at(i);
  std::vector<cplx> out(g.M);
  for (int m = 0; m < g.M; ++m) {
    out[m] = eval_analytic_in_layer(coeffs, sol.config, i, sol.config.radius(i), g.nodes[m]).value;
  }
  return out;
}

inline double boundary_l2_error(const TraceSolution& sol, const ModeCoefficients& coeffs, int i,
                                ErrorNormalization normalization = ErrorNormalization::parameter) {
  return discrete_l2_distance(sol.u_traces.at(i), analytic_trace(sol, coeffs, i), normalization);
}

inline std::vector<double> boundary_l2_errors(const TraceSolution& sol, const ModeCoefficients& coeffs,
                                              ErrorNormalization normalization = ErrorNormalization::parameter) {
  std::vector<double> e;
  for (int i = 0; i < sol.config.num_interfaces(); ++i) e.push_back(boundary_l2_error(sol, coeffs, i, normalization));
  return e;
}

/// Ring error at radius r sampled with M_i points (i = layer index, or N-1 in the core);
/// empty when r falls inside an exclusion band.
inline std::optional<double> radial_l2_error(const TraceSolution& sol, const ModeCoefficients& coeffs, double r,
                                             const ExclusionBand& band = {}) {
  if (!(r >= 0.0)) throw ConfigError("ring radius must be >= 0");
  const LayerConfig& config = sol.config;
  const int n_if = config.num_interfaces();
  for (int i = 0; i < n_if; ++i) {
    if (std::abs(r - config.radius(i)) < band.width(config.radius(i), sol.grids[i].M)) return std::nullopt;
  }
  const int layer = circular_layer_of(config, r);
  const int M = sol.grids[std::min(layer, n_if - 1)].M;
  std::vector<cplx> bie(M);
  std::vector<cplx> ana(M);
  for (int m = 0; m < M; ++m) {
    const double theta = kTwoPi * m / M;
    bie[m] = eval_field(sol, {r * std::cos(theta), r * std::sin(theta)}).value;
    ana[m] = eval_analytic_in_layer(coeffs, config, layer, r, theta).value;
  }
  return discrete_l2_distance(bie, ana);
}

inline ErrorReport radial_report(const TraceSolution& sol, const ModeCoefficients& coeffs, double r,
                                 const ExclusionBand& band = {}) {
  ErrorReport rep;
  rep.location = ErrorLocation::ring;
  rep.radius = r;
  rep.M_used = sol.point_counts();
  const auto e = radial_l2_error(sol, coeffs, r, band);
  rep.skipped = !e.has_value();
  rep.value = e.value_or(0.0);
  for (int i = 0; i < sol.config.num_interfaces(); ++i) {
    rep.excluded_band = std::max(rep.excluded_band, band.width(sol.config.radius(i), sol.grids[i].M));
  }
  return rep;
}

/// Log-uniform radii per layer (linear in the core, which contains r = 0).
inline std::vector<double> default_sweep_radii(const LayerConfig& config, int per_layer = 60,
                                               double outer_factor = 2.0) {
  std::vector<double> radii;
  const int n_if = config.num_interfaces();
  for (int j = n_if; j >= 0; --j) {
    const double lo = (j == n_if) ? 0.0 : config.radius(j);
    const double hi = (j == 0) ? outer_factor * config.radius(0) : config.radius(j - 1);
    for (int s = 0; s < per_layer; ++s) {
      const double t = (s + 0.5) / per_layer;
      radii.push_back(lo == 0.0 ? t * hi : lo * std::pow(hi / lo, t));
    }
  }
  return radii;
}

struct VolumeQuadrature {
  int angular_points = 128;
  /// Composite Simpson intervals per layer (rounded up to even).
  int radial_intervals = 32;
  /// Omega_0 is truncated at outer_factor * R_0.
  double outer_factor = 2.0;
};

/// Radial intervals [lo, hi] of the perforated layers Omega_j minus omega_j.
inline std::vector<std::pair<double, double>> perforated_intervals(const LayerConfig& config,
                                                                   const std::vector<int>& M,
                                                                   const ExclusionBand& band,
                                                                   double outer_factor) {
  const int n_if = config.num_interfaces();
  std::vector<std::pair<double, double>> spans;
  for (int j = 0; j <= n_if; ++j) {
    const double lo = (j == n_if) ? 0.0 : config.radius(j) + band.width(config.radius(j), M[j]);
    const double hi = (j == 0) ? outer_factor * config.radius(0)
                               : config.radius(j - 1) - band.width(config.radius(j - 1), M[j - 1]);
    if (!(hi > lo)) {
      throw ConfigError("exclusion band empties layer " + std::to_string(j) + " of the perforated domain");
    }
    spans.emplace_back(lo, hi);
  }
  return spans;
}

/// sum_j || u_j - u_j^ana ||_{L2(Omega_j \ omega_j)} by trapezoid-in-theta, Simpson-in-r quadrature.
inline double perforated_volume_error(const TraceSolution& sol, const ModeCoefficients& coeffs,
                                      const ExclusionBand& band = {}, const VolumeQuadrature& quad = {}) {
  const LayerConfig& config = sol.config;
  const auto spans = perforated_intervals(config, sol.point_counts(), band, quad.outer_factor);
  const int nr = quad.radial_intervals + (quad.radial_intervals & 1);
  const int nt = quad.angular_points;
  double total = 0.0;
  for (int j = 0; j < static_cast<int>(spans.size()); ++j) {
    const auto [lo, hi] = spans[j];
    const double dr = (hi - lo) / nr;
    double layer_sum = 0.0;
    for (int s = 0; s <= nr; ++s) {
      const double r = lo + s * dr;
      const double w_r = (s == 0 || s == nr) ? 1.0 : ((s & 1) ? 4.0 : 2.0);
      double ring = 0.0;
      for (int t = 0; t < nt; ++t) {
        const double theta = kTwoPi * t / nt;
        const cplx u = eval_field(sol, {r * std::cos(theta), r * std::sin(theta)}).value;
        const cplx ua = eval_analytic_in_layer(coeffs, config, j, r, theta).value;
        ring += std::norm(u - ua);
      }
      layer_sum += w_r * r * ring;
    }
    total += std::sqrt(layer_sum * (dr / 3.0) * (kTwoPi / nt));
  }
  return total;
}

}  // namespace mlbie

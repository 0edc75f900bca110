#pragma once
// Metric-based adaptation driven by the recovered Hessian of Re(u).
//
// The field is sampled on a layer-fitted polar grid that skips the interface
// bands; Hessians come from central differences, the optimal metric and the
// interpolation error bound E_p from their closed forms, and per-interface point
// counts from the tangential metric length of each curve.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mlbie/analytic.hpp"
#include "mlbie/bie.hpp"
#include "mlbie/error_metrics.hpp"
#include "mlbie/errors.hpp"
#include "mlbie/geometry.hpp"
#include "mlbie/layer_config.hpp"

namespace mlbie {

/// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  [[nodiscard]] double det() const { return xx * yy - xy * xy; }
  [[nodiscard]] double trace() const { return xx + yy; }
  [[nodiscard]] double quad(Vec2 v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
  friend Sym2 operator*(double s, Sym2 a) { return {s * a.xx, s * a.xy, s * a.yy}; }
};

struct SymEigen {
  double lambda1;
  double lambda2;
  /// Unit eigenvector of lambda1; the second is its rotation by 90 degrees.
  Vec2 v1;
};

inline SymEigen eigen_decompose(const Sym2& a) {
  const double mean = 0.5 * (a.xx + a.yy);
  const double half_diff = 0.5 * (a.xx - a.yy);
  const double rad = std::hypot(half_diff, a.xy);
  const double angle = 0.5 * std::atan2(a.xy, half_diff);
  return {mean + rad, mean - rad, {std::cos(angle), std::sin(angle)}};
}

inline Sym2 from_eigen(double l1, double l2, Vec2 v1) {
  const Vec2 v2{-v1.y, v1.x};
  return {l1 * v1.x * v1.x + l2 * v2.x * v2.x, l1 * v1.x * v1.y + l2 * v2.x * v2.y,
          l1 * v1.y * v1.y + l2 * v2.y * v2.y};
}

struct SamplePoint {
  Vec2 x;
  int layer = 0;
  /// Quadrature weight (area of the sample's cell).
  double weight = 0.0;
  /// Distance along the sample's ray to the nearest band edge.
  double clearance = 0.0;
};

/// Samples of layer j occupy indices first + c * n_r + s, column c (angle
/// (c + 1/2) 2pi / n_theta) and row s (radially outward).
struct LayerBlock {
  int layer = 0;
  std::size_t first = 0;
  int n_theta = 0;
  int n_r = 0;
};

struct SampleGrid {
  std::vector<SamplePoint> points;
  std::vector<LayerBlock> blocks;
  /// Band half-widths used per interface.
  std::vector<double> bands;
  double outer_radius = 0.0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

namespace detail {

// Radial extent [lo, hi] of layer j along angle theta, bands removed.
inline std::pair<double, double> layer_extent(const LayerConfig& config, const std::vector<double>& bands,
                                              double outer_radius, int j, double theta) {
  const int n_if = config.num_interfaces();
  const double lo = (j == n_if) ? 0.0 : config.interfaces[j].radius_at(theta) + bands[j];
  const double hi = (j == 0) ? outer_radius : config.interfaces[j - 1].radius_at(theta) - bands[j - 1];
  return {lo, hi};
}

// Band widths around each interface, capped at a quarter of the thinner
// neighbouring layer so that coarse point counts never empty a layer.
inline std::vector<double> sampling_bands(const LayerConfig& config, const std::vector<int>& M,
                                          const ExclusionBand& band, double outer_radius) {
  const int n_if = config.num_interfaces();
  std::vector<double> bands;
  for (int i = 0; i < n_if; ++i) {
    const double above = (i == 0) ? outer_radius - config.interfaces[0].max_radius()
                                  : config.interfaces[i - 1].min_radius() - config.interfaces[i].max_radius();
    const double below =
        (i + 1 == n_if) ? config.interfaces[i].min_radius()
                        : config.interfaces[i].min_radius() - config.interfaces[i + 1].max_radius();
    bands.push_back(std::min(band.width(config.radius(i), M[i]), 0.25 * std::min(above, below)));
  }
  return bands;
}

}  // namespace detail

/// Layer-fitted polar grid with `counts[j]` (approximate) samples in layer j.
inline SampleGrid make_sample_grid(const LayerConfig& config, const std::vector<int>& M,
                                   const std::vector<int>& counts, const ExclusionBand& band = {},
                                   double outer_factor = 2.0) {
  config.validate();
  const int n_if = config.num_interfaces();
  if (static_cast<int>(M.size()) != n_if || static_cast<int>(counts.size()) != n_if + 1) {
    throw ConfigError("sample grid needs one M per interface and one count per layer");
  }
  SampleGrid grid;
  grid.outer_radius = outer_factor * config.interfaces[0].max_radius();
  grid.bands = detail::sampling_bands(config, M, band, grid.outer_radius);

  for (int j = 0; j <= n_if; ++j) {
    const double lo = (j == n_if) ? 0.0 : config.radius(j) + grid.bands[j];
    const double hi = (j == 0) ? grid.outer_radius : config.radius(j - 1) - grid.bands[j - 1];
    if (!(hi > lo)) throw ConfigError("exclusion bands leave layer " + std::to_string(j) + " empty");
    const double width = hi - lo;
    const double circumference = kTwoPi * 0.5 * (lo + hi);
    const int total = std::max(counts[j], 64);
    const int n_theta = 8 * std::max(2, static_cast<int>(std::lround(std::sqrt(total * circumference / width) / 8.0)));
    const int n_r = std::max(3, static_cast<int>(std::lround(static_cast<double>(total) / n_theta)));

    LayerBlock blk{j, grid.points.size(), n_theta, n_r};
    const double dtheta = kTwoPi / n_theta;
    for (int c = 0; c < n_theta; ++c) {
      const double theta = (c + 0.5) * dtheta;
      const auto [a, b] = detail::layer_extent(config, grid.bands, grid.outer_radius, j, theta);
      if (!(b > a)) throw ConfigError("exclusion bands leave layer " + std::to_string(j) + " empty");
      const double dr = (b - a) / n_r;
      const Vec2 dir{std::cos(theta), std::sin(theta)};
      for (int s = 0; s < n_r; ++s) {
        const double r = a + (s + 0.5) * dr;
        SamplePoint p;
        p.x = r * dir;
        p.layer = j;
        p.weight = r * dr * dtheta;
        const double below = (j == n_if) ? std::numeric_limits<double>::infinity() : r - a;
        const double above = (j == 0) ? std::numeric_limits<double>::infinity() : b - r;
        p.clearance = std::min(below, above);
        grid.points.push_back(p);
      }
    }
    grid.blocks.push_back(blk);
  }
  return grid;
}

/// Value of the field represented in `layer` at x.
using LayerField = std::function<cplx(int layer, Vec2 x)>;

struct HessianField {
  std::vector<Sym2> H;
  std::vector<bool> valid;
  int dropped = 0;
};

/// Central differences of Re(u) with step min(h_fd, clearance / 2); points whose
/// step would fall below min_step are dropped.
inline HessianField recover_hessian(const LayerField& field, const SampleGrid& grid, double h_fd = 1e-3,
                                    double min_step = 1e-6) {
  HessianField out;
  out.H.resize(grid.size());
  out.valid.assign(grid.size(), false);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const SamplePoint& p = grid.points[q];
    const double h = std::min(h_fd, 0.5 * p.clearance);
    if (!(h >= min_step)) {
      ++out.dropped;
      continue;
    }
    auto f = [&](double dx, double dy) { return field(p.layer, {p.x.x + dx, p.x.y + dy}).real(); };
    const double c = f(0.0, 0.0);
    const double xp = f(h, 0.0);
    const double xm = f(-h, 0.0);
    const double yp = f(0.0, h);
    const double ym = f(0.0, -h);
    const double pp = f(h, h);
    const double pm = f(h, -h);
    const double mp = f(-h, h);
    const double mm = f(-h, -h);
    const double h2 = h * h;
    const double hxy = (pp - pm - mp + mm) / (4.0 * h2);
    out.H[q] = {(xp - 2.0 * c + xm) / h2, hxy, (yp - 2.0 * c + ym) / h2};
    out.valid[q] = true;
  }
  return out;
}

/// three_d: N^(2/3), p/(2p+3), -1/(2p+3) (default); two_d: N, p/(2p+2), -1/(2p+2).
enum class ExponentSet { three_d, two_d };

/// Exponents of T = N^a (int det|H|^b)^(-a) det|H|^c |H|.
struct MetricExponents {
  double complexity;
  double integrand;
  double local;
};

inline MetricExponents metric_exponents(ExponentSet set, int p) {
  if (set == ExponentSet::three_d) return {2.0 / 3.0, p / (2.0 * p + 3.0), -1.0 / (2.0 * p + 3.0)};
  return {1.0, p / (2.0 * p + 2.0), -1.0 / (2.0 * p + 2.0)};
}

/// |H| with absolute eigenvalues floored at lambda_min, per valid sample.
struct AbsHessian {
  std::vector<Sym2> abs_h;
  std::vector<double> det;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

inline AbsHessian absolute_hessians(const HessianField& hf, double relative_floor = 1e-8) {
  AbsHessian a;
  a.abs_h.resize(hf.H.size());
  a.det.assign(hf.H.size(), 0.0);
  std::vector<SymEigen> eig(hf.H.size());
  for (std::size_t q = 0; q < hf.H.size(); ++q) {
    if (!hf.valid[q]) continue;
    eig[q] = eigen_decompose(hf.H[q]);
    a.lambda_max = std::max({a.lambda_max, std::abs(eig[q].lambda1), std::abs(eig[q].lambda2)});
  }
  a.lambda_min = relative_floor * a.lambda_max;
  if (a.lambda_max == 0.0) return a;
  for (std::size_t q = 0; q < hf.H.size(); ++q) {
    if (!hf.valid[q]) continue;
    const double l1 = std::max(std::abs(eig[q].lambda1), a.lambda_min);
    const double l2 = std::max(std::abs(eig[q].lambda2), a.lambda_min);
    a.abs_h[q] = from_eigen(l1, l2, eig[q].v1);
    a.det[q] = l1 * l2;
  }
  return a;
}

struct MetricField {
  std::vector<Sym2> T;
  std::vector<bool> valid;
  double lambda_min = 0.0;
  ExponentSet exponents = ExponentSet::three_d;
  int p = 2;
  double N = 0.0;
  /// int sqrt(det T) dx over the sampled domain.
  double realized_complexity = 0.0;
  /// Same integral restricted to each layer.
  std::vector<double> layer_complexity;
};

namespace detail {

inline void check_weights(const HessianField& hf, const SampleGrid& grid) {
  if (hf.H.size() != grid.size()) throw ConfigError("Hessian field does not match the sample grid");
}

inline double det_integral(const AbsHessian& a, const HessianField& hf, const SampleGrid& grid, double expo) {
  double s = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    if (hf.valid[q] && a.det[q] > 0.0) s += grid.points[q].weight * std::pow(a.det[q], expo);
  }
  return s;
}

}  // namespace detail

inline MetricField optimal_metric(const HessianField& hf, const SampleGrid& grid, int p, double N,
                                  ExponentSet set = ExponentSet::three_d) {
  detail::check_weights(hf, grid);
  if (p < 1) throw ConfigError("norm index p must be >= 1");
  if (!(N > 0.0)) throw ConfigError("complexity must be positive");
  const AbsHessian a = absolute_hessians(hf);
  if (a.lambda_max == 0.0) throw DomainError("degenerate field: every recovered Hessian vanishes");
  const MetricExponents e = metric_exponents(set, p);
  const double integral = detail::det_integral(a, hf, grid, e.integrand);
  const double global = std::pow(N, e.complexity) * std::pow(integral, -e.complexity);

  MetricField m;
  m.T.resize(grid.size());
  m.valid = hf.valid;
  m.lambda_min = a.lambda_min;
  m.exponents = set;
  m.p = p;
  m.N = N;
  int n_layers = 0;
  for (const auto& b : grid.blocks) n_layers = std::max(n_layers, b.layer + 1);
  m.layer_complexity.assign(n_layers, 0.0);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    if (!hf.valid[q]) continue;
    m.T[q] = (global * std::pow(a.det[q], e.local)) * a.abs_h[q];
    const double c = grid.points[q].weight * std::sqrt(std::max(m.T[q].det(), 0.0));
    m.realized_complexity += c;
    m.layer_complexity[grid.points[q].layer] += c;
  }
  return m;
}

/// E_p = (1 / (4 N)) (int det|H|^(p / (2 (p + 1))))^((p + 1) / p); the true
/// interpolation error of the adapted mesh lies within [E_p / 2, 2 E_p].
inline double interpolation_error_bound(const HessianField& hf, const SampleGrid& grid, int p, double N) {
  detail::check_weights(hf, grid);
  if (p < 1) throw ConfigError("norm index p must be >= 1");
  if (!(N > 0.0)) throw ConfigError("complexity must be positive");
  const AbsHessian a = absolute_hessians(hf);
  if (a.lambda_max == 0.0) return 0.0;
  const double integral = detail::det_integral(a, hf, grid, p / (2.0 * (p + 1.0)));
  return 0.25 / N * std::pow(integral, (p + 1.0) / p);
}

inline int round_to_even(double v) { return 2 * static_cast<int>(std::lround(0.5 * v)); }

namespace detail {

// Metric of the sample in `blk` nearest to interface-adjacent row `row` at angle theta,
// walking inward past dropped samples.
inline std::optional<Sym2> edge_metric(const MetricField& m, const LayerBlock& blk, double theta, bool lower_edge) {
  double u = theta / kTwoPi * blk.n_theta - 0.5;
  u -= std::floor(u / blk.n_theta) * blk.n_theta;
  const int c = static_cast<int>(std::lround(u)) % blk.n_theta;
  for (int step = 0; step < blk.n_r; ++step) {
    const int s = lower_edge ? step : blk.n_r - 1 - step;
    const std::size_t q = blk.first + static_cast<std::size_t>(c) * blk.n_r + s;
    if (m.valid[q]) return m.T[q];
  }
  return std::nullopt;
}

}  // namespace detail

/// M_i = round_even(integral over Gamma_i of sqrt(t^T T t) ds), T taken from the
/// nearest samples on both sides (larger value kept), at least `floor`.
inline std::vector<int> boundary_point_counts(const MetricField& metric, const SampleGrid& grid,
                                              const LayerConfig& config, int floor = 16, int nodes = 512) {
  const int n_if = config.num_interfaces();
  std::vector<int> out;
  for (int i = 0; i < n_if; ++i) {
    const LayerBlock* outer = nullptr;
    const LayerBlock* inner = nullptr;
    for (const auto& b : grid.blocks) {
      if (b.layer == i) outer = &b;
      if (b.layer == i + 1) inner = &b;
    }
    if (outer == nullptr || inner == nullptr) throw ConfigError("sample grid lacks a layer adjacent to an interface");
    double length = 0.0;
    for (int q = 0; q < nodes; ++q) {
      // Midpoint nodes never sit exactly between two sample columns.
      const double theta = kTwoPi * (q + 0.5) / nodes;
      const Vec2 tangent = config.interfaces[i].derivatives(theta).first;
      const double speed = norm(tangent);
      const Vec2 t = (1.0 / speed) * tangent;
      double best = 0.0;
      for (const auto& side : {detail::edge_metric(metric, *outer, theta, true),
                               detail::edge_metric(metric, *inner, theta, false)}) {
        if (side) best = std::max(best, std::sqrt(std::max(side->quad(t), 0.0)));
      }
      length += best * speed;
    }
    length *= kTwoPi / nodes;
    out.push_back(std::max(floor, round_to_even(length)));
  }
  return out;
}

enum class AdaptVariant { ana, bie };

enum class StopReason { max_iterations, error_bound_target, stalled, boundary_error_target };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::error_bound_target: return "error_bound_target";
    case StopReason::stalled: return "stalled";
    case StopReason::boundary_error_target: return "boundary_error_target";
  }
  return "unknown";
}

inline const char* to_string(AdaptVariant v) { return v == AdaptVariant::ana ? "ana" : "bie"; }
inline const char* to_string(ExponentSet e) { return e == ExponentSet::three_d ? "3d" : "2d"; }

struct AdaptSchedule {
  double N0 = 200.0;
  double growth = 1.3;
  /// Constant-complexity passes between two complexity increases.
  int remesh = 1;
  int iterations = 14;
  /// Stop when E_p improves by less than this fraction at constant N (0 disables).
  double stall_tol = 0.01;
  /// Stop once E_p falls to this value (0 disables).
  double error_bound_target = 0.0;
  /// Stop once every boundary error of the BIE field is at most this (0 disables).
  double boundary_error_target = 0.0;
  int p = 2;
  ExponentSet exponents = ExponentSet::three_d;
  double h_fd = 1e-3;
  ExclusionBand band;
  double outer_factor = 2.0;
  int min_samples = 400;
  int max_samples = 3000;
  int M_initial = 32;
  int M_floor = 16;
  int M_cap = 1024;

  void validate() const {
    if (!(N0 > 0.0)) throw ConfigError("initial complexity must be positive");
    if (!(growth >= 1.0)) throw ConfigError("complexity growth factor must be >= 1");
    if (remesh < 0) throw ConfigError("re-meshing count must be >= 0");
    if (iterations < 1) throw ConfigError("need at least one adaptation iteration");
    if (p < 1) throw ConfigError("norm index p must be >= 1");
    if (M_initial < 4 || (M_initial % 2) != 0) throw ConfigError("initial point count must be even and >= 4");
    if (min_samples > max_samples) throw ConfigError("sample budget bounds are inverted");
  }

  /// Complexity of iteration n: grows on n = 1, 2 + remesh, 3 + 2 remesh, ...
  [[nodiscard]] std::vector<double> complexities() const {
    std::vector<double> N{std::round(N0)};
    for (int n = 1; n < iterations; ++n) {
      const bool grow = (n - 1) % (remesh + 1) == 0;
      N.push_back(grow ? std::round(growth * N.back()) : N.back());
    }
    return N;
  }
};

struct AdaptIteration {
  int n = 0;
  double N = 0.0;
  double realized_complexity = 0.0;
  double Ep = 0.0;
  /// Point counts of the field used this iteration (BIE solve; empty for ANA).
  std::vector<int> M_field;
  /// Point counts induced by this iteration's metric.
  std::vector<int> M_next;
  /// Boundary errors of the BIE field against the analytic trace, when available.
  std::vector<double> boundary_errors;
  std::size_t samples = 0;
  int dropped = 0;
};

struct AdaptState {
  std::vector<AdaptIteration> history;
  StopReason stop = StopReason::max_iterations;
  /// Grid and metric of the last iteration, for dumps.
  SampleGrid grid;
  MetricField metric;
};

namespace detail {

inline std::vector<int> allocate_samples(int total, const std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  std::vector<int> counts;
  for (double w : weights) {
    const double share = sum > 0.0 ? w / sum : 1.0 / weights.size();
    counts.push_back(std::max(64, static_cast<int>(std::lround(share * total))));
  }
  return counts;
}

inline std::vector<double> layer_areas(const LayerConfig& config, const std::vector<double>& bands,
                                       double outer_radius) {
  const int n_if = config.num_interfaces();
  std::vector<double> a;
  for (int j = 0; j <= n_if; ++j) {
    const double lo = (j == n_if) ? 0.0 : config.radius(j) + bands[j];
    const double hi = (j == 0) ? outer_radius : config.radius(j - 1) - bands[j - 1];
    a.push_back(std::max(0.0, 0.5 * kTwoPi * (hi * hi - lo * lo)));
  }
  return a;
}

}  // namespace detail

/// Runs the adaptation loop. ANA needs circular interfaces; `coeffs` (computed on
/// demand when omitted and the interfaces are circles) also enables boundary errors.
inline AdaptState adapt_loop(const LayerConfig& config, AdaptVariant variant, const AdaptSchedule& schedule,
                             std::optional<ModeCoefficients> coeffs = std::nullopt) {
  config.validate();
  schedule.validate();
  if (!coeffs && config.all_circles()) coeffs = solve_mode_coefficients(config);
  if (variant == AdaptVariant::ana && !coeffs) throw ConfigError("ADAPT-ANA requires circular interfaces");

  const int n_if = config.num_interfaces();
  const std::vector<double> N = schedule.complexities();
  AdaptState state;
  std::vector<int> M(n_if, schedule.M_initial);
  std::vector<double> layer_weights;

  for (int n = 0; n < schedule.iterations; ++n) {
    AdaptIteration it;
    it.n = n;
    it.N = N[n];

    const double outer = schedule.outer_factor * config.interfaces[0].max_radius();
    const std::vector<double> bands = detail::sampling_bands(config, M, schedule.band, outer);
    if (layer_weights.empty()) layer_weights = detail::layer_areas(config, bands, outer);
    const int budget = std::clamp(static_cast<int>(std::lround(0.5 * it.N)), schedule.min_samples,
                                  schedule.max_samples);
    const SampleGrid grid = make_sample_grid(config, M, detail::allocate_samples(budget, layer_weights),
                                             schedule.band, schedule.outer_factor);

    LayerField field;
    std::optional<TraceSolution> sol;
    if (variant == AdaptVariant::ana) {
      const ModeCoefficients& c = *coeffs;
      field = [&config, &c](int layer, Vec2 x) {
        return eval_analytic_in_layer(c, config, layer, std::hypot(x.x, x.y), std::atan2(x.y, x.x)).value;
      };
    } else {
      sol = solve_configuration(config, M);
      it.M_field = M;
      if (coeffs) it.boundary_errors = boundary_l2_errors(*sol, *coeffs);
      const TraceSolution& s = *sol;
      field = [&s](int layer, Vec2 x) { return eval_layer_representation(s, layer, x); };
    }

    const HessianField hf = recover_hessian(field, grid, schedule.h_fd);
    MetricField metric = optimal_metric(hf, grid, schedule.p, it.N, schedule.exponents);
    it.Ep = interpolation_error_bound(hf, grid, schedule.p, it.N);
    it.realized_complexity = metric.realized_complexity;
    it.samples = grid.size();
    it.dropped = hf.dropped;
    it.M_next = boundary_point_counts(metric, grid, config, schedule.M_floor);
    for (int& m : it.M_next) m = std::min(m, schedule.M_cap);
    layer_weights = metric.layer_complexity;

    const bool constant_N = n > 0 && N[n] == N[n - 1];
    const double prev_Ep = state.history.empty() ? 0.0 : state.history.back().Ep;
    M = it.M_next;
    state.history.push_back(it);
    state.grid = grid;
    state.metric = std::move(metric);

    if (schedule.boundary_error_target > 0.0 && !it.boundary_errors.empty() &&
        std::all_of(it.boundary_errors.begin(), it.boundary_errors.end(),
                    [&](double e) { return e <= schedule.boundary_error_target; })) {
      state.stop = StopReason::boundary_error_target;
      return state;
    }
    if (schedule.error_bound_target > 0.0 && it.Ep <= schedule.error_bound_target) {
      state.stop = StopReason::error_bound_target;
      return state;
    }
    if (schedule.stall_tol > 0.0 && constant_N && prev_Ep > 0.0 && (prev_Ep - it.Ep) / prev_Ep < schedule.stall_tol) {
      state.stop = StopReason::stalled;
      return state;
    }
  }
  state.stop = StopReason::max_iterations;
  return state;
}

}  // namespace mlbie

#pragma once
// Nystrom discretization of the multilayer interface equations.
//
// Unknowns per interface Gamma_i are the exterior-side traces u_i and
// dn u_i (normal pointing outward) at the nodes of Gamma_i, stored
// interface-major as [u_0 | dn u_0 | u_1 | dn u_1 | ...]. Each interface
// contributes two row blocks: the limit from its exterior layer Omega_i
// (wavenumber k_i) and the limit from its interior layer Omega_{i+1}.
//
// Field representation in layer Omega_j:
//   Omega_0 : u_in + D_0[u_0] - S_0[dn u_0]
//   Omega_j : -D_{j-1}[u_{j-1}] + beta_{j-1} S_{j-1}[dn u_{j-1}] + D_j[u_j] - S_j[dn u_j]
//   Omega_N : -D_{N-1}[u_{N-1}] + beta_{N-1} S_{N-1}[dn u_{N-1}]

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "mlbie/analytic.hpp"
#include "mlbie/errors.hpp"
#include "mlbie/geometry.hpp"
#include "mlbie/kress.hpp"
#include "mlbie/layer_config.hpp"
#include "mlbie/specfun.hpp"

namespace mlbie {

using cplx = std::complex<double>;

/// Incident plane wave exp(i k_0 a.x).
inline cplx incident_field(const LayerConfig& config, Vec2 p) {
  return std::exp(cplx(0.0, config.wavenumbers[0] * dot(config.incident_direction, p)));
}

inline cplx incident_normal_derivative(const LayerConfig& config, Vec2 p, Vec2 n) {
  const double k = config.wavenumbers[0];
  return cplx(0.0, k * dot(config.incident_direction, n)) * incident_field(config, p);
}

/// Single-layer boundary operator of Gamma on its own nodes (Kress split).
inline Eigen::MatrixXcd single_layer_self(const BoundaryGrid& g, double k) {
  const int M = g.M;
  const std::vector<double> w = kress_log_weights(M);
  const double pi = std::numbers::pi;
  const double inv4pi = 1.0 / (4.0 * pi);
  const double h = g.step();
  Eigen::MatrixXcd v(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      const double jac = g.jacobians[j];
      const double weight = w[((i - j) % M + M) % M];
      if (i == j) {
        const double m1 = -inv4pi * jac;
        const cplx m2 = jac * cplx(-std::numbers::egamma / (2.0 * pi) - std::log(0.5 * k * jac) / (2.0 * pi), 0.25);
        v(i, j) = weight * m1 + h * m2;
        continue;
      }
      const double r = norm(g.points[i] - g.points[j]);
      const detail::Jy01 b = detail::jy01(k * r);
      const double m1 = -inv4pi * b.j0 * jac;
      const cplx full = cplx(0.0, 0.25) * cplx(b.j0, b.y0) * jac;
      const double s = std::sin(0.5 * (g.nodes[i] - g.nodes[j]));
      const cplx m2 = full - m1 * std::log(4.0 * s * s);
      v(i, j) = weight * m1 + h * m2;
    }
  }
  return v;
}

/// Double-layer boundary operator (principal value) of Gamma on its own nodes.
inline Eigen::MatrixXcd double_layer_self(const BoundaryGrid& g, double k) {
  const int M = g.M;
  const std::vector<double> w = kress_log_weights(M);
  const double pi = std::numbers::pi;
  const double h = g.step();
  Eigen::MatrixXcd kmat(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      if (i == j) {
        kmat(i, j) = h * (-g.curvatures[i] * g.jacobians[i] / (4.0 * pi));
        continue;
      }
      const Vec2 d = g.points[i] - g.points[j];
      const Vec2 tj = g.tangents[j];
      const double r = norm(d);
      const double wn = d.x * tj.y - d.y * tj.x;
      const detail::Jy01 b = detail::jy01(k * r);
      const double l1 = -k / (4.0 * pi) * b.j1 * wn / r;
      const cplx full = cplx(0.0, 0.25 * k) * cplx(b.j1, b.y1) * wn / r;
      const double s = std::sin(0.5 * (g.nodes[i] - g.nodes[j]));
      const cplx l2 = full - l1 * std::log(4.0 * s * s);
      kmat(i, j) = w[((i - j) % M + M) % M] * l1 + h * l2;
    }
  }
  return kmat;
}

/// S and D with sources on `src` evaluated at the nodes of a disjoint curve, plain PTR.
struct CrossOperators {
  Eigen::MatrixXcd single;
  Eigen::MatrixXcd dbl;
};

inline CrossOperators cross_operators(const BoundaryGrid& src, const BoundaryGrid& tgt, double k) {
  const double h = src.step();
  CrossOperators ops{Eigen::MatrixXcd(tgt.M, src.M), Eigen::MatrixXcd(tgt.M, src.M)};
  for (int i = 0; i < tgt.M; ++i) {
    for (int j = 0; j < src.M; ++j) {
      const Vec2 d = tgt.points[i] - src.points[j];
      const double r = norm(d);
      const Vec2 tj = src.tangents[j];
      const double wn = d.x * tj.y - d.y * tj.x;
      const detail::Jy01 b = detail::jy01(k * r);
      ops.single(i, j) = h * cplx(0.0, 0.25) * cplx(b.j0, b.y0) * src.jacobians[j];
      ops.dbl(i, j) = h * cplx(0.0, 0.25 * k) * cplx(b.j1, b.y1) * wn / r;
    }
  }
  return ops;
}

struct SystemMatrix {
  LayerConfig config;
  BoundaryCondition condition = BoundaryCondition::transmission;
  std::vector<BoundaryGrid> grids;
  /// Start index of interface i's u block; its dn block follows after M_i entries.
  std::vector<Eigen::Index> offsets;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;

  [[nodiscard]] Eigen::Index size() const { return matrix.rows(); }
  [[nodiscard]] Eigen::Index u_offset(int i) const { return offsets.at(i); }
  [[nodiscard]] Eigen::Index dn_offset(int i) const { return offsets.at(i) + grids.at(i).M; }
};

namespace detail {

inline std::vector<BoundaryGrid> make_grids(const LayerConfig& config, const std::vector<int>& M) {
  config.validate();
  if (static_cast<int>(M.size()) != config.num_interfaces()) {
    throw ConfigError("need one point count per interface (got " + std::to_string(M.size()) + " for " +
                      std::to_string(config.num_interfaces()) + ")");
  }
  std::vector<BoundaryGrid> grids;
  for (int i = 0; i < config.num_interfaces(); ++i) grids.push_back(make_grid(config.interfaces[i], M[i]));
  return grids;
}

}  // namespace detail

inline SystemMatrix assemble_system(const LayerConfig& config, const std::vector<int>& M) {
  SystemMatrix sys;
  sys.config = config;
  sys.condition = BoundaryCondition::transmission;
  sys.grids = detail::make_grids(config, M);
  const int n_if = config.num_interfaces();
  Eigen::Index total = 0;
  for (int i = 0; i < n_if; ++i) {
    sys.offsets.push_back(total);
    total += 2 * M[i];
  }
  sys.matrix = Eigen::MatrixXcd::Zero(total, total);
  sys.rhs = Eigen::VectorXcd::Zero(total);
  const auto& k = config.wavenumbers;

  for (int i = 0; i < n_if; ++i) {
    const BoundaryGrid& g = sys.grids[i];
    const Eigen::Index mi = g.M;
    const Eigen::Index row_out = sys.u_offset(i);
    const Eigen::Index row_in = sys.dn_offset(i);
    const Eigen::Index cu = sys.u_offset(i);
    const Eigen::Index cd = sys.dn_offset(i);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(mi, mi);

    // Limit from Omega_i (wavenumber k_i).
    {
      const Eigen::MatrixXcd v = single_layer_self(g, k[i]);
      const Eigen::MatrixXcd d = double_layer_self(g, k[i]);
      sys.matrix.block(row_out, cu, mi, mi) = 0.5 * eye - d;
      sys.matrix.block(row_out, cd, mi, mi) = v;
      if (i == 0) {
        for (int m = 0; m < mi; ++m) sys.rhs(row_out + m) = incident_field(config, g.points[m]);
      } else {
        const BoundaryGrid& src = sys.grids[i - 1];
        const CrossOperators ops = cross_operators(src, g, k[i]);
        sys.matrix.block(row_out, sys.u_offset(i - 1), mi, src.M) = ops.dbl;
        sys.matrix.block(row_out, sys.dn_offset(i - 1), mi, src.M) = -config.contrast(i - 1) * ops.single;
      }
    }
    // Limit from Omega_{i+1} (wavenumber k_{i+1}).
    {
      const Eigen::MatrixXcd v = single_layer_self(g, k[i + 1]);
      const Eigen::MatrixXcd d = double_layer_self(g, k[i + 1]);
      sys.matrix.block(row_in, cu, mi, mi) = 0.5 * eye + d;
      sys.matrix.block(row_in, cd, mi, mi) = -config.contrast(i) * v;
      if (i + 1 < n_if) {
        const BoundaryGrid& src = sys.grids[i + 1];
        const CrossOperators ops = cross_operators(src, g, k[i + 1]);
        sys.matrix.block(row_in, sys.u_offset(i + 1), mi, src.M) = -ops.dbl;
        sys.matrix.block(row_in, sys.dn_offset(i + 1), mi, src.M) = ops.single;
      }
    }
  }
  return sys;
}

/// (1/2 - K) u = u_in on a single sound-hard interface; dn u = 0.
inline SystemMatrix assemble_sound_hard_system(const LayerConfig& config, int M) {
  if (config.num_interfaces() != 1) throw ConfigError("sound-hard system needs exactly one interface");
  SystemMatrix sys;
  sys.config = config;
  sys.condition = BoundaryCondition::sound_hard;
  sys.grids = detail::make_grids(config, {M});
  sys.offsets = {0};
  const BoundaryGrid& g = sys.grids[0];
  sys.matrix = 0.5 * Eigen::MatrixXcd::Identity(M, M) - double_layer_self(g, config.wavenumbers[0]);
  sys.rhs.resize(M);
  for (int m = 0; m < M; ++m) sys.rhs(m) = incident_field(config, g.points[m]);
  return sys;
}

struct TraceSolution {
  LayerConfig config;
  BoundaryCondition condition = BoundaryCondition::transmission;
  std::vector<BoundaryGrid> grids;
  std::vector<std::vector<cplx>> u_traces;
  std::vector<std::vector<cplx>> dn_traces;
  double relative_residual = 0.0;
  double rcond = 0.0;

  [[nodiscard]] std::vector<int> point_counts() const {
    std::vector<int> m;
    for (const auto& g : grids) m.push_back(g.M);
    return m;
  }
};

struct SolveOptions {
  double residual_tol = 1e-10;
  double min_rcond = 1e-14;
};

inline TraceSolution solve_traces(const SystemMatrix& sys, const SolveOptions& options = {}) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
  TraceSolution out;
  out.rcond = lu.rcond();
  if (!(out.rcond >= options.min_rcond)) {
    throw SingularSystemError("interface system is numerically singular (rcond " + std::to_string(out.rcond) + ")");
  }
  const Eigen::VectorXcd x = lu.solve(sys.rhs);
  const double rhs_norm = sys.rhs.norm();
  out.relative_residual = (sys.matrix * x - sys.rhs).norm() / (rhs_norm > 0.0 ? rhs_norm : 1.0);
  if (!(out.relative_residual <= options.residual_tol)) {
    throw SingularSystemError("interface solve residual " + std::to_string(out.relative_residual) +
                              " exceeds tolerance");
  }
  out.config = sys.config;
  out.condition = sys.condition;
  out.grids = sys.grids;
  for (std::size_t i = 0; i < sys.grids.size(); ++i) {
    const int M = sys.grids[i].M;
    const auto iu = sys.u_offset(static_cast<int>(i));
    out.u_traces.emplace_back(x.data() + iu, x.data() + iu + M);
    if (sys.condition == BoundaryCondition::sound_hard) {
      out.dn_traces.emplace_back(M, cplx(0.0));
    } else {
      const auto id = sys.dn_offset(static_cast<int>(i));
      out.dn_traces.emplace_back(x.data() + id, x.data() + id + M);
    }
  }
  return out;
}

/// Assembles and solves in one call.
inline TraceSolution solve_configuration(const LayerConfig& config, const std::vector<int>& M,
                                         BoundaryCondition condition = BoundaryCondition::transmission) {
  if (condition == BoundaryCondition::sound_hard) {
    if (M.size() != 1) throw ConfigError("sound-hard solve needs one point count");
    return solve_traces(assemble_sound_hard_system(config, M[0]));
  }
  return solve_traces(assemble_system(config, M));
}

struct FieldValue {
  cplx value;
  int layer = 0;
  /// True when the target lies within delta grid spacings of an interface.
  bool close = false;
};

inline constexpr double kDefaultCloseFactor = 5.0;

namespace detail {

// D[mu](x) and S[sigma](x) from interface grid g, plain PTR.
inline void accumulate_potentials(const BoundaryGrid& g, double k, Vec2 x, const std::vector<cplx>& mu,
                                  const std::vector<cplx>& sigma, cplx& dbl, cplx& sgl) {
  const double h = g.step();
  cplx d_sum = 0.0;
  cplx s_sum = 0.0;
  for (int j = 0; j < g.M; ++j) {
    const Vec2 d = x - g.points[j];
    const double r = norm(d);
    if (r < kDefaultSingularityFloor) throw SingularityError("field evaluated on a boundary node");
    const Vec2 tj = g.tangents[j];
    const double wn = d.x * tj.y - d.y * tj.x;
    const Jy01 b = jy01(k * r);
    d_sum += cplx(-b.y1, b.j1) * (wn / r) * mu[j];
    s_sum += cplx(-b.y0, b.j0) * g.jacobians[j] * sigma[j];
  }
  dbl = 0.25 * k * h * d_sum;
  sgl = 0.25 * h * s_sum;
}

}  // namespace detail

/// Representation formula of layer j evaluated at x (x is not checked against j).
inline cplx eval_layer_representation(const TraceSolution& sol, int j, Vec2 x) {
  const LayerConfig& config = sol.config;
  const int n_if = config.num_interfaces();
  const double k = config.wavenumbers.at(j);
  cplx d;
  cplx s;
  if (sol.condition == BoundaryCondition::sound_hard) {
    if (j > 0) return 0.0;
    detail::accumulate_potentials(sol.grids[0], k, x, sol.u_traces[0], sol.dn_traces[0], d, s);
    return incident_field(config, x) + d;
  }
  cplx value = (j == 0) ? incident_field(config, x) : cplx(0.0);
  if (j > 0) {
    detail::accumulate_potentials(sol.grids[j - 1], k, x, sol.u_traces[j - 1], sol.dn_traces[j - 1], d, s);
    value += -d + config.contrast(j - 1) * s;
  }
  if (j < n_if) {
    detail::accumulate_potentials(sol.grids[j], k, x, sol.u_traces[j], sol.dn_traces[j], d, s);
    value += d - s;
  }
  return value;
}

/// Field at x from the representation of the layer containing x.
inline FieldValue eval_field(const TraceSolution& sol, Vec2 x, double close_factor = kDefaultCloseFactor) {
  const LayerConfig& config = sol.config;
  FieldValue out;
  out.layer = config.layer_of(x);
  for (int i = 0; i < config.num_interfaces(); ++i) {
    const double h = kTwoPi * config.radius(i) / sol.grids[i].M;
    if (std::abs(config.interfaces[i].signed_distance_estimate(x)) < close_factor * h) out.close = true;
  }
  out.value = eval_layer_representation(sol, out.layer, x);
  return out;
}

}  // namespace mlbie

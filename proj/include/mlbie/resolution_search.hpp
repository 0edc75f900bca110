#pragma once
// Search for the smallest per-interface point counts that meet a target
// boundary accuracy, and points-per-wavelength diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mlbie/analytic.hpp"
#include "mlbie/bie.hpp"
#include "mlbie/error_metrics.hpp"
#include "mlbie/errors.hpp"

namespace mlbie {

struct SearchSchedule {
  int M_start = 16;
  int dM = 2;
  double eps = 1e-6;
  int M_cap = 1024;
  ErrorNormalization normalization = ErrorNormalization::parameter;

  void validate() const {
    if (dM <= 0 || (dM % 2) != 0) throw ConfigError("search increment must be a positive even integer");
    if (M_start < 4 || (M_start % 2) != 0) throw ConfigError("search start must be an even integer >= 4");
    if (!(eps > 0.0)) throw ConfigError("target accuracy must be positive");
    if (M_cap < M_start) throw ConfigError("search cap must not be below the start count");
  }
};

struct SearchStep {
  std::vector<int> M;
  std::vector<double> errors;
};

struct SearchResult {
  std::vector<int> M_tar;
  std::vector<double> errors;
  std::vector<double> nppw;
  std::vector<SearchStep> trace;
  /// certificate[i]: errors with interface i lowered by dM (empty when M_i - dM < 4).
  std::vector<std::vector<double>> certificate;
};

/// N_ppw = M / (R k).
inline double estimate_nppw(int M, double R, double k_adjacent_max) { return M / (R * k_adjacent_max); }

/// ceil_even(N_ppw R_j max(k_j, k_{j+1})) per interface.
inline std::vector<int> general_rule_estimate(const LayerConfig& config, double nppw) {
  if (!(nppw > 0.0)) throw ConfigError("points per wavelength must be positive");
  std::vector<int> out;
  for (int j = 0; j < config.num_interfaces(); ++j) {
    const double v = nppw * config.radius(j) * config.adjacent_max_wavenumber(j);
    int m = static_cast<int>(std::ceil(v * (1.0 - 1e-12)));
    m += (m & 1);
    out.push_back(m);
  }
  return out;
}

namespace detail {

inline std::vector<double> measure(const LayerConfig& config, const ModeCoefficients& coeffs,
                                   const std::vector<int>& M, BoundaryCondition condition,
                                   ErrorNormalization normalization) {
  try {
    return boundary_l2_errors(solve_configuration(config, M, condition), coeffs, normalization);
  } catch (const SingularSystemError&) {
    return std::vector<double>(M.size(), std::numeric_limits<double>::infinity());
  }
}

inline bool meets(const std::vector<double>& e, double eps) {
  return std::all_of(e.begin(), e.end(), [eps](double v) { return v <= eps; });
}

}  // namespace detail

/// Greedy search: raise the worst violator (lowest index on ties) by dM until all
/// interfaces meet eps, then lower single interfaces while the target still holds.
/// An interface whose own error improves by less than 10% when raised is marked
/// stalled (its error is set by a coupled interface) and skipped until some raise
/// improves again.
inline SearchResult find_optimal_M(const LayerConfig& config, const ModeCoefficients& coeffs,
                                   const SearchSchedule& schedule,
                                   BoundaryCondition condition = BoundaryCondition::transmission) {
  schedule.validate();
  const int n_if = config.num_interfaces();
  SearchResult res;
  std::vector<int> M(n_if, schedule.M_start);
  std::vector<double> err = detail::measure(config, coeffs, M, condition, schedule.normalization);
  res.trace.push_back({M, err});
  std::vector<bool> stalled(n_if, false);

  while (!detail::meets(err, schedule.eps)) {
    auto pick = [&](bool violators_only) {
      int best = -1;
      for (int i = 0; i < n_if; ++i) {
        if (stalled[i] || (violators_only && !(err[i] > schedule.eps))) continue;
        if (best < 0 || err[i] > err[best]) best = i;
      }
      return best;
    };
    int worst = pick(true);
    if (worst < 0) worst = pick(false);
    if (worst < 0) {
      stalled.assign(n_if, false);
      worst = pick(true);
    }
    if (M[worst] + schedule.dM > schedule.M_cap) {
      std::string which;
      for (int i = 0; i < n_if; ++i) {
        if (err[i] > schedule.eps) which += (which.empty() ? "" : ", ") + std::to_string(i);
      }
      throw CapReachedError("point-count cap " + std::to_string(schedule.M_cap) +
                            " reached; unsatisfied interfaces: " + which);
    }
    M[worst] += schedule.dM;
    const std::vector<double> next = detail::measure(config, coeffs, M, condition, schedule.normalization);
    if (next[worst] > 0.9 * err[worst]) {
      stalled[worst] = true;
    } else {
      stalled.assign(n_if, false);
    }
    err = next;
    res.trace.push_back({M, err});
  }

  bool lowered = true;
  while (lowered) {
    lowered = false;
    for (int i = 0; i < n_if; ++i) {
      if (M[i] - schedule.dM < 4) continue;
      std::vector<int> trial = M;
      trial[i] -= schedule.dM;
      const std::vector<double> e = detail::measure(config, coeffs, trial, condition, schedule.normalization);
      res.trace.push_back({trial, e});
      if (detail::meets(e, schedule.eps)) {
        M = trial;
        err = e;
        lowered = true;
      }
    }
  }

  res.M_tar = M;
  res.errors = err;
  for (int i = 0; i < n_if; ++i) {
    const double k = (condition == BoundaryCondition::sound_hard) ? config.wavenumbers[0]
                                                                  : config.adjacent_max_wavenumber(i);
    res.nppw.push_back(estimate_nppw(M[i], config.radius(i), k));
    std::vector<int> trial = M;
    trial[i] -= schedule.dM;
    res.certificate.push_back(trial[i] >= 4 ? detail::measure(config, coeffs, trial, condition, schedule.normalization)
                                            : std::vector<double>{});
  }
  return res;
}

inline SearchResult find_machine_precision_M(const LayerConfig& config, const ModeCoefficients& coeffs,
                                             SearchSchedule schedule,
                                             BoundaryCondition condition = BoundaryCondition::transmission) {
  schedule.eps = 1e-12;
  return find_optimal_M(config, coeffs, schedule, condition);
}

}  // namespace mlbie

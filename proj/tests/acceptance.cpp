// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// returns nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mlbie/mlbie.hpp"

using namespace mlbie;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string counts(const std::vector<int>& m) { return "(" + join(m, ", ") + ")"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LayerConfig config_of(const std::string& name) { return find_case(name).to_config(); }

Outcome criterion1() {
  Outcome o{true, ""};
  double worst_tr = 0.0, worst_fd = 0.0, worst_fd_abs = 0.0, slowest = 0.0;
  for (const CaseSpec& spec : case_registry()) {
    const auto t0 = std::chrono::steady_clock::now();
    const LayerConfig config = spec.to_config();
    const ModeCoefficients c = solve_mode_coefficients(config);
    const int n_theta = 4 * c.m_max;
    for (int j = 0; j < config.num_interfaces(); ++j) {
      const double R = config.radius(j);
      double du = 0, df = 0, su = 0, sf = 0;
      for (int q = 0; q < n_theta; ++q) {
        const double t = kTwoPi * q / n_theta;
        const RadialSample out = eval_analytic_in_layer(c, config, j, R, t);
        const RadialSample in = eval_analytic_in_layer(c, config, j + 1, R, t);
        du = std::max(du, std::abs(out.value - in.value));
        df = std::max(df, std::abs(config.contrast(j) * out.radial_derivative - in.radial_derivative));
        su = std::max(su, std::abs(out.value));
        sf = std::max(sf, std::abs(in.radial_derivative));
      }
      worst_tr = std::max({worst_tr, du / su, df / sf});
    }
    const double h = 1e-3;
    for (int layer = 0; layer < config.num_layers(); ++layer) {
      const double lo = layer == config.num_interfaces() ? 0.0 : config.radius(layer);
      const double hi = layer == 0 ? 2.0 * config.radius(0) : config.radius(layer - 1);
      const double k = config.wavenumbers[layer];
      auto f = [&](double x, double y) {
        return eval_analytic_in_layer(c, config, layer, std::hypot(x, y), std::atan2(y, x)).value;
      };
      for (double frac : {0.2, 0.4, 0.6, 0.8}) {
        const double r = lo + frac * (hi - lo);
        for (double theta : {0.3, 1.7, 3.1, 4.6}) {
          const double x = r * std::cos(theta), y = r * std::sin(theta);
          const cplx u = f(x, y);
          const cplx lap = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * u) / (h * h);
          const double res = std::abs(lap + k * k * u);
          worst_fd = std::max(worst_fd, res / (k * k * std::abs(u)));
          worst_fd_abs = std::max(worst_fd_abs, res / std::abs(u));
        }
      }
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  o.pass = worst_tr < 1e-10 && worst_fd < 1e-4 && slowest < 10.0;
  o.detail = "8 cases, max transmission residual " + fmt("%.2e", worst_tr) + ", max FD residual " +
             fmt("%.2e", worst_fd) + " of k^2|u| (" + fmt("%.2e", worst_fd_abs) +
             " of |u|, stencil truncation), slowest case " + fmt("%.2f s", slowest);
  return o;
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const LayerConfig config = config_of("case1");
  const ModeCoefficients c = solve_mode_coefficients(config);
  std::vector<double> e;
  for (int M : {48, 64, 96, 144}) e.push_back(boundary_l2_error(solve_configuration(config, {M}), c, 0));
  bool mono = true;
  for (std::size_t i = 1; i < e.size(); ++i) mono = mono && e[i] < e[i - 1];
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = mono && e.back() <= 1e-10 && t < 30.0;
  o.detail = "Case 1 errors at M = 48, 64, 96, 144: " + fmt("%.2e", e[0]) + ", " + fmt("%.2e", e[1]) + ", " +
             fmt("%.2e", e[2]) + ", " + fmt("%.2e", e[3]) + (mono ? " (monotone)" : " (not monotone)") +
             ", " + fmt("%.1f s", t);
  return o;
}

struct Expectation {
  std::string label;
  std::string name;
  BoundaryCondition bc;
  double eps;
  int expected;
  int tol;
};

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Expectation> runs = {
      {"Case 1 sound-hard", "case1", BoundaryCondition::sound_hard, 1e-6, 46, 4},
      {"Case 1", "case1", BoundaryCondition::transmission, 1e-6, 84, 6},
      {"Case 2", "case2", BoundaryCondition::transmission, 1e-6, 108, 6},
      {"Case 1 machine precision", "case1", BoundaryCondition::transmission, 1e-12, 106, 8},
      {"Case 2 machine precision", "case2", BoundaryCondition::transmission, 1e-12, 144, 8},
      {"Case 3 machine precision", "case3", BoundaryCondition::transmission, 1e-12, 140, 10},
  };
  Outcome o{true, ""};
  for (const Expectation& x : runs) {
    const LayerConfig config = config_of(x.name);
    const ModeCoefficients c = x.bc == BoundaryCondition::sound_hard ? solve_sound_hard_coefficients(config)
                                                                      : solve_mode_coefficients(config);
    SearchSchedule s;
    s.eps = x.eps;
    const int M = find_optimal_M(config, c, s, x.bc).M_tar[0];
    const bool ok = std::abs(M - x.expected) <= x.tol;
    o.pass = o.pass && ok;
    o.detail += x.label + " " + std::to_string(M) + " (" + std::to_string(x.expected) + "±" + std::to_string(x.tol) +
                (ok ? ")" : ", out of range)") + "; ";
  }
  const double t = seconds_since(t0);
  o.pass = o.pass && t < 300.0;
  o.detail += fmt("%.1f s", t);
  return o;
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const LayerConfig config = config_of("case5a");
  const ModeCoefficients c = solve_mode_coefficients(config);
  const SearchResult r = find_optimal_M(config, c, {});
  const TraceSolution sol = solve_configuration(config, r.M_tar);
  double worst = 0.0;
  int evaluated = 0, skipped = 0;
  std::vector<int> per_layer(config.num_layers(), 0);
  for (double radius : default_sweep_radii(config)) {
    const auto e = radial_l2_error(sol, c, radius);
    if (!e) {
      ++skipped;
      continue;
    }
    ++evaluated;
    ++per_layer[circular_layer_of(config, radius)];
    worst = std::max(worst, *e);
  }
  const double t = seconds_since(t0);
  const bool counts_ok = std::abs(r.M_tar[0] - 212) <= 10 && std::abs(r.M_tar[1] - 50) <= 6;
  bool all_layers = true;
  for (int n : per_layer) all_layers = all_layers && n > 0;
  Outcome o;
  o.pass = counts_ok && all_layers && worst <= 1e-6 && t < 300.0;
  o.detail = "Case 5a M_tar " + counts(r.M_tar) + " (212±10, 50±6), max radial error " + fmt("%.2e", worst) +
             " over " + std::to_string(evaluated) + " radii in " + std::to_string(config.num_layers()) +
             " layers (" + std::to_string(skipped) + " inside bands), " + fmt("%.1f s", t);
  return o;
}

Outcome criterion5() {
  Outcome o{true, ""};
  for (const char* name : {"case1", "case2", "case3", "case4"}) {
    const LayerConfig config = config_of(name);
    const int M = find_optimal_M(config, solve_mode_coefficients(config), {}).M_tar[0];
    const int rule = general_rule_estimate(config, 6.0)[0];
    o.pass = o.pass && M < rule;
    o.detail += std::string(name) + " " + std::to_string(M) + " < " + std::to_string(rule) + (M < rule ? "" : " FAILS") +
                "; ";
  }
  return o;
}

AdaptSchedule convergence_schedule() {
  AdaptSchedule s;
  s.N0 = 1000;
  s.remesh = 0;
  s.iterations = 19;
  s.stall_tol = 0.0;
  return s;
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const LayerConfig config = config_of("case1");
  const ModeCoefficients c = solve_mode_coefficients(config);
  const AdaptState ana = adapt_loop(config, AdaptVariant::ana, convergence_schedule(), c);
  const AdaptState bie = adapt_loop(config, AdaptVariant::bie, convergence_schedule(), c);
  std::vector<double> N, ea, eb;
  double worst_ratio = 1.0;
  for (std::size_t n = 0; n < ana.history.size() && n < bie.history.size(); ++n) {
    const double Nn = ana.history[n].N;
    if (Nn >= 1e3 && Nn <= 1e5) {
      N.push_back(Nn);
      ea.push_back(ana.history[n].Ep);
      eb.push_back(bie.history[n].Ep);
    }
    if (Nn <= 1e4) {
      const double ratio = bie.history[n].Ep / ana.history[n].Ep;
      worst_ratio = std::max({worst_ratio, ratio, 1.0 / ratio});
    }
  }
  const double sa = loglog_slope(N, ea);
  const double sb = loglog_slope(N, eb);
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = std::abs(sa + 1.0) <= 0.15 && sb <= -0.5 && worst_ratio <= 3.0 && N.size() >= 10 && t < 600.0;
  o.detail = "Case 1, " + std::to_string(N.size()) + " complexities in [" + fmt("%.0f", N.front()) + ", " +
             fmt("%.0f", N.back()) + "]: ANA slope " + fmt("%.3f", sa) + ", BIE slope " + fmt("%.3f", sb) +
             ", max BIE/ANA factor for N <= 1e4 " + fmt("%.3f", worst_ratio) + ", " + fmt("%.1f s", t);
  return o;
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const LayerConfig config = config_of("case1");
  AdaptSchedule s;
  s.iterations = 60;
  s.stall_tol = 0.0;
  s.boundary_error_target = 1e-6;
  const AdaptState st = adapt_loop(config, AdaptVariant::bie, s);
  Outcome o;
  if (st.stop != StopReason::boundary_error_target) {
    o.detail = "boundary error never reached 1e-6 within " + std::to_string(st.history.size()) + " iterations";
    return o;
  }
  const AdaptIteration& last = st.history.back();
  const double ratio = last.M_field[0] / (kTwoPi * config.radius(0));
  o.pass = std::abs(ratio - 3.0) <= 1.0;
  o.detail = "Case 1 reached boundary error " + fmt("%.2e", last.boundary_errors[0]) + " at iteration " +
             std::to_string(last.n) + " (N = " + fmt("%.0f", last.N) + ") with M_0 = " + std::to_string(last.M_field[0]) +
             ", M_0/(2 pi R_0) = " + fmt("%.3f", ratio) + " (3±1), " + fmt("%.1f s", seconds_since(t0));
  return o;
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> failed;
  const LayerConfig config = config_of("case1");
  const ModeCoefficients c = solve_mode_coefficients(config);
  const SampleGrid grid = make_sample_grid(config, {64}, {800, 800});
  const HessianField hf = recover_hessian(
      [&](int layer, Vec2 x) {
        return eval_analytic_in_layer(c, config, layer, std::hypot(x.x, x.y), std::atan2(x.y, x.x)).value;
      },
      grid);

  const double e1 = interpolation_error_bound(hf, grid, 2, 1000.0);
  const double e2 = interpolation_error_bound(hf, grid, 2, 2000.0);
  if (std::abs(e2 - 0.5 * e1) > 1e-14 * e1) failed.push_back("E_p halving");

  for (ExponentSet set : {ExponentSet::three_d, ExponentSet::two_d}) {
    const MetricField a = optimal_metric(hf, grid, 2, 1000.0, set);
    const MetricField b = optimal_metric(hf, grid, 2, 2000.0, set);
    const double expected = std::pow(2.0, metric_exponents(set, 2).complexity);
    for (std::size_t q = 0; q < grid.size(); ++q) {
      if (std::abs(b.T[q].trace() / a.T[q].trace() - expected) > 1e-12) {
        failed.push_back(std::string("metric scaling (") + to_string(set) + ")");
        break;
      }
    }
  }

  for (int M : {8, 64, 256}) {
    double s = 0.0;
    for (double w : kress_log_weights(M)) s += w;
    if (std::abs(s) > 1e-12) failed.push_back("Kress constants M=" + std::to_string(M));
  }

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> lx(std::log(0.1), std::log(200.0));
  std::uniform_int_distribution<int> order(0, 80);
  double wr = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x = std::exp(lx(rng));
    try {
      const CylinderEval e = bessel_jy(order(rng), x);
      wr = std::max(wr, std::abs((e.j_value * e.yprime_value - e.jprime_value * e.y_value) * std::numbers::pi * x / 2 - 1));
    } catch (const OverflowError&) {
    }
  }
  if (wr > 1e-12) failed.push_back("Wronskian");

  const HessianField quad = recover_hessian([](int, Vec2 x) { return cplx(x.x * x.x + 3 * x.x * x.y - x.y * x.y); }, grid);
  double hq = 0.0;
  for (const Sym2& h : quad.H) hq = std::max({hq, std::abs(h.xx - 2), std::abs(h.xy - 3), std::abs(h.yy + 2)});
  if (hq > 1e-6) failed.push_back("Hessian of quadratic");

  const double t = seconds_since(t0);
  Outcome o;
  o.pass = failed.empty() && t < 5.0;
  o.detail = "E_p(2N)/E_p(N) = " + fmt("%.15f", e2 / e1) + ", Wronskian rel. dev. " + fmt("%.1e", wr) +
             ", quadratic Hessian dev. " + fmt("%.1e", hq) + (failed.empty() ? "" : ", failed: " + join(failed, ", ")) +
             ", " + fmt("%.2f s", t);
  return o;
}

// E_2 at the last iteration of each complexity level.
std::vector<double> level_errors(const AdaptState& st) {
  std::vector<double> e;
  for (std::size_t n = 0; n < st.history.size(); ++n) {
    if (n + 1 == st.history.size() || st.history[n + 1].N != st.history[n].N) e.push_back(st.history[n].Ep);
  }
  return e;
}

Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const int increases = 5;
  Outcome o{true, ""};
  for (double a : {0.05, 0.1}) {
    LayerConfig config = config_of("case1");
    config.interfaces[0] = InterfaceCurve::star(4.0, a, 10);
    double final_E[2] = {0.0, 0.0};
    bool ok = true;
    for (int remesh : {0, 2}) {
      AdaptSchedule s;
      s.N0 = 1000;
      s.remesh = remesh;
      s.iterations = increases * (remesh + 1) + 1;
      s.stall_tol = 0.0;
      const AdaptState st = adapt_loop(config, AdaptVariant::bie, s);
      bool finite = st.history.size() == static_cast<std::size_t>(s.iterations);
      for (const auto& it : st.history) finite = finite && std::isfinite(it.Ep) && it.Ep > 0.0;
      const std::vector<double> lv = level_errors(st);
      bool decreasing = lv.size() >= 3;
      for (std::size_t i = lv.size() - 3; decreasing && i + 1 < lv.size(); ++i) decreasing = lv[i + 1] < lv[i];
      ok = ok && finite && decreasing;
      final_E[remesh == 0 ? 0 : 1] = st.history.back().Ep;
      o.detail += "a=" + fmt("%.2f", a) + " remesh " + std::to_string(remesh) + ": " +
                  std::to_string(st.history.size()) + " iterations, final N " + fmt("%.0f", st.history.back().N) +
                  ", M " + counts(st.history.back().M_field) + ", E_2 " + fmt("%.3e", lv.front()) + " -> " +
                  fmt("%.3e", lv.back()) + (finite && decreasing ? "" : " (not finite/decreasing)") + "; ";
    }
    const double ratio = final_E[0] / final_E[1];
    const bool close = ratio <= 2.0 && ratio >= 0.5;
    o.pass = o.pass && ok && close;
    o.detail += "ratio " + fmt("%.3f", ratio) + (close ? "" : " (outside 2x)") + "; ";
  }
  o.detail += fmt("%.1f s", seconds_since(t0));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

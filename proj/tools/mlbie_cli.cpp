// Experiment driver: case listing, BIE solves, radial error sweeps, point-count
// searches and metric adaptation. Every command writes CSV files plus a
// manifest.txt that can be fed back through --config.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mlbie/mlbie.hpp"

namespace fs = std::filesystem;
using namespace mlbie;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct Options {
  std::string case_name = "case1";
  std::vector<double> k;
  std::vector<double> r;
  std::vector<double> star_a;
  std::vector<int> star_n;
  std::string bc = "transmission";
  std::vector<int> M;
  double eps = 1e-6;
  int M_start = 16;
  int dM = 2;
  int M_cap = 1024;
  std::string out = "out";
  std::string exponents = "3d";
  std::string variant = "ana";
  double band = 0.15;
  double band_factor = 5.0;
  double N0 = 200.0;
  double growth = 1.3;
  int remesh = 1;
  int iterations = 14;
  double stall_tol = 0.01;
  double boundary_error_target = 0.0;
  int p = 2;
  std::vector<double> radii;
  int per_layer = 60;
  double outer_factor = 2.0;
  int field_nr = 40;
  int field_ntheta = 64;
  bool metric_dump = false;
  std::string error_norm = "l2";
};

CaseSpec resolve_case(const Options& o) {
  CaseSpec c = find_case(o.case_name);
  if (!o.k.empty()) c.k = o.k;
  if (!o.r.empty()) c.r = o.r;
  const std::size_t n_if = c.r.size();
  auto broadcast = [n_if](auto values, auto fill) {
    if (values.empty()) values.assign(n_if, fill);
    if (values.size() == 1) values.assign(n_if, values[0]);
    if (values.size() != n_if) throw ConfigError("star parameters need one value per interface");
    return values;
  };
  c.a = broadcast(o.star_a, 0.0);
  c.n = broadcast(o.star_n, 0);
  if (o.bc == "sound-hard") {
    c.bc = BoundaryCondition::sound_hard;
  } else if (o.bc != "transmission") {
    throw ConfigError("--bc must be transmission or sound-hard");
  }
  c.validate();
  return c;
}

std::vector<int> resolve_M(const Options& o, const LayerConfig& config) {
  if (o.M.empty()) return general_rule_estimate(config, 6.0);
  if (static_cast<int>(o.M.size()) != config.num_interfaces()) {
    throw ConfigError("--M needs one value per interface");
  }
  return o.M;
}

std::optional<ModeCoefficients> reference(const CaseSpec& c, const LayerConfig& config) {
  if (!config.all_circles()) return std::nullopt;
  return c.bc == BoundaryCondition::sound_hard ? solve_sound_hard_coefficients(config)
                                               : solve_mode_coefficients(config);
}

ExclusionBand band_of(const Options& o) { return {o.band, o.band_factor}; }

void describe_case(RunManifest& m, const std::string& command, const Options& o, const CaseSpec& c) {
  m.set_string("command", command);
  m.set_string("tool_version", kToolVersion);
  m.set_string("determinism", "deterministic; no random seeds");
  m.set_string("case", o.case_name);
  m.set_list("k", c.k);
  m.set_list("r", c.r);
  m.set_list("star-a", c.a);
  m.set_list("star-n", c.n);
  m.set_string("bc", o.bc);
}

void cmd_cases(const Options& o, RunManifest& m) {
  CsvWriter csv((fs::path(o.out) / "cases.csv").string(), {"name", "k", "r", "beta"});
  std::cout << "name     k              r            beta\n";
  for (const auto& c : case_registry()) {
    const std::string k = join(c.k);
    const std::string r = join(c.r);
    const std::string beta = join(contrast_labels(c));
    csv.row(c.name, k, r, beta);
    char line[160];
    std::snprintf(line, sizeof line, "%-8s (%s)%*s(%s)%*s(%s)\n", c.name.c_str(), k.c_str(),
                  static_cast<int>(13 - k.size()), "", r.c_str(), static_cast<int>(11 - r.size()), "", beta.c_str());
    std::cout << line;
  }
  m.set_string("command", "cases");
  m.set_string("tool_version", kToolVersion);
  m.set_list("outputs", std::vector<std::string>{"\"cases.csv\""});
}

void cmd_solve(const Options& o, RunManifest& m) {
  const CaseSpec c = resolve_case(o);
  const LayerConfig config = c.to_config();
  const std::vector<int> M = resolve_M(o, config);
  describe_case(m, "solve", o, c);
  m.set_list("M", M);
  m.set_number("band", o.band);
  m.set_number("band-factor", o.band_factor);
  m.set("field-nr", to_field(o.field_nr));
  m.set("field-ntheta", to_field(o.field_ntheta));
  m.set_number("outer-factor", o.outer_factor);

  const TraceSolution sol = solve_configuration(config, M, c.bc);
  const auto coeffs = reference(c, config);
  const fs::path dir(o.out);

  {
    CsvWriter csv((dir / "traces.csv").string(), {"interface", "m", "theta", "x", "y", "u_re", "u_im", "dn_re",
                                                  "dn_im", "ana_re", "ana_im", "abs_err"});
    for (int i = 0; i < config.num_interfaces(); ++i) {
      const BoundaryGrid& g = sol.grids[i];
      const std::vector<cplx> ana = coeffs ? analytic_trace(sol, *coeffs, i) : std::vector<cplx>(g.M, NAN);
      for (int q = 0; q < g.M; ++q) {
        const cplx u = sol.u_traces[i][q];
        const cplx d = sol.dn_traces[i][q];
        csv.row(i, q, g.nodes[q], g.points[q].x, g.points[q].y, u.real(), u.imag(), d.real(), d.imag(),
                ana[q].real(), ana[q].imag(), std::abs(u - ana[q]));
      }
    }
  }
  {
    CsvWriter csv((dir / "boundary_errors.csv").string(), {"interface", "M", "error"});
    for (int i = 0; i < config.num_interfaces(); ++i) {
      const double e = coeffs ? boundary_l2_error(sol, *coeffs, i) : NAN;
      csv.row(i, M[i], e);
      std::cout << "interface " << i << "  M = " << M[i] << "  boundary L2 error = " << format_number(e) << '\n';
    }
  }
  {
    CsvWriter csv((dir / "field.csv").string(),
                  {"x", "y", "r", "theta", "layer", "close", "u_re", "u_im", "ana_re", "ana_im", "abs_err"});
    const double rmax = o.outer_factor * config.interfaces[0].max_radius();
    for (int s = 0; s < o.field_nr; ++s) {
      const double r = rmax * (s + 0.5) / o.field_nr;
      for (int t = 0; t < o.field_ntheta; ++t) {
        const double theta = kTwoPi * t / o.field_ntheta;
        const Vec2 x{r * std::cos(theta), r * std::sin(theta)};
        const FieldValue f = eval_field(sol, x, o.band_factor);
        cplx ana(NAN, NAN);
        if (coeffs) {
          ana = c.bc == BoundaryCondition::sound_hard ? eval_sound_hard(*coeffs, config, r, theta)
                                                      : eval_analytic(*coeffs, config, r, theta);
        }
        csv.row(x.x, x.y, r, theta, f.layer, f.close, f.value.real(), f.value.imag(), ana.real(), ana.imag(),
                std::abs(f.value - ana));
      }
    }
  }
  m.set_list("outputs", std::vector<std::string>{"\"traces.csv\"", "\"boundary_errors.csv\"", "\"field.csv\""});
}

void cmd_radial_sweep(const Options& o, RunManifest& m) {
  const CaseSpec c = resolve_case(o);
  const LayerConfig config = c.to_config();
  const std::vector<int> M = resolve_M(o, config);
  const auto coeffs = reference(c, config);
  if (!coeffs) throw ConfigError("radial-sweep needs circular interfaces");
  const std::vector<double> radii = o.radii.empty() ? default_sweep_radii(config, o.per_layer, o.outer_factor) : o.radii;
  describe_case(m, "radial-sweep", o, c);
  m.set_list("M", M);
  m.set_number("band", o.band);
  m.set_number("band-factor", o.band_factor);
  m.set_list("radii", radii);

  const TraceSolution sol = solve_configuration(config, M, c.bc);
  CsvWriter csv((fs::path(o.out) / "radial.csv").string(), {"r", "layer", "M_used", "skipped", "error"});
  int worst_layer = -1;
  double worst = 0.0;
  for (double r : radii) {
    const ErrorReport rep = radial_report(sol, *coeffs, r, band_of(o));
    const int layer = circular_layer_of(config, r);
    const int M_used = M[std::min(layer, config.num_interfaces() - 1)];
    csv.row(r, layer, M_used, rep.skipped, rep.skipped ? std::string("skipped") : format_number(rep.value));
    if (!rep.skipped && rep.value > worst) {
      worst = rep.value;
      worst_layer = layer;
    }
  }
  std::cout << radii.size() << " radii; largest unskipped error " << format_number(worst) << " (layer "
            << worst_layer << ")\n";
  m.set_list("outputs", std::vector<std::string>{"\"radial.csv\""});
}

void cmd_optimize(const Options& o, RunManifest& m) {
  const CaseSpec c = resolve_case(o);
  const LayerConfig config = c.to_config();
  const auto coeffs = reference(c, config);
  if (!coeffs) throw ConfigError("optimize needs circular interfaces");
  SearchSchedule s;
  s.M_start = o.M_start;
  s.dM = o.dM;
  s.eps = o.eps;
  s.M_cap = o.M_cap;
  if (o.error_norm == "rms") {
    s.normalization = ErrorNormalization::mean;
  } else if (o.error_norm != "l2") {
    throw ConfigError("--error-norm must be l2 or rms");
  }
  describe_case(m, "optimize", o, c);
  m.set_string("error-norm", o.error_norm);
  m.set_number("eps", o.eps);
  m.set("M-start", to_field(o.M_start));
  m.set("dM", to_field(o.dM));
  m.set("M-cap", to_field(o.M_cap));

  const SearchResult res = find_optimal_M(config, *coeffs, s, c.bc);
  const fs::path dir(o.out);
  {
    CsvWriter csv((dir / "optimize.csv").string(), {"case", "interface", "M_tar", "error", "N_ppw"});
    for (std::size_t i = 0; i < res.M_tar.size(); ++i) {
      csv.row(c.name, static_cast<int>(i), res.M_tar[i], res.errors[i], res.nppw[i]);
      std::cout << "interface " << i << "  M_tar = " << res.M_tar[i] << "  error = " << format_number(res.errors[i])
                << "  N_ppw = " << format_number(res.nppw[i]) << '\n';
    }
  }
  {
    CsvWriter csv((dir / "search_trace.csv").string(), {"step", "interface", "M", "error"});
    for (std::size_t s_i = 0; s_i < res.trace.size(); ++s_i) {
      for (std::size_t i = 0; i < res.trace[s_i].M.size(); ++i) {
        csv.row(s_i, static_cast<int>(i), res.trace[s_i].M[i], res.trace[s_i].errors[i]);
      }
    }
  }
  m.set_list("outputs", std::vector<std::string>{"\"optimize.csv\"", "\"search_trace.csv\""});
}

void cmd_adapt(const Options& o, RunManifest& m) {
  const CaseSpec c = resolve_case(o);
  if (c.bc != BoundaryCondition::transmission) throw ConfigError("adapt supports transmission problems only");
  const LayerConfig config = c.to_config();
  AdaptSchedule s;
  s.N0 = o.N0;
  s.growth = o.growth;
  s.remesh = o.remesh;
  s.iterations = o.iterations;
  s.stall_tol = o.stall_tol;
  s.boundary_error_target = o.boundary_error_target;
  s.p = o.p;
  s.band = band_of(o);
  s.outer_factor = o.outer_factor;
  if (o.exponents == "3d") {
    s.exponents = ExponentSet::three_d;
  } else if (o.exponents == "2d") {
    s.exponents = ExponentSet::two_d;
  } else {
    throw ConfigError("--exponents must be 3d or 2d");
  }
  AdaptVariant variant{};
  if (o.variant == "ana") {
    variant = AdaptVariant::ana;
  } else if (o.variant == "bie") {
    variant = AdaptVariant::bie;
  } else {
    throw ConfigError("--variant must be ana or bie");
  }
  describe_case(m, "adapt", o, c);
  m.set_string("variant", o.variant);
  m.set_string("exponents", o.exponents);
  m.set_number("N0", o.N0);
  m.set_number("growth", o.growth);
  m.set("remesh", to_field(o.remesh));
  m.set("iterations", to_field(o.iterations));
  m.set_number("stall-tol", o.stall_tol);
  m.set_number("boundary-error-target", o.boundary_error_target);
  m.set("p", to_field(o.p));
  m.set_number("band", o.band);
  m.set_number("band-factor", o.band_factor);
  m.set_number("outer-factor", o.outer_factor);
  m.set("metric-dump", o.metric_dump ? "true" : "false");

  const AdaptState st = adapt_loop(config, variant, s);
  const int n_if = config.num_interfaces();
  std::vector<std::string> header{"n", "N", "realized_complexity", "E_p", "samples", "dropped"};
  for (int i = 0; i < n_if; ++i) header.push_back("M_field_" + std::to_string(i));
  for (int i = 0; i < n_if; ++i) header.push_back("M_next_" + std::to_string(i));
  for (int i = 0; i < n_if; ++i) header.push_back("boundary_error_" + std::to_string(i));
  const fs::path dir(o.out);
  {
    CsvWriter csv((dir / "adapt.csv").string(), header);
    for (const auto& it : st.history) {
      std::vector<std::string> row{to_field(it.n), to_field(it.N), to_field(it.realized_complexity),
                                   to_field(it.Ep), to_field(it.samples), to_field(it.dropped)};
      for (int i = 0; i < n_if; ++i) row.push_back(it.M_field.empty() ? "" : to_field(it.M_field[i]));
      for (int i = 0; i < n_if; ++i) row.push_back(to_field(it.M_next[i]));
      for (int i = 0; i < n_if; ++i) row.push_back(it.boundary_errors.empty() ? "" : to_field(it.boundary_errors[i]));
      csv.write_line(row);
      std::cout << "n = " << it.n << "  N = " << format_number(it.N) << "  E_p = " << format_number(it.Ep)
                << "  M_next = " << join(it.M_next) << '\n';
    }
  }
  std::vector<std::string> outputs{"\"adapt.csv\""};
  if (o.metric_dump) {
    CsvWriter csv((dir / "metric.csv").string(), {"x", "y", "layer", "weight", "valid", "T_xx", "T_xy", "T_yy"});
    for (std::size_t q = 0; q < st.grid.size(); ++q) {
      const SamplePoint& p = st.grid.points[q];
      const Sym2& t = st.metric.T[q];
      csv.row(p.x.x, p.x.y, p.layer, p.weight, static_cast<bool>(st.metric.valid[q]), t.xx, t.xy, t.yy);
    }
    outputs.emplace_back("\"metric.csv\"");
  }
  std::cout << "stop reason: " << to_string(st.stop) << '\n';
  m.set_string("stop_reason", to_string(st.stop));
  m.set_list("outputs", outputs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilayer Helmholtz transmission experiments"};
  app.set_config("--config", "", "Read options from a key = value file (e.g. a previous manifest.txt)");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.require_subcommand(1);

  Options o;
  app.add_option("--case", o.case_name, "Built-in case name (see `cases`)");
  app.add_option("--k", o.k, "Wavenumbers k_0..k_N (overrides the case)");
  app.add_option("--r", o.r, "Interface radii R_0 > ... > R_{N-1} (overrides the case)");
  app.add_option("--star-a", o.star_a, "Star amplitude per interface (one value broadcasts)");
  app.add_option("--star-n", o.star_n, "Star lobe count per interface (one value broadcasts)");
  app.add_option("--bc", o.bc, "transmission or sound-hard");
  app.add_option("--M", o.M, "Points per interface (default: 6 points per wavelength)");
  app.add_option("--eps", o.eps, "Target boundary accuracy for optimize");
  app.add_option("--M-start", o.M_start, "Search start count");
  app.add_option("--dM", o.dM, "Search increment");
  app.add_option("--M-cap", o.M_cap, "Search cap");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--exponents", o.exponents, "Metric exponent set: 3d (N^(2/3), p/(2p+3)) or 2d (N, p/(2p+2))");
  app.add_option("--variant", o.variant, "Adaptation field: ana or bie");
  app.add_option("--band", o.band, "Minimum exclusion band width around interfaces");
  app.add_option("--band-factor", o.band_factor, "Exclusion band in grid spacings");
  app.add_option("--N0", o.N0, "Initial complexity");
  app.add_option("--growth", o.growth, "Complexity growth factor");
  app.add_option("--remesh", o.remesh, "Constant-complexity passes between increases");
  app.add_option("--iterations", o.iterations, "Maximum adaptation iterations");
  app.add_option("--stall-tol", o.stall_tol, "Stop when E_p improves less than this at constant N");
  app.add_option("--boundary-error-target", o.boundary_error_target,
                 "Stop once BIE boundary errors reach this level (0 disables)");
  app.add_option("--p", o.p, "L^p norm index of the error bound");
  app.add_option("--radii", o.radii, "Radii for radial-sweep (default: log-uniform per layer)");
  app.add_option("--per-layer", o.per_layer, "Default sweep radii per layer");
  app.add_option("--outer-factor", o.outer_factor, "Outer truncation radius in units of R_0");
  app.add_option("--field-nr", o.field_nr, "Radial samples of the solve field grid");
  app.add_option("--field-ntheta", o.field_ntheta, "Angular samples of the solve field grid");
  app.add_option("--error-norm", o.error_norm, "Boundary error weight for optimize: l2 (2 pi / M) or rms (1 / M)");
  app.add_flag("--metric-dump", o.metric_dump, "Write the final metric per sample point");

  std::string command;
  for (const char* name : {"cases", "solve", "radial-sweep", "optimize", "adapt"}) {
    app.add_subcommand(name)->fallthrough()->callback([&command, name] { command = name; });
  }
  CLI11_PARSE(app, argc, argv);

  RunManifest manifest;
  fs::create_directories(o.out);
  const std::string manifest_path = (fs::path(o.out) / "manifest.txt").string();
  try {
    if (command == "cases") cmd_cases(o, manifest);
    if (command == "solve") cmd_solve(o, manifest);
    if (command == "radial-sweep") cmd_radial_sweep(o, manifest);
    if (command == "optimize") cmd_optimize(o, manifest);
    if (command == "adapt") cmd_adapt(o, manifest);
    manifest.set_string("status", "ok");
    manifest.write(manifest_path);
  } catch (const std::exception& e) {
    manifest.set_string("command", command);
    manifest.set_string("status", "failed");
    manifest.set_string("error", e.what());
    manifest.write(manifest_path);
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once
// Built-in experiment configurations.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "mlbie/analytic.hpp"
#include "mlbie/errors.hpp"
#include "mlbie/geometry.hpp"
#include "mlbie/layer_config.hpp"

namespace mlbie {

struct CaseSpec {
  std::string name;
  std::vector<double> k;
  std::vector<double> r;
  /// Star amplitude and lobe count per interface (0 for circles).
  std::vector<double> a;
  std::vector<int> n;
  BoundaryCondition bc = BoundaryCondition::transmission;

  void validate() const {
    if (k.size() != r.size() + 1) throw ConfigError("case " + name + ": need |k| = |r| + 1");
    if (a.size() != r.size() || n.size() != r.size()) throw ConfigError("case " + name + ": star parameters per interface");
    if (bc == BoundaryCondition::sound_hard && r.size() != 1) {
      throw ConfigError("case " + name + ": sound-hard cases have one interface");
    }
  }

  [[nodiscard]] LayerConfig to_config() const {
    validate();
    LayerConfig c;
    c.wavenumbers = k;
    for (std::size_t i = 0; i < r.size(); ++i) {
      c.interfaces.push_back(a[i] == 0.0 || n[i] == 0 ? InterfaceCurve::circle(r[i])
                                                     : InterfaceCurve::star(r[i], a[i], n[i]));
    }
    c.validate();
    return c;
  }

  [[nodiscard]] std::vector<double> beta() const {
    std::vector<double> b;
    for (std::size_t j = 0; j + 1 < k.size(); ++j) b.push_back((k[j + 1] * k[j + 1]) / (k[j] * k[j]));
    return b;
  }
};

inline CaseSpec make_case(std::string name, std::vector<double> k, std::vector<double> r) {
  CaseSpec c;
  c.name = std::move(name);
  c.k = std::move(k);
  c.r = std::move(r);
  c.a.assign(c.r.size(), 0.0);
  c.n.assign(c.r.size(), 0);
  return c;
}

inline const std::vector<CaseSpec>& case_registry() {
  static const std::vector<CaseSpec> registry = {
      make_case("case1", {2, 6}, {4}),
      make_case("case2", {6, 2}, {4}),
      make_case("case3", {2, 10}, {4}),
      make_case("case4", {10, 2}, {4}),
      make_case("case5a", {8, 2, 6}, {6, 2}),
      make_case("case5b", {2, 6, 1}, {4, 2}),
      make_case("case6", {2, 6, 10}, {4, 2}),
      make_case("case7", {6, 2, 4, 1}, {4, 2, 1}),
  };
  return registry;
}

inline const CaseSpec& find_case(const std::string& name) {
  for (const auto& c : case_registry()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown case '" + name + "'");
}

/// k_{j+1}^2 / k_j^2 as a reduced fraction when both wavenumbers are integers.
inline std::string contrast_label(double k_out, double k_in) {
  const auto is_int = [](double v) { return std::abs(v - std::round(v)) < 1e-12 && std::abs(v) < 1e6; };
  if (is_int(k_out) && is_int(k_in)) {
    long long p = std::llround(k_in) * std::llround(k_in);
    long long q = std::llround(k_out) * std::llround(k_out);
    const long long g = std::gcd(p, q);
    p /= g;
    q /= g;
    return q == 1 ? std::to_string(p) : std::to_string(p) + "/" + std::to_string(q);
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", (k_in * k_in) / (k_out * k_out));
  return buf;
}

inline std::vector<std::string> contrast_labels(const CaseSpec& c) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j + 1 < c.k.size(); ++j) out.push_back(contrast_label(c.k[j], c.k[j + 1]));
  return out;
}

}  // namespace mlbie

#pragma once

// Small charts and fields for unit tests, built independently of the catalog.

#include <cmath>
#include <string>
#include <vector>

#include "excal/geometry.hpp"
#include "excal/splitmix.hpp"

namespace excal::testing {

inline Json rows(const std::vector<std::vector<std::string>>& m) {
  Json out = Json::array();
  for (const auto& r : m) out.push_back(Json(r));
  return out;
}

inline Geometry chart(const std::vector<std::string>& coords, const std::vector<std::vector<std::string>>& metric,
                      const std::vector<std::pair<double, double>>& domain = {}) {
  Json j = {{"dim", coords.size()}, {"coords", coords}, {"metric", rows(metric)}};
  if (!domain.empty()) {
    Json d = Json::array();
    for (auto [lo, hi] : domain) d.push_back(Json::array({lo, hi}));
    j["domain"] = d;
  }
  return geometry_from_json(j);
}

inline Geometry flat_chart(int n, double half_width = 5.0) {
  std::vector<std::string> coords;
  std::vector<std::vector<std::string>> g(n, std::vector<std::string>(n, "0"));
  for (int i = 0; i < n; ++i) {
    coords.push_back(n <= 3 ? std::string(1, "xyz"[i]) : "x" + std::to_string(i + 1));
    g[i][i] = "1";
  }
  return chart(coords, g, std::vector<std::pair<double, double>>(n, {-half_width, half_width}));
}

inline Geometry sphere_chart() {
  return chart({"theta", "phi"}, {{"1", "0"}, {"0", "sin(theta)^2"}}, {{0.3, 2.8}, {0.1, 6.0}});
}

/// A curved 3-dimensional chart with all metric entries non-constant.
inline Geometry warped_chart() {
  return chart({"x", "y", "z"},
               {{"2 + sin(x*y)", "0.3*z", "0.1*x"},
                {"0.3*z", "1.5 + x^2", "0.2*cos(y)"},
                {"0.1*x", "0.2*cos(y)", "1 + 0.5*y^2"}},
               {{-1, 1}, {-1, 1}, {-1, 1}});
}

/// Form with the given coefficients, keys as in configs ("1,2").
inline FormField form_of(const Geometry& g, int k, const std::vector<std::pair<std::string, std::string>>& coeffs) {
  Json c = Json::object();
  for (const auto& [key, val] : coeffs) c[key] = val;
  return form_from_json(Json{{"degree", k}, {"coeffs", c}}, g.dim, g.coords, "test");
}

/// Random quadratic polynomial coefficients.
inline FormField poly_form(const Geometry& g, int k, SplitMix64& rng) {
  const int n = g.dim;
  FormField f(n, k);
  if (k < 0 || k > n) return f;
  for (IndexMask m : TupleTable::get(n).masks(k)) {
    Expr e = Expr::number(rng.uniform(-1, 1));
    for (int i = 0; i < n; ++i) {
      Expr xi = Expr::variable(i, g.coords[i]);
      e = e + Expr::number(rng.uniform(-1, 1)) * xi;
      for (int j = i; j < n; ++j) e = e + Expr::number(rng.uniform(-1, 1)) * xi * Expr::variable(j, g.coords[j]);
    }
    f.coeffs[m] = e;
  }
  return f;
}

inline VecFormField poly_vec(const Geometry& g, int k, SplitMix64& rng) {
  VecFormField v(g.dim, k);
  for (int b = 0; b < g.dim; ++b) v.comps[b] = poly_form(g, k, rng);
  return v;
}

inline double max_diff(const AltValue& a, const AltValue& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const VecAltValue& a, const VecAltValue& b) {
  double m = 0;
  for (int c = 0; c < a.dim(); ++c) m = std::max(m, max_diff(a[c], b[c]));
  return m;
}

inline double max_abs(const AltValue& a) {
  double m = 0;
  for (double v : a.coeffs()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace excal::testing

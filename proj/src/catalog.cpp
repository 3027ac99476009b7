#include "excal/catalog.hpp"

#include <map>
#include <mutex>
#include <numbers>

#include "excal/format.hpp"
#include "excal/splitmix.hpp"

namespace excal {

const std::vector<CatalogFamily>& catalog_families() {
  static const std::vector<CatalogFamily> families{
      {"euclidean(n)", "flat R^n, n <= 6, on the box [-1,1]^n (default n = 3)"},
      {"flat_torus(n)", "flat torus chart, n <= 6, on the periodic box [0,2pi]^n (default n = 2)"},
      {"sphere2", "round unit 2-sphere in (theta, phi) away from the poles, Killing field d/dphi"},
      {"flat_kahler(m)", "flat C^m with the standard complex structure and Kahler form (default m = 1)"},
      {"hopf_lck", "R^4 minus a ball with g = delta/r^2, locally conformal Kahler with Lee form -2 d log r"},
      {"sasakian_s3", "round Sasakian 3-sphere in Euler angles (theta, phi, psi), xi = 2 d/dpsi"},
      {"flat_cokahler(m)", "flat C^m x R with phi = J + 0, xi = d/dx_last (default m = 1)"},
  };
  return families;
}

namespace {

Json identity_matrix(int n) {
  Json m = Json::array();
  for (int i = 0; i < n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < n; ++j) row.push_back(i == j ? "1" : "0");
    m.push_back(row);
  }
  return m;
}

Json coord_names(int n) {
  Json c = Json::array();
  for (int i = 1; i <= n; ++i) c.push_back("x" + std::to_string(i));
  return c;
}

Json box(int n, double lo, double hi) {
  Json d = Json::array();
  for (int i = 0; i < n; ++i) d.push_back(Json::array({lo, hi}));
  return d;
}

/// Block rotations on the first 2m coordinates of an n-dimensional chart:
/// J d_{2i-1} = d_{2i}. Entry [r][c] is the d_r coefficient of J d_c.
Json rotation_blocks(int m, int n) {
  Json rows = Json::array();
  for (int r = 0; r < n; ++r) {
    Json row = Json::array();
    for (int c = 0; c < n; ++c) {
      const char* v = "0";
      if (r < 2 * m && c < 2 * m && r / 2 == c / 2) {
        if (c % 2 == 0 && r == c + 1) v = "1";
        if (c % 2 == 1 && r == c - 1) v = "-1";
      }
      row.push_back(v);
    }
    rows.push_back(row);
  }
  return rows;
}

/// -sum_i f dx^{2i-1} ^ dx^{2i}, i.e. g(X, J Y) for g = f * delta.
Json fundamental_form(int m, const std::string& coeff) {
  Json c = Json::object();
  for (int i = 0; i < m; ++i) {
    c[std::to_string(2 * i + 1) + "," + std::to_string(2 * i + 2)] = coeff;
  }
  return Json{{"degree", 2}, {"coeffs", c}};
}

Json base(const std::string& name, const std::string& kind, const std::string& description, int n) {
  return Json{{"schema", kConfigSchema}, {"name", name}, {"kind", kind}, {"description", description}, {"dim", n}};
}

int size_arg(const std::string& name, const std::string& family, int fallback, int lo, int hi) {
  if (name == family) return fallback;
  const std::string prefix = family + "(";
  if (!name.starts_with(prefix) || !name.ends_with(")")) return -1;
  const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
  if (digits.empty() || digits.size() > 2 || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw UnknownEntry("'" + name + "': size must be an integer");
  }
  const int v = std::stoi(digits);
  if (v < lo || v > hi) {
    throw UnknownEntry("'" + name + "': size must be in " + std::to_string(lo) + ".." + std::to_string(hi));
  }
  return v;
}

Json flat_doc(const std::string& name, const std::string& kind, const std::string& description, int n, double lo,
              double hi) {
  Json j = base(name, kind, description, n);
  j["coords"] = coord_names(n);
  j["metric"] = identity_matrix(n);
  j["domain"] = box(n, lo, hi);
  return j;
}

Json sphere2_doc() {
  Json j = base("sphere2", "killing", "round unit 2-sphere, Killing field d/dphi", 2);
  j["coords"] = {"theta", "phi"};
  j["metric"] = Json::array({Json::array({"1", "0"}), Json::array({"0", "sin(theta)^2"})});
  j["domain"] = Json::array({Json::array({0.3, 2.8}), Json::array({0.1, 6.0})});
  j["structures"] = {{"xi", {"0", "1"}}};
  return j;
}

Json hopf_doc() {
  const std::string r2 = "(x1^2+x2^2+x3^2+x4^2)";
  Json j = base("hopf_lck", "lck", "R^4 minus a ball, g = delta/r^2, Lee form theta = -2 d log r", 4);
  j["coords"] = coord_names(4);
  Json g = Json::array();
  for (int r = 0; r < 4; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 4; ++c) row.push_back(r == c ? "1/" + r2 : "0");
    g.push_back(row);
  }
  j["metric"] = g;
  j["domain"] = box(4, -1, 1);
  j["exclude"] = r2 + " - 0.04 > 0";
  Json theta = Json::array();
  for (int i = 1; i <= 4; ++i) theta.push_back("-2*x" + std::to_string(i) + "/" + r2);
  // eta = theta o J: eta(d1) = theta(d2), eta(d2) = -theta(d1), ...
  Json eta = Json::array({"-2*x2/" + r2, "2*x1/" + r2, "-2*x4/" + r2, "2*x3/" + r2});
  j["structures"] = {{"J", rotation_blocks(2, 4)}, {"eta", eta}, {"theta", theta}};
  j["forms"] = {{"Omega", fundamental_form(2, "-1/" + r2)}};
  return j;
}

Json sasakian_doc() {
  Json j = base("sasakian_s3", "sasakian",
                "round Sasakian 3-sphere, g = (d theta^2 + sin^2 theta d phi^2 + (d psi + cos theta d phi)^2)/4", 3);
  j["coords"] = {"theta", "phi", "psi"};
  j["metric"] = Json::array({Json::array({"0.25", "0", "0"}), Json::array({"0", "0.25", "0.25*cos(theta)"}),
                             Json::array({"0", "0.25*cos(theta)", "0.25"})});
  j["domain"] = Json::array({Json::array({0.3, 2.8}), Json::array({0.1, 6.0}), Json::array({0.1, 6.0})});
  // phi = -nabla xi: phi(d_theta) = (d_phi - cos d_psi)/sin, phi(d_phi) = -sin d_theta, phi(d_psi) = 0.
  j["structures"] = {
      {"phi", Json::array({Json::array({"0", "-sin(theta)", "0"}), Json::array({"1/sin(theta)", "0", "0"}),
                           Json::array({"-cos(theta)/sin(theta)", "0", "0"})})},
      {"xi", {"0", "0", "2"}},
      {"eta", {"0", "0.5*cos(theta)", "0.5"}}};
  j["forms"] = {{"Phi", Json{{"degree", 2}, {"coeffs", {{"1,2", "-0.25*sin(theta)"}}}}}};
  return j;
}

Json cokahler_doc(const std::string& name, int m) {
  const int n = 2 * m + 1;
  Json j = flat_doc(name, "cokahler", "flat C^" + std::to_string(m) + " x R, phi = J + 0, xi = d/dx" + std::to_string(n),
                    n, -1, 1);
  Json xi = Json::array();
  for (int i = 0; i < n; ++i) xi.push_back(i == n - 1 ? "1" : "0");
  j["structures"] = {{"phi", rotation_blocks(m, n)}, {"xi", xi}, {"eta", xi}};
  j["forms"] = {{"Phi", fundamental_form(m, "-1")}};
  return j;
}

Json catalog_doc(const std::string& name) {
  if (int n = size_arg(name, "euclidean", 3, 1, 6); n > 0) {
    return flat_doc("euclidean(" + std::to_string(n) + ")", "flat", "flat R^" + std::to_string(n), n, -1, 1);
  }
  if (int n = size_arg(name, "flat_torus", 2, 1, 6); n > 0) {
    return flat_doc("flat_torus(" + std::to_string(n) + ")", "flat",
                    "flat torus chart on [0,2pi]^" + std::to_string(n), n, 0, 2 * std::numbers::pi);
  }
  if (name == "sphere2") return sphere2_doc();
  if (int m = size_arg(name, "flat_kahler", 1, 1, 6); m > 0) {
    const std::string full = "flat_kahler(" + std::to_string(m) + ")";
    Json j = flat_doc(full, "kahler", "flat C^" + std::to_string(m) + " with the standard Kahler structure", 2 * m,
                      -1, 1);
    j["structures"] = {{"J", rotation_blocks(m, 2 * m)}};
    j["forms"] = {{"Omega", fundamental_form(m, "-1")}};
    return j;
  }
  if (name == "hopf_lck") return hopf_doc();
  if (name == "sasakian_s3") return sasakian_doc();
  if (int m = size_arg(name, "flat_cokahler", 1, 1, 5); m > 0) {
    return cokahler_doc("flat_cokahler(" + std::to_string(m) + ")", m);
  }
  throw UnknownEntry("no catalog entry named '" + name + "'");
}

// ---------------------------------------------------------------------------
// Native structural identities

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

NativeSides christoffel_vanishes() {
  return [](Evaluator& ev) {
    std::vector<double> l;
    for (const Jet& j : ev.point().christoffel(0)) l.push_back(j.value());
    return SidePair{l, zeros(l.size())};
  };
}

/// nabla_{d_a} T = 0 for every a.
NativeSides parallel(OpPtr t) {
  return [t](Evaluator& ev) {
    const JetVecForm& tj = ev.vec(t, 1);
    const auto& gamma = ev.point().christoffel(0);
    std::vector<double> l;
    for (int a = 0; a < tj.dim(); ++a) {
      auto v = flatten(to_value(cov_deriv(a, tj, gamma)));
      l.insert(l.end(), v.begin(), v.end());
    }
    return SidePair{l, zeros(l.size())};
  };
}

/// g(phi d_a, phi d_b) = g_ab - eta_a eta_b.
NativeSides metric_compatible(OpPtr phi, OpPtr eta) {
  return [phi, eta](Evaluator& ev) {
    const VecAltValue P = ev.vec_value(phi);
    const AltValue e = ev.form_value(eta);
    const auto& g = ev.point().metric(0);
    const int n = P.dim();
    auto col = [&](int c, int a) { return P[c][a]; };  // d_c coefficient of phi d_a
    std::vector<double> l, r;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double s = 0;
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) s += g[c * n + d].value() * col(c, a) * col(d, b);
        }
        l.push_back(s);
        r.push_back(g[a * n + b].value() - e[a] * e[b]);
      }
    }
    return SidePair{l, r};
  };
}

void require(const OpEnv& env, const Geometry& g, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (!env.find(n)) throw ConfigError("kind '" + g.kind + "' needs '" + n + "' among structures or forms");
  }
}

}  // namespace

Geometry catalog_geometry(const std::string& name) { return geometry_from_json(catalog_doc(name)); }

std::vector<Identity> structural_validations(const Geometry& g) {
  const OpEnv env = OpEnv::from_geometry(g);
  auto n = [&](const char* s) { return *env.find(s); };
  std::vector<Identity> out;
  const std::string& k = g.kind;
  if (k == "riemannian") return out;
  if (k == "flat") {
    out.push_back({"christoffel-vanishes", "", "", christoffel_vanishes()});
  } else if (k == "killing") {
    require(env, g, {"xi"});
    out.push_back({"killing", "lieg(xi)", "zerov(1)", {}});
  } else if (k == "kahler") {
    require(env, g, {"J", "Omega"});
    out.push_back({"omega-sharp-is-J", "sharp(Omega)", "J", {}});
    out.push_back({"omega-closed", "d(Omega)", "zero(3)", {}});
    out.push_back({"J-parallel", "", "", parallel(n("J"))});
    out.push_back({"J-integrable", "nijenhuis(J)", "zerov(2)", {}});
  } else if (k == "lck") {
    require(env, g, {"J", "Omega", "theta", "eta"});
    out.push_back({"omega-sharp-is-J", "sharp(Omega)", "J", {}});
    out.push_back({"lee-form", "d(Omega)", "wedge(theta, Omega)", {}});
    out.push_back({"lee-closed", "d(theta)", "zero(2)", {}});
    out.push_back({"eta-is-iJ-theta", "eta", "i(J, theta)", {}});
    out.push_back({"theta-sharp-dual", "flat(sharp(theta))", "theta", {}});
    out.push_back({"J-integrable", "nijenhuis(J)", "zerov(2)", {}});
  } else if (k == "sasakian" || k == "cokahler") {
    require(env, g, {"phi", "xi", "eta", "Phi"});
    out.push_back({"eta-xi", "i(xi, eta)", "1", {}});
    out.push_back({"phi-squared", "comp(phi, phi)", "add(neg(Id), wedgev(eta, xi))", {}});
    out.push_back({"metric-compatible", "", "", metric_compatible(n("phi"), n("eta"))});
    out.push_back({"Phi-sharp-is-phi", "sharp(Phi)", "phi", {}});
    out.push_back({"xi-flat-is-eta", "flat(xi)", "eta", {}});
    out.push_back({"Phi-closed", "d(Phi)", "zero(3)", {}});
    // Normal: N_phi + d eta (x) xi = 0 with d eta(X, Y) = X eta(Y) - Y eta(X) - eta([X, Y]).
    out.push_back({"normal", "add(nijenhuis(phi), wedgev(d(eta), xi))", "zerov(2)", {}});
    if (k == "sasakian") {
      out.push_back({"nabla-xi", "dnabla(xi)", "neg(phi)", {}});
    } else {
      out.push_back({"xi-parallel", "dnabla(xi)", "zerov(1)", {}});
      out.push_back({"A-vanishes", "neg(comp(phi, dnabla(xi)))", "zerov(1)", {}});
      out.push_back({"eta-closed", "d(eta)", "zero(2)", {}});
    }
  } else {
    throw ConfigError("kind: unknown structure family '" + k + "'");
  }
  return out;
}

void validate(const Geometry& g, const std::vector<Identity>& checks, int points, std::uint64_t seed, Tolerance tol) {
  if (checks.empty()) return;
  const OpEnv env = OpEnv::from_geometry(g);
  std::vector<CompiledIdentity> compiled;
  for (const auto& c : checks) {
    try {
      compiled.emplace_back(c, env);
    } catch (const Error& e) {
      throw ValidationFailed(g.name + ": " + c.id + ": " + e.tag() + ": " + e.what());
    }
  }
  for (const auto& p : sample_points(g, points, seed)) {
    ChartPoint cp(g, p);
    Evaluator ev(cp);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      PointError err;
      try {
        auto [l, r] = compiled[i].evaluate(ev);
        err = compare(l, r, tol);
      } catch (const Error& e) {
        throw ValidationFailed(g.name + ": " + checks[i].id + ": " + e.tag() + " at " + format_point(p) + ": " +
                               e.what());
      }
      if (!err.pass) {
        throw ValidationFailed(g.name + ": " + checks[i].id + " fails at " + format_point(p) +
                               " (abs_err " + format_number(err.abs_err) + ")");
      }
    }
  }
}

std::shared_ptr<const CatalogEntry> builtin(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const CatalogEntry>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return it->second;
  }
  auto entry = std::make_shared<CatalogEntry>();
  entry->geometry = catalog_geometry(name);
  entry->name = entry->geometry.name;
  entry->validations = structural_validations(entry->geometry);
  validate(entry->geometry, entry->validations, 20, fnv1a(entry->name.c_str()));
  std::lock_guard lock(mu);
  return cache.emplace(name, std::move(entry)).first->second;
}

}  // namespace excal

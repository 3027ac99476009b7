#include "excal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "excal/splitmix.hpp"

namespace excal {

void FormField::set(std::span<const int> idx, Expr e) {
  if (static_cast<int>(idx.size()) != degree) {
    throw DegreeError("form of degree " + std::to_string(degree) + " given " +
                      std::to_string(idx.size()) + " indices");
  }
  for (int i : idx) {
    if (i < 0 || i >= dim) throw IndexOutOfRange("form index " + std::to_string(i + 1) + " out of range");
  }
  coeffs[indices_mask(idx)] = std::move(e);
}

VecFormField VecFormField::endomorphism(const std::vector<std::vector<Expr>>& m) {
  const int n = static_cast<int>(m.size());
  VecFormField out(n, 1);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m[i].size()) != n) throw ShapeMismatch("endomorphism matrix must be square");
    for (int j = 0; j < n; ++j) {
      if (!m[i][j].is_zero_literal()) out.comps[i].coeffs[IndexMask{1} << j] = m[i][j];
    }
  }
  return out;
}

VecFormField VecFormField::vector(const std::vector<Expr>& v) {
  const int n = static_cast<int>(v.size());
  VecFormField out(n, 0);
  for (int b = 0; b < n; ++b) {
    if (!v[b].is_zero_literal()) out.comps[b].coeffs[0] = v[b];
  }
  return out;
}

FormField one_form(const std::vector<Expr>& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  FormField out(n, 1);
  for (int a = 0; a < n; ++a) {
    if (!coeffs[a].is_zero_literal()) out.coeffs[IndexMask{1} << a] = coeffs[a];
  }
  return out;
}

const FormField* Geometry::find_form(const std::string& form_name) const {
  for (const auto& [k, f] : forms) {
    if (k == form_name) return &f;
  }
  return nullptr;
}

bool Geometry::in_box(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (!(p[i] >= domain[i].lo && p[i] <= domain[i].hi)) return false;
  }
  return true;
}

bool Geometry::admits(std::span<const double> p) const {
  if (!in_box(p)) return false;
  if (!exclude) return true;
  try {
    return eval_value(*exclude, p) > 0.0;
  } catch (const Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Config I/O

namespace {

Expr expr_from_json(const Json& j, std::span<const std::string> coords, const std::string& what) {
  try {
    if (j.is_number()) return Expr::number(j.get<double>());
    if (j.is_string()) return parse_expr(j.get<std::string>(), coords);
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.tag() + ": " + e.what());
  }
  throw ConfigError(what + ": expected an expression string or number");
}

std::vector<Expr> vector_from_json(const Json& j, int n, std::span<const std::string> coords,
                                   const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ConfigError(what + ": expected an array of " + std::to_string(n) + " expressions");
  }
  std::vector<Expr> out;
  for (int i = 0; i < n; ++i) out.push_back(expr_from_json(j[i], coords, what + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<Expr>> matrix_from_json(const Json& j, int n, std::span<const std::string> coords,
                                                const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ConfigError(what + ": expected " + std::to_string(n) + " rows");
  }
  std::vector<std::vector<Expr>> out;
  for (int i = 0; i < n; ++i) out.push_back(vector_from_json(j[i], n, coords, what + "[" + std::to_string(i) + "]"));
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::vector<int> parse_multi_index(const std::string& key, int n, int k, const std::string& what) {
  std::vector<int> idx;
  // "0" names the degree-0 slot, as eval prints it.
  if (!key.empty() && !(k == 0 && key == "0")) {
    std::size_t pos = 0;
    while (pos <= key.size()) {
      std::size_t comma = key.find(',', pos);
      if (comma == std::string::npos) comma = key.size();
      std::string part = key.substr(pos, comma - pos);
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ConfigError(what + ": bad multi-index \"" + key + "\"");
      }
      if (v < 1 || v > n) throw ConfigError(what + ": index " + std::to_string(v) + " out of range 1.." + std::to_string(n));
      idx.push_back(v - 1);
      pos = comma + 1;
    }
  }
  if (static_cast<int>(idx.size()) != k) {
    throw ConfigError(what + ": multi-index \"" + key + "\" does not have " + std::to_string(k) + " entries");
  }
  for (std::size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] <= idx[i - 1]) throw ConfigError(what + ": multi-index \"" + key + "\" is not strictly increasing");
  }
  return idx;
}

std::string multi_index_key(IndexMask m) {
  std::string s;
  for (int i : mask_indices(m)) {
    if (!s.empty()) s += ',';
    s += std::to_string(i + 1);
  }
  return s;
}

Json matrix_to_json(const std::vector<std::vector<Expr>>& m) {
  Json out = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& e : row) r.push_back(to_string(e));
    out.push_back(std::move(r));
  }
  return out;
}

Json vector_to_json(const std::vector<Expr>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(to_string(e));
  return out;
}

}  // namespace

FormField form_from_json(const Json& j, int dim, std::span<const std::string> coords, const std::string& what) {
  if (!j.is_object() || !j.contains("degree") || !j["degree"].is_number_integer()) {
    throw ConfigError(what + ": expected {\"degree\": k, \"coeffs\": {...}}");
  }
  const int k = j["degree"].get<int>();
  if (k < 0 || k > dim) throw ConfigError(what + ": degree " + std::to_string(k) + " out of range 0.." + std::to_string(dim));
  FormField out(dim, k);
  if (!j.contains("coeffs")) return out;
  if (!j["coeffs"].is_object()) throw ConfigError(what + ".coeffs: expected an object");
  for (const auto& [key, val] : j["coeffs"].items()) {
    auto idx = parse_multi_index(key, dim, k, what + ".coeffs");
    out.set(idx, expr_from_json(val, coords, what + ".coeffs[\"" + key + "\"]"));
  }
  return out;
}

Json form_to_json(const FormField& f) {
  Json out;
  out["degree"] = f.degree;
  Json coeffs = Json::object();
  // Lexicographic tuple order rather than mask order.
  if (f.degree >= 0 && f.degree <= f.dim) {
    for (IndexMask m : TupleTable::get(f.dim).masks(f.degree)) {
      auto it = f.coeffs.find(m);
      if (it != f.coeffs.end()) coeffs[multi_index_key(m)] = to_string(it->second);
    }
  }
  out["coeffs"] = std::move(coeffs);
  return out;
}

Geometry geometry_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (doc.contains("schema") && doc["schema"] != kConfigSchema) {
    throw ConfigError("unsupported schema " + doc["schema"].dump() + " (expected \"" + kConfigSchema + "\")");
  }
  Geometry g;
  if (doc.contains("name")) g.name = doc["name"].get<std::string>();
  if (doc.contains("kind")) g.kind = doc["kind"].get<std::string>();
  if (doc.contains("description")) g.description = doc["description"].get<std::string>();

  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw ConfigError("dim: expected an integer");
  g.dim = doc["dim"].get<int>();
  if (g.dim < 1 || g.dim > kMaxDim) throw ConfigError("dim: must be in 1.." + std::to_string(kMaxDim));
  const int n = g.dim;

  if (!doc.contains("coords") || !doc["coords"].is_array() || static_cast<int>(doc["coords"].size()) != n) {
    throw ConfigError("coords: expected " + std::to_string(n) + " names");
  }
  std::set<std::string> seen;
  for (const auto& c : doc["coords"]) {
    if (!c.is_string() || !is_identifier(c.get<std::string>())) throw ConfigError("coords: bad coordinate name " + c.dump());
    if (!seen.insert(c.get<std::string>()).second) throw ConfigError("coords: duplicate name " + c.dump());
    g.coords.push_back(c.get<std::string>());
  }

  if (!doc.contains("metric")) throw ConfigError("metric: missing");
  g.metric = matrix_from_json(doc["metric"], n, g.coords, "metric");

  if (doc.contains("domain")) {
    const auto& d = doc["domain"];
    if (!d.is_array() || static_cast<int>(d.size()) != n) throw ConfigError("domain: expected " + std::to_string(n) + " intervals");
    for (int i = 0; i < n; ++i) {
      if (!d[i].is_array() || d[i].size() != 2 || !d[i][0].is_number() || !d[i][1].is_number()) {
        throw ConfigError("domain[" + std::to_string(i) + "]: expected [lo, hi]");
      }
      Interval iv{d[i][0].get<double>(), d[i][1].get<double>()};
      if (!(iv.lo <= iv.hi)) throw ConfigError("domain[" + std::to_string(i) + "]: lo exceeds hi");
      g.domain.push_back(iv);
    }
  } else {
    g.domain.assign(n, Interval{-1.0, 1.0});
  }

  if (doc.contains("exclude") && !doc["exclude"].is_null()) {
    if (!doc["exclude"].is_string()) throw ConfigError("exclude: expected an expression string");
    std::string src = doc["exclude"].get<std::string>();
    // Accept both "E" and "E > 0".
    if (auto gt = src.rfind('>'); gt != std::string::npos) {
      std::string rhs = src.substr(gt + 1);
      rhs.erase(std::remove_if(rhs.begin(), rhs.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                rhs.end());
      if (rhs != "0") throw ConfigError("exclude: predicate must have the form \"E > 0\"");
      src = src.substr(0, gt);
    }
    g.exclude = expr_from_json(Json(src), g.coords, "exclude");
  }

  if (doc.contains("structures") && !doc["structures"].is_null()) {
    const auto& s = doc["structures"];
    if (!s.is_object()) throw ConfigError("structures: expected an object");
    for (const auto& [key, val] : s.items()) {
      const std::string what = "structures." + key;
      if (key == "J") {
        g.structures.J = matrix_from_json(val, n, g.coords, what);
      } else if (key == "phi") {
        g.structures.phi = matrix_from_json(val, n, g.coords, what);
      } else if (key == "xi") {
        g.structures.xi = vector_from_json(val, n, g.coords, what);
      } else if (key == "eta") {
        g.structures.eta = vector_from_json(val, n, g.coords, what);
      } else if (key == "theta") {
        g.structures.theta = vector_from_json(val, n, g.coords, what);
      } else {
        throw ConfigError(what + ": unknown structure (expected J, phi, xi, eta, theta)");
      }
    }
  }

  if (doc.contains("forms") && !doc["forms"].is_null()) {
    if (!doc["forms"].is_object()) throw ConfigError("forms: expected an object");
    for (const auto& [key, val] : doc["forms"].items()) {
      if (!is_identifier(key)) throw ConfigError("forms: bad form name \"" + key + "\"");
      g.forms.emplace_back(key, form_from_json(val, n, g.coords, "forms." + key));
    }
  }
  return g;
}

Json geometry_to_json(const Geometry& g) {
  Json out;
  out["schema"] = kConfigSchema;
  if (!g.name.empty()) out["name"] = g.name;
  out["kind"] = g.kind;
  if (!g.description.empty()) out["description"] = g.description;
  out["dim"] = g.dim;
  out["coords"] = g.coords;
  out["metric"] = matrix_to_json(g.metric);
  Json dom = Json::array();
  for (const auto& iv : g.domain) dom.push_back(Json::array({iv.lo, iv.hi}));
  out["domain"] = std::move(dom);
  if (g.exclude) out["exclude"] = to_string(*g.exclude);
  Json s = Json::object();
  if (g.structures.J) s["J"] = matrix_to_json(*g.structures.J);
  if (g.structures.phi) s["phi"] = matrix_to_json(*g.structures.phi);
  if (g.structures.xi) s["xi"] = vector_to_json(*g.structures.xi);
  if (g.structures.eta) s["eta"] = vector_to_json(*g.structures.eta);
  if (g.structures.theta) s["theta"] = vector_to_json(*g.structures.theta);
  if (!s.empty()) out["structures"] = std::move(s);
  if (!g.forms.empty()) {
    Json f = Json::object();
    for (const auto& [k, v] : g.forms) f[k] = form_to_json(v);
    out["forms"] = std::move(f);
  }
  return out;
}

std::vector<std::vector<double>> sample_points(const Geometry& g, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> out;
  const long max_draws = 1000L * std::max(count, 1);
  long draws = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++draws > max_draws) {
      throw ConfigError("could not sample admissible points in the domain of " +
                        (g.name.empty() ? std::string("geometry") : g.name));
    }
    std::vector<double> p(g.dim);
    for (int i = 0; i < g.dim; ++i) p[i] = rng.uniform(g.domain[i].lo, g.domain[i].hi);
    if (g.admits(p)) out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear algebra on jets

std::vector<Jet> invert(const std::vector<Jet>& m, int n) {
  std::vector<Jet> a = m;
  std::vector<Jet> inv;
  inv.reserve(n * n);
  const int order = m[0].order();
  const int nv = m[0].n_vars();
  double scale = 0.0;
  for (const auto& x : m) scale = std::max(scale, std::abs(x.value()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) inv.push_back(Jet::constant(i == j ? 1.0 : 0.0, nv, order));
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col].value()) > std::abs(a[piv * n + col].value())) piv = r;
    }
    if (!(std::abs(a[piv * n + col].value()) > 1e-13 * std::max(scale, 1e-300))) {
      throw SingularMetric("metric matrix is singular");
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
    }
    const Jet rp = reciprocal(a[col * n + col]);
    for (int j = 0; j < n; ++j) {
      a[col * n + j] = a[col * n + j] * rp;
      inv[col * n + j] = inv[col * n + j] * rp;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = a[r * n + col];
      if (f.is_constant() && f.value() == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[col * n + j];
        inv[r * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return inv;
}

namespace {

std::vector<Jet> truncate_all(const std::vector<Jet>& v, int order) {
  std::vector<Jet> out;
  out.reserve(v.size());
  for (const auto& j : v) out.push_back(j.truncated(order));
  return out;
}

// Cached entry at `order`, derived from any cached higher order if present.
template <class Map>
const std::vector<Jet>* cached(Map& cache, int order) {
  auto it = cache.lower_bound(order);
  if (it == cache.end()) return nullptr;
  if (it->first == order) return &it->second;
  return &cache.emplace(order, truncate_all(it->second, order)).first->second;
}

}  // namespace

ChartPoint::ChartPoint(const Geometry& g, std::vector<double> p, int jet_cap)
    : g_(&g), p_(std::move(p)), cap_(jet_cap) {
  if (static_cast<int>(p_.size()) != g.dim) {
    throw ShapeMismatch("point has " + std::to_string(p_.size()) + " coordinates, chart has " + std::to_string(g.dim));
  }
  if (!g.admits(p_)) throw PointExcluded("point lies outside the admissible domain");
}

void ChartPoint::require(int order) { max_used_ = std::max(max_used_, order); }

Jet ChartPoint::eval(const Expr& e, int order) {
  require(order);
  return eval_jet(e, p_, order);
}

const std::vector<Jet>& ChartPoint::metric(int order) {
  if (const auto* c = cached(metric_, order)) return *c;
  require(order);
  const int n = dim();
  std::vector<Jet> g;
  g.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.push_back(eval_jet(g_->metric[i][j], p_, order));
  }
  double scale = 1.0;
  for (const auto& x : g) scale = std::max(scale, std::abs(x.value()));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto a = g[i * n + j].taylor();
      const auto b = g[j * n + i].taylor();
      for (std::size_t t = 0; t < a.size(); ++t) {
        if (std::abs(a[t] - b[t]) > 1e-12 * scale) throw SingularMetric("metric is not symmetric at this point");
      }
    }
  }
  // Positive definiteness via Cholesky on values.
  std::vector<double> l(n * n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = g[j * n + j].value();
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 1e-14 * scale)) throw SingularMetric("metric is not positive-definite at this point");
    l[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = g[i * n + j].value();
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  return metric_.emplace(order, std::move(g)).first->second;
}

const std::vector<Jet>& ChartPoint::metric_inv(int order) {
  if (const auto* c = cached(metric_inv_, order)) return *c;
  return metric_inv_.emplace(order, invert(metric(order), dim())).first->second;
}

const std::vector<Jet>& ChartPoint::christoffel(int order) {
  if (const auto* c = cached(christoffel_, order)) return *c;
  const int n = dim();
  const auto& g = metric(order + 1);
  const auto& ginv = metric_inv(order);
  // dg[(l * n + i) * n + j] = d_l g_ij
  std::vector<Jet> dg;
  dg.reserve(n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int ij = 0; ij < n * n; ++ij) dg.push_back(g[ij].derivative(l));
  }
  auto d = [&](int l, int i, int j) -> const Jet& { return dg[(l * n + i) * n + j]; };
  // Lowered symbols Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
  std::vector<Jet> low;
  low.reserve(n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) low.push_back((d(i, j, l) + d(j, i, l) - d(l, i, j)) * 0.5);
    }
  }
  std::vector<Jet> gamma;
  gamma.reserve(n * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j < i) {
          gamma.push_back(gamma[(k * n + j) * n + i]);
          continue;
        }
        Jet s = zero(order);
        for (int l = 0; l < n; ++l) s += ginv[k * n + l] * low[(l * n + i) * n + j];
        gamma.push_back(std::move(s));
      }
    }
  }
  return christoffel_.emplace(order, std::move(gamma)).first->second;
}

const std::vector<std::vector<Jet>>& ChartPoint::frame(int order, FrameOrder how) {
  const int key_how = how == FrameOrder::Ascending ? 0 : 1;
  if (auto it = frame_.find({order, key_how}); it != frame_.end()) return it->second;
  const int n = dim();
  const auto& g = metric(order);
  auto inner = [&](const std::vector<Jet>& u, const std::vector<Jet>& v) {
    Jet s = zero(order);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) s += g[a * n + b] * (u[a] * v[b]);
    }
    return s;
  };
  std::vector<std::vector<Jet>> out;
  for (int t = 0; t < n; ++t) {
    const int idx = how == FrameOrder::Ascending ? t : n - 1 - t;
    std::vector<Jet> v(n, zero(order));
    v[idx] = constant(1.0, order);
    std::vector<Jet> w = v;
    for (const auto& x : out) {
      const Jet c = inner(v, x);
      for (int a = 0; a < n; ++a) w[a] -= c * x[a];
    }
    const Jet norm2 = inner(w, w);
    if (!(norm2.value() > 0.0)) throw SingularMetric("Gram-Schmidt produced a null vector");
    const Jet r = reciprocal(sqrt(norm2));
    for (auto& c : w) c = c * r;
    out.push_back(std::move(w));
  }
  return frame_.emplace(std::make_pair(order, key_how), std::move(out)).first->second;
}

const std::vector<Jet>& ChartPoint::curvature(int order) {
  if (const auto* c = cached(curvature_, order)) return *c;
  const int n = dim();
  const auto& G1 = christoffel(order + 1);
  const auto& G = christoffel(order);
  auto gam = [&](int k, int i, int j) -> const Jet& { return G[(k * n + i) * n + j]; };
  std::vector<Jet> R;
  R.reserve(n * n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (j <= i) {
            R.push_back(j == i ? zero(order) : -R[((l * n + k) * n + j) * n + i]);
            continue;
          }
          Jet s = G1[(l * n + j) * n + k].derivative(i) - G1[(l * n + i) * n + k].derivative(j);
          for (int m = 0; m < n; ++m) s += gam(l, i, m) * gam(m, j, k) - gam(l, j, m) * gam(m, i, k);
          R.push_back(std::move(s));
        }
      }
    }
  }
  return curvature_.emplace(order, std::move(R)).first->second;
}

JetForm ChartPoint::form(const FormField& f, int order) {
  if (f.dim != dim()) throw ShapeMismatch("form dimension does not match the chart");
  require(order);
  JetForm out(dim(), f.degree, zero(order));
  if (out.empty()) return out;
  for (const auto& [m, e] : f.coeffs) out.at(m) = eval_jet(e, p_, order);
  return out;
}

JetVecForm ChartPoint::vec_form(const VecFormField& f, int order) {
  std::vector<JetForm> comps;
  comps.reserve(f.comps.size());
  for (const auto& c : f.comps) comps.push_back(form(c, order));
  return JetVecForm(std::move(comps));
}

// ---------------------------------------------------------------------------

MetricJets metric_at(const Geometry& g, std::span<const double> p, int order) {
  ChartPoint cp(g, std::vector<double>(p.begin(), p.end()));
  return MetricJets{cp.metric(order), cp.metric_inv(order)};
}

std::vector<Jet> christoffel(const Geometry& g, std::span<const double> p, int order) {
  ChartPoint cp(g, std::vector<double>(p.begin(), p.end()));
  return cp.christoffel(order);
}

std::vector<std::vector<double>> orthonormal_frame(const Geometry& g, std::span<const double> p, FrameOrder how) {
  ChartPoint cp(g, std::vector<double>(p.begin(), p.end()));
  std::vector<std::vector<double>> out;
  for (const auto& x : cp.frame(0, how)) {
    std::vector<double> v;
    for (const auto& c : x) v.push_back(c.value());
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<double> curvature(const Geometry& g, std::span<const double> p) {
  ChartPoint cp(g, std::vector<double>(p.begin(), p.end()));
  std::vector<double> out;
  for (const auto& r : cp.curvature(0)) out.push_back(r.value());
  return out;
}

}  // namespace excal

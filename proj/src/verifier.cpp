#include "excal/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "excal/catalog.hpp"
#include "excal/errors.hpp"
#include "excal/format.hpp"
#include "excal/splitmix.hpp"

namespace excal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::shared_ptr<const Geometry> resolve_geometry(const IdentityCheck& c) {
  if (c.inline_geometry) return c.inline_geometry;
  std::shared_ptr<const CatalogEntry> e;
  try {
    e = builtin(c.geometry);
  } catch (const UnknownEntry& err) {
    throw ConfigError(c.id + ": " + err.what());
  }
  return std::shared_ptr<const Geometry>(e, &e->geometry);
}

OpPtr make_input(const Geometry& g, const InputSpec& in) {
  if (in.sort == Sort::Vec) {
    return ops::vec(in.name, random_vec(g, in.degree, in.seed, in.kind, in.max_poly_degree));
  }
  if (in.sort != Sort::Form) throw ConfigError("input '" + in.name + "' must be a form or a vec");
  return ops::form(in.name, random_form(g, in.degree, in.seed, in.kind, in.max_poly_degree));
}

}  // namespace

CheckReport run_check(const IdentityCheck& c) {
  const auto t0 = std::chrono::steady_clock::now();
  auto gp = resolve_geometry(c);
  const Geometry& g = *gp;

  OpEnv env = OpEnv::from_geometry(g);
  Json input_seeds = Json::object();
  try {
    for (const auto& [name, e] : c.bindings) env.bind(name, e);
    for (const auto& in : c.inputs) {
      env.bind(in.name, make_input(g, in));
      input_seeds[in.name] = in.seed;
    }
  } catch (const Error& e) {
    throw ConfigError(c.id + ": " + e.tag() + ": " + e.what());
  }

  std::optional<CompiledIdentity> compiled;
  try {
    Identity id{c.id, c.lhs, c.rhs, nullptr};
    if (c.native) id.native = c.native(env);
    compiled.emplace(id, env);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(c.id + ": " + e.tag() + ": " + e.what());
  }

  std::vector<std::vector<double>> pts;
  if (c.points) {
    if (c.points->empty()) throw ConfigError(c.id + ": empty point list");
    for (const auto& p : *c.points) {
      if (static_cast<int>(p.size()) != g.dim) {
        throw ConfigError(c.id + ": point " + format_point(p) + " does not have " + std::to_string(g.dim) +
                          " coordinates");
      }
    }
    pts = *c.points;
  } else {
    if (c.point_count <= 0) throw ConfigError(c.id + ": empty point list");
    pts = sample_points(g, c.point_count, c.point_seed);
  }

  CheckReport r;
  r.id = c.id;
  r.geometry = c.geometry.empty() ? g.name : c.geometry;
  r.expected_fail = c.expected_fail;
  r.tol = c.tol;
  r.fail_threshold = c.expected_fail ? c.fail_threshold : 0.0;
  r.points.resize(pts.size());
  std::vector<int> orders(pts.size(), 0);

  parallel_for(pts.size(), [&](std::size_t i) {
    PointRecord& rec = r.points[i];
    rec.p = pts[i];
    try {
      ChartPoint cp(g, pts[i]);
      Evaluator ev(cp);
      auto [lhs, rhs] = compiled->evaluate(ev);
      PointError e = compare(lhs, rhs, c.tol);
      rec.abs_err = e.abs_err;
      rec.rel_err = e.rel_err;
      rec.pass = e.pass;
      orders[i] = cp.max_order_used();
    } catch (const Error& e) {
      rec.abs_err = rec.rel_err = kNaN;
      rec.pass = false;
      rec.error = e.tag();
    } catch (const std::exception&) {
      rec.abs_err = rec.rel_err = kNaN;
      rec.pass = false;
      rec.error = "InternalError";
    }
  });

  bool all_pass = true, any_error = false;
  std::optional<std::size_t> first_nan;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const PointRecord& rec = r.points[i];
    all_pass = all_pass && rec.pass;
    any_error = any_error || !rec.error.empty();
    r.jet_order = std::max(r.jet_order, orders[i]);
    if (std::isnan(rec.abs_err)) {
      if (!first_nan) first_nan = i;
      continue;
    }
    if (rec.abs_err > r.max_abs_err) {
      r.max_abs_err = rec.abs_err;
      worst = i;
    }
    r.max_rel_err = std::max(r.max_rel_err, rec.rel_err);
  }
  if (first_nan) {
    // A point without a finite error dominates the aggregate.
    worst = *first_nan;
    r.max_abs_err = r.max_rel_err = kNaN;
  }
  r.worst_point = r.points[worst].p;
  if (c.expected_fail) {
    r.pass = !any_error && r.max_abs_err > c.fail_threshold;
  } else {
    r.pass = all_pass;
  }

  r.seeds = Json::object();
  if (c.points) {
    r.seeds["points"] = nullptr;
  } else {
    r.seeds["points"] = c.point_seed;
  }
  r.seeds["inputs"] = input_seeds;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void apply_options(IdentityCheck& c, const SuiteOptions& opts) {
  if (opts.points && !c.points) c.point_count = *opts.points;
  if (opts.atol) c.tol.atol = *opts.atol;
  if (opts.rtol) c.tol.rtol = *opts.rtol;
}

std::vector<CheckReport> suite(const std::vector<std::string>& names, const SuiteOptions& opts) {
  std::vector<CheckReport> out;
  for (const auto& c : suite_checks(names, opts)) out.push_back(run_check(c));
  return out;
}

bool passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

// ---------------------------------------------------------------------------
// Config checks

namespace {

std::uint64_t derived_seed(std::uint64_t base, const std::string& id, const std::string& what) {
  SplitMix64 s(base ^ fnv1a(what.c_str(), fnv1a(id.c_str())));
  return s.next();
}

template <class T>
T get_field(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

std::vector<IdentityCheck> checks_from_json(const Json& doc, std::shared_ptr<const Geometry> g,
                                            const SuiteOptions& opts) {
  std::vector<IdentityCheck> out;
  if (!doc.is_object() || !doc.contains("checks")) return out;
  const Json& arr = doc["checks"];
  if (!arr.is_array()) throw ConfigError("checks: expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& j = arr[i];
    const std::string where = "checks[" + std::to_string(i) + "]";
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    IdentityCheck c;
    c.id = j.contains("id") ? get_field<std::string>(j, "id", where) : "check" + std::to_string(i + 1);
    c.geometry = g->name;
    c.inline_geometry = g;
    c.lhs = get_field<std::string>(j, "lhs", where);
    c.rhs = get_field<std::string>(j, "rhs", where);
    if (j.contains("inputs")) {
      const Json& ins = j["inputs"];
      if (!ins.is_array()) throw ConfigError(where + ".inputs: expected an array");
      for (std::size_t k = 0; k < ins.size(); ++k) {
        const std::string w = where + ".inputs[" + std::to_string(k) + "]";
        const Json& jin = ins[k];
        if (!jin.is_object()) throw ConfigError(w + ": expected an object");
        InputSpec in;
        in.name = get_field<std::string>(jin, "name", w);
        in.degree = get_field<int>(jin, "degree", w);
        const std::string sort = jin.contains("sort") ? get_field<std::string>(jin, "sort", w) : "form";
        if (sort == "form") {
          in.sort = Sort::Form;
        } else if (sort == "vec") {
          in.sort = Sort::Vec;
        } else {
          throw ConfigError(w + ".sort: expected \"form\" or \"vec\"");
        }
        const std::string kind = jin.contains("kind") ? get_field<std::string>(jin, "kind", w) : "poly";
        if (kind == "poly") {
          in.kind = FormKind::Poly;
        } else if (kind == "trig") {
          in.kind = FormKind::Trig;
        } else {
          throw ConfigError(w + ".kind: expected \"poly\" or \"trig\"");
        }
        if (jin.contains("max_poly_degree")) in.max_poly_degree = get_field<int>(jin, "max_poly_degree", w);
        in.seed = jin.contains("seed") ? get_field<std::uint64_t>(jin, "seed", w)
                                       : derived_seed(opts.seed, c.id, "input:" + in.name);
        c.inputs.push_back(in);
      }
    }
    c.point_seed = j.contains("seed") ? get_field<std::uint64_t>(j, "seed", where)
                                      : derived_seed(opts.seed, c.id, "points");
    if (j.contains("points")) {
      const Json& p = j["points"];
      if (p.is_number_integer()) {
        c.point_count = p.get<int>();
      } else {
        c.points = get_field<std::vector<std::vector<double>>>(j, "points", where);
      }
    }
    if (j.contains("tol")) {
      const Json& t = j["tol"];
      if (t.contains("atol")) c.tol.atol = get_field<double>(t, "atol", where + ".tol");
      if (t.contains("rtol")) c.tol.rtol = get_field<double>(t, "rtol", where + ".tol");
    }
    if (j.contains("expected_fail")) c.expected_fail = get_field<bool>(j, "expected_fail", where);
    if (j.contains("fail_threshold")) c.fail_threshold = get_field<double>(j, "fail_threshold", where);
    apply_options(c, opts);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<IdentityCheck> validation_checks(std::shared_ptr<const Geometry> g, const SuiteOptions& opts) {
  std::vector<IdentityCheck> out;
  for (const Identity& v : structural_validations(*g)) {
    IdentityCheck c;
    c.id = "validate/" + v.id;
    c.geometry = g->name;
    c.inline_geometry = g;
    c.lhs = v.lhs;
    c.rhs = v.rhs;
    if (v.native) c.native = [n = v.native](const OpEnv&) { return n; };
    c.point_seed = derived_seed(opts.seed, c.id + "@" + g->name, "points");
    apply_options(c, opts);
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

Json report_to_json(const CheckReport& r) {
  Json j = Json::object();
  j["check"] = r.id;
  j["geometry"] = r.geometry;
  j["pass"] = r.pass;
  j["expected_fail"] = r.expected_fail;
  j["max_abs_err"] = r.max_abs_err;
  j["max_rel_err"] = r.max_rel_err;
  j["worst_point"] = r.worst_point;
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json jp = Json::object();
    jp["p"] = p.p;
    jp["abs_err"] = p.abs_err;
    jp["rel_err"] = p.rel_err;
    if (!p.error.empty()) jp["error"] = p.error;
    pts.push_back(std::move(jp));
  }
  j["points"] = std::move(pts);
  j["seeds"] = r.seeds;
  j["jet_order"] = r.jet_order;
  Json tol = Json::object();
  tol["atol"] = r.tol.atol;
  tol["rtol"] = r.tol.rtol;
  if (r.expected_fail) tol["min_abs_err"] = r.fail_threshold;
  j["tolerances"] = std::move(tol);
  j["wall_time"] = r.wall_time;
  return j;
}

Json reports_to_json(const std::vector<CheckReport>& reports, std::uint64_t seed, double wall_time) {
  Json doc = Json::object();
  doc["schema"] = kReportSchema;
  doc["seed"] = seed;
  Json arr = Json::array();
  std::size_t failed = 0;
  for (const auto& r : reports) {
    arr.push_back(report_to_json(r));
    failed += r.pass ? 0 : 1;
  }
  doc["reports"] = std::move(arr);
  Json summary = Json::object();
  summary["checks"] = reports.size();
  summary["passed"] = reports.size() - failed;
  summary["failed"] = failed;
  doc["summary"] = std::move(summary);
  doc["wall_time"] = wall_time;
  return doc;
}

Json strip_timing(Json doc) {
  if (doc.is_object()) {
    doc.erase("wall_time");
    for (auto& [k, v] : doc.items()) v = strip_timing(std::move(v));
  } else if (doc.is_array()) {
    for (auto& v : doc) v = strip_timing(std::move(v));
  }
  return doc;
}

std::string reports_to_text(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  std::size_t failed = 0;
  for (const auto& r : reports) {
    failed += r.pass ? 0 : 1;
    out << (r.pass ? "pass " : "FAIL ") << r.id << "  max_abs_err " << format_number(r.max_abs_err);
    if (r.expected_fail) out << " (expected fail, needs > " << format_number(r.fail_threshold) << ")";
    if (!r.pass) {
      out << " worst " << format_point(r.worst_point);
      for (const auto& p : r.points) {
        if (!p.error.empty()) {
          out << " error " << p.error << " at " << format_point(p.p);
          break;
        }
      }
    }
    out << '\n';
  }
  out << reports.size() << " checks, " << reports.size() - failed << " passed, " << failed << " failed\n";
  return out.str();
}

}  // namespace excal

// excal: run identity suites, evaluate operator expressions, emit catalog
// configs. Exit codes: 0 pass, 1 identity failure, 2 usage or config error.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "excal/catalog.hpp"
#include "excal/errors.hpp"
#include "excal/verifier.hpp"

using namespace excal;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_source(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage("cannot read '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Json parse_json(const std::string& text, const std::string& path) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the 1-based position of the last byte read.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw SyntaxError(offset, "malformed JSON in '" + path + "'");
  }
}

std::shared_ptr<const Geometry> load_geometry(const std::string& path, Json* doc_out = nullptr) {
  Json doc = parse_json(read_source(path), path);
  auto g = std::make_shared<const Geometry>(geometry_from_json(doc));
  if (doc_out) *doc_out = std::move(doc);
  return g;
}

std::uint64_t parse_seed(const std::string& text, const char* what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.find('-') != std::string::npos) {
    throw Usage(std::string(what) + ": not an unsigned integer: '" + text + "'");
  }
  return v;
}

// %.17g, the format used for every printed coefficient.
std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

std::string mask_key(IndexMask m) {
  if (m == 0) return "0";
  std::string s;
  for (int i = 0; m >> i; ++i) {
    if ((m >> i) & 1) s += (s.empty() ? "" : ",") + std::to_string(i + 1);
  }
  return s;
}

// One line "1: a, 2: b" from a coefficient getter over the lex-ordered masks.
template <class Get>
std::string coeff_line(int n, int k, Get get) {
  std::string s;
  for (IndexMask m : TupleTable::get(n).masks(k)) s += (s.empty() ? "" : ", ") + mask_key(m) + ": " + num17(get(m));
  return s.empty() ? "(empty)" : s;
}

std::vector<double> parse_point(const std::string& text, int dim) {
  std::vector<double> p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) throw Usage("--at: not a number: '" + item + "'");
    p.push_back(v);
  }
  if (static_cast<int>(p.size()) != dim) {
    throw Usage("--at: expected " + std::to_string(dim) + " coordinates, got " + std::to_string(p.size()));
  }
  return p;
}

void print_form(const JetForm& w, int order) {
  const int n = w.dim(), k = w.degree();
  std::cout << coeff_line(n, k, [&](IndexMask m) { return w.at(m).value(); }) << '\n';
  if (order == 0 || w.empty()) return;
  const JetLayout& lay = w.zero().layout();
  for (std::size_t pos = 1; pos < lay.size(); ++pos) {
    const MultiIndex& a = lay.index(pos);
    std::string label;
    for (int v : a) label += (label.empty() ? "" : ",") + std::to_string(v);
    std::cout << "d^(" << label << ") "
              << coeff_line(n, k, [&](IndexMask m) { return w.at(m).partial(std::span<const int>(a)); }) << '\n';
  }
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string config;
  std::vector<std::string> builtin;
  std::string report = "text";
  std::optional<std::string> seed;
  std::optional<int> points;
  std::optional<double> tol_abs, tol_rel;
};

int cmd_check(const CheckArgs& a) {
  if (a.config.empty() == a.builtin.empty()) throw Usage("check: give exactly one of a config path or --builtin");
  SuiteOptions opts;
  if (const char* env = std::getenv("EXCAL_SEED"); env && *env) opts.seed = parse_seed(env, "EXCAL_SEED");
  if (a.seed) opts.seed = parse_seed(*a.seed, "--seed");
  if (a.points && *a.points <= 0) throw Usage("--points: must be positive");
  opts.points = a.points;
  opts.atol = a.tol_abs;
  opts.rtol = a.tol_rel;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<IdentityCheck> checks;
  if (!a.builtin.empty()) {
    std::vector<std::string> names;
    for (const auto& item : a.builtin) {
      std::stringstream ss(item);
      for (std::string n; std::getline(ss, n, ',');) {
        if (!n.empty()) names.push_back(n);
      }
    }
    checks = suite_checks(names, opts);
  } else {
    Json doc;
    auto g = load_geometry(a.config, &doc);
    checks = validation_checks(g, opts);
    auto extra = checks_from_json(doc, g, opts);
    checks.insert(checks.end(), extra.begin(), extra.end());
    if (checks.empty()) throw ConfigError("the config declares no checks and its kind implies none");
  }
  std::vector<CheckReport> reports;
  reports.reserve(checks.size());
  for (const auto& c : checks) reports.push_back(run_check(c));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (a.report == "json") {
    std::cout << reports_to_json(reports, opts.seed, wall).dump(2) << '\n';
  } else {
    std::cout << reports_to_text(reports);
    std::cout << "seed " << opts.seed << ", tolerances atol " << format_number(checks.front().tol.atol) << " rtol "
              << format_number(checks.front().tol.rtol) << ", " << format_number(std::round(wall * 1000) / 1000)
              << " s\n";
  }
  return passed(reports) ? kPass : kFail;
}

struct EvalArgs {
  std::string config;
  std::string catalog;
  std::string expr;
  std::string at;
  int order = 0;
};

int cmd_eval(const EvalArgs& a) {
  if (a.config.empty() == a.catalog.empty()) throw Usage("eval: give exactly one of a config path or --catalog");
  if (a.order < 0) throw Usage("--order: must be non-negative");
  std::shared_ptr<const Geometry> g;
  if (!a.catalog.empty()) {
    auto e = builtin(a.catalog);
    g = std::shared_ptr<const Geometry>(e, &e->geometry);
  } else {
    g = load_geometry(a.config);
  }
  const OpEnv env = OpEnv::from_geometry(*g);
  OpPtr e = parse_op(a.expr, env);
  if (e->is_op()) throw TypeError("an operator needs an argument to be evaluated: '" + a.expr + "'");
  ChartPoint cp(*g, parse_point(a.at, g->dim));
  Evaluator ev(cp);
  try {
    if (e->is_form()) {
      print_form(ev.form(e, a.order), a.order);
    } else {
      const JetVecForm& v = ev.vec(e, a.order);
      for (int b = 0; b < v.dim(); ++b) {
        std::cout << "[" << b + 1 << "] ";
        print_form(v[b], a.order);
      }
    }
  } catch (const JetCapExceeded& err) {
    throw JetCapExceeded(std::string(err.what()) + " in '" + a.expr + "' (bytes 0.." + std::to_string(a.expr.size()) +
                         ")");
  }
  return kPass;
}

int cmd_catalog(bool list, const std::string& emit) {
  if (list == !emit.empty()) throw Usage("catalog: give exactly one of --list or --emit");
  if (list) {
    for (const auto& f : catalog_families()) std::cout << f.pattern << "  " << f.description << '\n';
    return kPass;
  }
  std::cout << geometry_to_json(builtin(emit)->geometry).dump(2) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior calculus identity checker"};
  app.require_subcommand(1);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Run identity checks from a config or built-in suites");
  check->add_option("config", ca.config, "excal-config v1 file, or - for standard input");
  check->add_option("--builtin", ca.builtin, "Suite names (comma separated, repeatable) or 'all'");
  check->add_option("--report", ca.report, "Report format")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--seed", ca.seed, "Base seed (overrides EXCAL_SEED)");
  check->add_option("--points", ca.points, "Points per check");
  check->add_option("--tol-abs", ca.tol_abs, "Absolute tolerance");
  check->add_option("--tol-rel", ca.tol_rel, "Relative tolerance");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate an operator expression at a point");
  eval->add_option("config", ea.config, "excal-config v1 file, or - for standard input");
  eval->add_option("--catalog", ea.catalog, "Built-in geometry instead of a config");
  eval->add_option("--expr", ea.expr, "Operator expression")->required();
  eval->add_option("--at", ea.at, "Point as c1,c2,...")->required();
  eval->add_option("--order", ea.order, "Also print partial derivatives up to this order");

  bool list = false;
  std::string emit;
  auto* cat = app.add_subcommand("catalog", "List or emit built-in geometries");
  cat->add_flag("--list", list, "List entry families");
  cat->add_option("--emit", emit, "Write an entry as an excal-config v1 document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*check) return cmd_check(ca);
    if (*eval) return cmd_eval(ea);
    return cmd_catalog(list, emit);
  } catch (const Error& e) {
    std::cerr << "excal: " << e.tag() << ": " << e.what() << '\n';
  } catch (const Usage& e) {
    std::cerr << "excal: usage: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "excal: " << e.what() << '\n';
  }
  return kUsage;
}

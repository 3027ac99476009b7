#pragma once

// Declarative identity checks: bind inputs, sample points, compare both sides
// coefficientwise and report. Built-in suites cover the operator identities
// on the catalog geometries.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "excal/identity.hpp"
#include "excal/random_form.hpp"

namespace excal {

inline constexpr const char* kReportSchema = "excal-report v1";
inline constexpr std::uint64_t kDefaultSeed = 20240229;

/// A random input bound under `name` before the sides are parsed.
struct InputSpec {
  std::string name;
  Sort sort = Sort::Form;  // Form or Vec
  int degree = 0;
  std::uint64_t seed = 0;
  FormKind kind = FormKind::Poly;
  int max_poly_degree = 2;
};

struct IdentityCheck {
  std::string id;
  /// Catalog name, or a label when `inline_geometry` is set.
  std::string geometry;
  std::shared_ptr<const Geometry> inline_geometry;
  std::vector<InputSpec> inputs;
  /// Fixed fields bound alongside the random inputs (designated witnesses).
  std::vector<std::pair<std::string, OpPtr>> bindings;
  /// Explicit points; when absent, `point_count` points from `point_seed`.
  std::optional<std::vector<std::vector<double>>> points;
  int point_count = 20;
  std::uint64_t point_seed = 0;
  Tolerance tol;
  std::string lhs, rhs;
  /// Native sides, built once the inputs are bound; overrides lhs/rhs.
  std::function<NativeSides(const OpEnv&)> native;
  /// Inverted check: passes iff max_abs_err > fail_threshold.
  bool expected_fail = false;
  double fail_threshold = 1e-3;
};

struct PointRecord {
  std::vector<double> p;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = true;
  std::string error;  // error tag when evaluation failed at this point
};

struct CheckReport {
  std::string id;
  std::string geometry;
  bool pass = false;
  bool expected_fail = false;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::vector<double> worst_point;
  std::vector<PointRecord> points;
  Json seeds;
  int jet_order = 0;
  Tolerance tol;
  double fail_threshold = 0.0;
  double wall_time = 0.0;
};

/// Never aborts on a point error; it is recorded as a failing point. Throws
/// ConfigError when the check cannot be set up (unknown names, sort or degree
/// mismatch, no points).
CheckReport run_check(const IdentityCheck& check);

struct SuiteOptions {
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> points;
  std::optional<double> atol, rtol;
};

/// Built-in suite identifiers in run order.
const std::vector<std::string>& suite_names();

/// The checks of the named suites ("all" expands). Throws UnknownSuite.
std::vector<IdentityCheck> suite_checks(const std::vector<std::string>& names, const SuiteOptions& opts = {});

std::vector<CheckReport> suite(const std::vector<std::string>& names, const SuiteOptions& opts = {});

/// Checks declared under "checks" in a config document, on `g`.
std::vector<IdentityCheck> checks_from_json(const Json& doc, std::shared_ptr<const Geometry> g,
                                            const SuiteOptions& opts = {});

/// Load-time structural identities of `g` as checks.
std::vector<IdentityCheck> validation_checks(std::shared_ptr<const Geometry> g, const SuiteOptions& opts = {});

/// Applies the option overrides (points, tolerances) to a check.
void apply_options(IdentityCheck& c, const SuiteOptions& opts);

bool passed(const std::vector<CheckReport>& reports);

Json report_to_json(const CheckReport& r);
/// One document: schema, seed, reports, summary.
Json reports_to_json(const std::vector<CheckReport>& reports, std::uint64_t seed, double wall_time);
/// Drops every "wall_time" member, recursively.
Json strip_timing(Json doc);
/// One line per check plus a summary line.
std::string reports_to_text(const std::vector<CheckReport>& reports);

}  // namespace excal

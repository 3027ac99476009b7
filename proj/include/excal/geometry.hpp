#pragma once

// Coordinate charts with a Riemannian metric, the form fields living on them,
// and per-point jets of the metric, its inverse, the Levi-Civita connection,
// orthonormal frames and curvature.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "excal/alt_algebra.hpp"
#include "excal/expr.hpp"
#include "excal/jet.hpp"
#include "json.hpp"

namespace excal {

using Json = nlohmann::ordered_json;
using JetForm = AltTensor<Jet>;
using JetVecForm = VecAltTensor<Jet>;

inline constexpr const char* kConfigSchema = "excal-config v1";
inline constexpr int kDefaultJetCap = 4;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A degree-k form with expression coefficients; absent indices are zero.
struct FormField {
  int dim = 1;
  int degree = 0;
  std::map<IndexMask, Expr> coeffs;

  FormField() = default;
  FormField(int n, int k) : dim(n), degree(k) {}
  void set(std::span<const int> idx, Expr e);
};

/// Tangent-valued form: comps[b] multiplies the coordinate vector d_b.
struct VecFormField {
  int dim = 1;
  int degree = 0;
  std::vector<FormField> comps;

  VecFormField() = default;
  VecFormField(int n, int k) : dim(n), degree(k), comps(n, FormField(n, k)) {}
  /// Endomorphism from a matrix with m[i][j] = coefficient of d_i in T(d_j).
  static VecFormField endomorphism(const std::vector<std::vector<Expr>>& m);
  static VecFormField vector(const std::vector<Expr>& v);
};

FormField one_form(const std::vector<Expr>& coeffs);

struct Structures {
  std::optional<std::vector<std::vector<Expr>>> J;
  std::optional<std::vector<std::vector<Expr>>> phi;
  std::optional<std::vector<Expr>> xi;
  std::optional<std::vector<Expr>> eta;
  std::optional<std::vector<Expr>> theta;
};

struct Geometry {
  std::string name;
  /// Structure family driving load-time validation: riemannian, flat, killing,
  /// kahler, lck, sasakian, cokahler.
  std::string kind = "riemannian";
  std::string description;
  int dim = 1;
  std::vector<std::string> coords;
  std::vector<std::vector<Expr>> metric;
  std::vector<Interval> domain;
  std::optional<Expr> exclude;  // admissible iff exclude > 0
  Structures structures;
  std::vector<std::pair<std::string, FormField>> forms;

  const FormField* find_form(const std::string& name) const;
  bool in_box(std::span<const double> p) const;
  /// In the box and satisfying the exclusion predicate.
  bool admits(std::span<const double> p) const;
};

/// Parses an excal-config v1 document. Every failure, including expression
/// parse errors, surfaces as ConfigError naming the offending field.
Geometry geometry_from_json(const Json& doc);
Json geometry_to_json(const Geometry& g);
FormField form_from_json(const Json& j, int dim, std::span<const std::string> coords,
                         const std::string& what);
Json form_to_json(const FormField& f);

/// Uniform points in the domain box via splitmix64, skipping excluded ones.
std::vector<std::vector<double>> sample_points(const Geometry& g, int count, std::uint64_t seed);

enum class FrameOrder { Ascending, Descending };

/// Jets of the geometric quantities at one point, computed on demand and cached
/// per order. Not thread-safe; use one instance per point and thread.
class ChartPoint {
 public:
  ChartPoint(const Geometry& g, std::vector<double> p, int jet_cap = kDefaultJetCap);

  const Geometry& geometry() const { return *g_; }
  int dim() const { return g_->dim; }
  std::span<const double> point() const { return p_; }
  int jet_cap() const { return cap_; }
  /// Highest jet order requested so far.
  int max_order_used() const { return max_used_; }

  Jet zero(int order) const { return Jet(dim(), order); }
  Jet constant(double c, int order) const { return Jet::constant(c, dim(), order); }
  Jet eval(const Expr& e, int order);

  /// Row-major n x n jets.
  const std::vector<Jet>& metric(int order);
  const std::vector<Jet>& metric_inv(int order);
  /// Gamma^k_{ij} at [(k * n + i) * n + j].
  const std::vector<Jet>& christoffel(int order);
  /// Gram-Schmidt frame on the coordinate vectors; entry t holds X_t^a.
  const std::vector<std::vector<Jet>>& frame(int order, FrameOrder how = FrameOrder::Ascending);
  /// R^l_{kij} at [((l * n + k) * n + i) * n + j], with
  /// R(d_i, d_j) d_k = R^l_{kij} d_l.
  const std::vector<Jet>& curvature(int order);

  JetForm form(const FormField& f, int order);
  JetVecForm vec_form(const VecFormField& f, int order);

 private:
  void require(int order);

  const Geometry* g_;
  std::vector<double> p_;
  int cap_;
  int max_used_ = 0;
  std::map<int, std::vector<Jet>> metric_, metric_inv_, christoffel_, curvature_;
  std::map<std::pair<int, int>, std::vector<std::vector<Jet>>> frame_;
};

/// Gauss-Jordan inverse with partial pivoting on values. Throws SingularMetric.
std::vector<Jet> invert(const std::vector<Jet>& m, int n);

// One-shot helpers that build a ChartPoint internally.
struct MetricJets {
  std::vector<Jet> g, g_inv;
};
MetricJets metric_at(const Geometry& g, std::span<const double> p, int order);
std::vector<Jet> christoffel(const Geometry& g, std::span<const double> p, int order);
std::vector<std::vector<double>> orthonormal_frame(const Geometry& g, std::span<const double> p,
                                                   FrameOrder how = FrameOrder::Ascending);
std::vector<double> curvature(const Geometry& g, std::span<const double> p);

}  // namespace excal

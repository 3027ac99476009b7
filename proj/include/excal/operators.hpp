#pragma once

// Operator calculus as typed expression trees evaluated lazily at a point.
//
// An OpExpr is one of three sorts: a form, a tangent-valued form ("vec"), or
// an operator acting on forms. Degrees are tracked statically and checked
// when a node is built. Each form or vec node also records its derivative
// depth: evaluating it to jet order m pulls leaf data (coefficients and
// metric) to order at most m + depth. Operators carry two depths, the extra
// orders they pull from their input and from their own parameters.
//
// Conventions: [A, B] = AB - (-1)^{|A||B|} BA, {A, B} = AB + BA,
// L_phi = i_phi d - (-1)^{p-1} d i_phi, nabla_phi = L_phi - (-1)^p i_{d^nabla phi}.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "excal/calculus.hpp"
#include "excal/geometry.hpp"

namespace excal {

enum class Sort { Form, Vec, Op };

const char* sort_name(Sort s);

class OpExpr;
using OpPtr = std::shared_ptr<const OpExpr>;

class OpExpr {
 public:
  enum class Kind {
    // forms
    FormLeaf, Number, ZeroForm, D, Delta, DeltaRev, Wedge, Interior, Trace, Flat, Apply,
    // vecs
    VecLeaf, Identity, ZeroVec, Sharp, NablaForm, DNabla, WedgeVec, Compose, LieMetric, LieMetricPrinted,
    CurvatureWedge, Nijenhuis,
    // operators
    OpD, OpDelta, OpDeltaRev, OpEps, OpInterior, OpLie, OpNabla, OpComm, OpAcomm, OpCompose,
    // any sort
    Add, Sub, Neg, Scale,
  };

  Kind kind;
  Sort sort;
  /// Form or vec degree, or the degree shift of an operator.
  int degree = 0;
  /// Form and vec nodes.
  int depth = 0;
  /// Operator nodes: orders pulled from the input and from own parameters.
  int in_depth = 0;
  int own_depth = 0;
  std::vector<OpPtr> args;
  double number = 0.0;
  std::string name;
  std::shared_ptr<const FormField> form;
  std::shared_ptr<const VecFormField> vec;

  bool is_form() const { return sort == Sort::Form; }
  bool is_vec() const { return sort == Sort::Vec; }
  bool is_op() const { return sort == Sort::Op; }
};

/// Builders. Each validates sorts and degrees (TypeError / DegreeError).
namespace ops {

OpPtr form(std::string name, FormField f);
OpPtr vec(std::string name, VecFormField f);
OpPtr number(double c);
OpPtr identity();
OpPtr zero_form(int k);
OpPtr zero_vec(int k);

OpPtr d(OpPtr f);
OpPtr delta(OpPtr f);
/// Codifferential with the frame built in descending coordinate order.
OpPtr delta_rev(OpPtr f);
OpPtr wedge(OpPtr a, OpPtr b);  // form ^ form, or form ^ vec
OpPtr interior(OpPtr v, OpPtr f);
OpPtr lie(OpPtr v, OpPtr f);
OpPtr nabla(OpPtr v, OpPtr f);
OpPtr trace(OpPtr v);
OpPtr flat(OpPtr v);
OpPtr apply(OpPtr op, OpPtr f);

OpPtr sharp(OpPtr f);
/// omega^nabla = sum_t (nabla_{X_t} omega) ^ X_t.
OpPtr nabla_form(OpPtr f);
/// omega-diamond by one of the three equivalent formulas.
OpPtr diamond(OpPtr f, int variant = 0);
OpPtr d_nabla(OpPtr v);
/// phi o psi for an endomorphism phi; for operators, A o B.
OpPtr compose(OpPtr a, OpPtr b);
/// (L_xi g)^# for a vector field xi.
OpPtr lie_metric(OpPtr v, LieMetricForm form = LieMetricForm::Standard);
/// sum over (2, p)-shuffles of R(Y1, Y2) phi(...).
OpPtr curvature_wedge(OpPtr v);
OpPtr nijenhuis(OpPtr v);

OpPtr op_d();
OpPtr op_delta();
OpPtr op_delta_rev();
OpPtr op_eps(OpPtr f);
OpPtr op_interior(OpPtr v);
OpPtr op_lie(OpPtr v);
OpPtr op_nabla(OpPtr v);
OpPtr comm(OpPtr a, OpPtr b);
OpPtr acomm(OpPtr a, OpPtr b);

OpPtr add(OpPtr a, OpPtr b);
OpPtr sub(OpPtr a, OpPtr b);
OpPtr neg(OpPtr a);
OpPtr scale(double c, OpPtr a);

}  // namespace ops

/// Lazy, memoizing evaluation of OpExprs at one chart point. Results of a node
/// are cached per order; a request at a lower order truncates a cached higher
/// one. Not thread-safe; use one instance per point.
class Evaluator {
 public:
  explicit Evaluator(ChartPoint& cp);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  ChartPoint& point() { return *cp_; }

  /// Jets of a form node at the given order. Throws JetCapExceeded when
  /// order + depth exceeds the chart point's jet cap.
  const JetForm& form(const OpPtr& e, int order = 0);
  const JetVecForm& vec(const OpPtr& e, int order = 0);

  AltValue form_value(const OpPtr& e);
  VecAltValue vec_value(const OpPtr& e);

  struct FormSrc;
  struct VecSrc;

 private:
  std::shared_ptr<FormSrc> fsrc(const OpPtr& e);
  std::shared_ptr<VecSrc> vsrc(const OpPtr& e);
  std::shared_ptr<FormSrc> applied(const OpPtr& op, const std::shared_ptr<FormSrc>& in);

  ChartPoint* cp_;
  std::map<const OpExpr*, std::shared_ptr<FormSrc>> forms_;
  std::map<const OpExpr*, std::shared_ptr<VecSrc>> vecs_;
  std::map<std::pair<const OpExpr*, const FormSrc*>, std::shared_ptr<FormSrc>> applied_;
  std::vector<OpPtr> keep_;  // nodes created internally, kept alive for the memo keys
};

AltValue to_value(const JetForm& w);
VecAltValue to_value(const JetVecForm& w);

// ---------------------------------------------------------------------------
// Point-level helpers, evaluated at jet order 0 with the default jet cap.

AltValue ext_d(const FormField& w, const Geometry& g, std::span<const double> p);
AltValue nabla_form(std::span<const double> x, const FormField& w, const Geometry& g, std::span<const double> p);
AltValue codiff(const FormField& w, const Geometry& g, std::span<const double> p,
                FrameOrder how = FrameOrder::Ascending);
VecAltValue d_nabla(const VecFormField& phi, const Geometry& g, std::span<const double> p);
AltValue lie_vec(const VecFormField& phi, const FormField& w, const Geometry& g, std::span<const double> p);
AltValue nabla_vec(const VecFormField& phi, const FormField& w, const Geometry& g, std::span<const double> p);
VecAltValue sharp_field(const FormField& w, const Geometry& g, std::span<const double> p);
VecAltValue omega_nabla(const FormField& w, const Geometry& g, std::span<const double> p);
VecAltValue omega_diamond(const FormField& w, const Geometry& g, std::span<const double> p, int variant);
AltValue graded_comm(const OpPtr& a, const OpPtr& b, const FormField& input, const Geometry& g,
                     std::span<const double> p, bool anti);
VecAltValue nijenhuis(const VecFormField& t, const Geometry& g, std::span<const double> p);

/// Frolicher-Nijenhuis decomposition D = L_phi + i_psi of a derivation at a
/// point. phi^c = D(x^c); psi^c = D(dx^c) - (-1)^p d(phi^c). The Leibniz rule
/// is checked on sampled products first (NotADerivation) and the result is
/// verified on a random 2-form (ReconstructionMismatch), both to rel tol 1e-8.
struct FnDecomposition {
  VecAltValue phi;
  VecAltValue psi;
};
FnDecomposition fn_decompose(Evaluator& ev, const OpPtr& D);
FnDecomposition fn_decompose(const OpPtr& D, const Geometry& g, std::span<const double> p);

}  // namespace excal

#include "excal/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "excal/splitmix.hpp"

namespace excal {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Form: return "form";
    case Sort::Vec: return "vec";
    case Sort::Op: return "operator";
  }
  return "?";
}

namespace {

using K = OpExpr::Kind;

int parity_sign(int e) { return (e & 1) ? -1 : 1; }

void expect(const OpPtr& e, Sort s, const char* where) {
  if (!e) throw TypeError(std::string(where) + ": missing argument");
  if (e->sort != s) {
    throw TypeError(std::string(where) + ": expected a " + sort_name(s) + ", got a " + sort_name(e->sort));
  }
}

void expect_degree(const OpPtr& e, int k, const char* where) {
  if (e->degree != k) {
    throw DegreeError(std::string(where) + ": expected degree " + std::to_string(k) + ", got " +
                      std::to_string(e->degree));
  }
}

OpPtr make(OpExpr n) { return std::make_shared<const OpExpr>(std::move(n)); }

OpExpr node(K kind, Sort sort, int degree, std::vector<OpPtr> args = {}) {
  OpExpr n;
  n.kind = kind;
  n.sort = sort;
  n.degree = degree;
  n.args = std::move(args);
  return n;
}

OpPtr form_node(K kind, int degree, int depth, std::vector<OpPtr> args) {
  OpExpr n = node(kind, Sort::Form, degree, std::move(args));
  n.depth = depth;
  return make(std::move(n));
}

OpPtr vec_node(K kind, int degree, int depth, std::vector<OpPtr> args) {
  OpExpr n = node(kind, Sort::Vec, degree, std::move(args));
  n.depth = depth;
  return make(std::move(n));
}

OpPtr op_node(K kind, int shift, int in, int own, std::vector<OpPtr> args) {
  OpExpr n = node(kind, Sort::Op, shift, std::move(args));
  n.in_depth = in;
  n.own_depth = own;
  return make(std::move(n));
}

}  // namespace

namespace ops {

OpPtr form(std::string name, FormField f) {
  OpExpr n = node(K::FormLeaf, Sort::Form, f.degree);
  n.name = std::move(name);
  n.form = std::make_shared<const FormField>(std::move(f));
  return make(std::move(n));
}

OpPtr vec(std::string name, VecFormField f) {
  OpExpr n = node(K::VecLeaf, Sort::Vec, f.degree);
  n.name = std::move(name);
  n.vec = std::make_shared<const VecFormField>(std::move(f));
  return make(std::move(n));
}

OpPtr number(double c) {
  OpExpr n = node(K::Number, Sort::Form, 0);
  n.number = c;
  return make(std::move(n));
}

OpPtr identity() { return vec_node(K::Identity, 1, 0, {}); }
OpPtr zero_form(int k) { return form_node(K::ZeroForm, k, 0, {}); }
OpPtr zero_vec(int k) { return vec_node(K::ZeroVec, k, 0, {}); }

OpPtr d(OpPtr f) {
  expect(f, Sort::Form, "d");
  return form_node(K::D, f->degree + 1, f->depth + 1, {f});
}

OpPtr delta(OpPtr f) {
  expect(f, Sort::Form, "delta");
  return form_node(K::Delta, f->degree - 1, std::max(f->depth + 1, 1), {f});
}

OpPtr delta_rev(OpPtr f) {
  expect(f, Sort::Form, "delta_rev");
  return form_node(K::DeltaRev, f->degree - 1, std::max(f->depth + 1, 1), {f});
}

OpPtr wedge(OpPtr a, OpPtr b) {
  expect(a, Sort::Form, "wedge");
  if (b && b->is_vec()) return vec_node(K::WedgeVec, a->degree + b->degree, std::max(a->depth, b->depth), {a, b});
  expect(b, Sort::Form, "wedge");
  return form_node(K::Wedge, a->degree + b->degree, std::max(a->depth, b->depth), {a, b});
}

OpPtr interior(OpPtr v, OpPtr f) {
  expect(v, Sort::Vec, "i");
  expect(f, Sort::Form, "i");
  return form_node(K::Interior, v->degree + f->degree - 1, std::max(v->depth, f->depth), {v, f});
}

OpPtr lie(OpPtr v, OpPtr f) { return apply(op_lie(std::move(v)), std::move(f)); }
OpPtr nabla(OpPtr v, OpPtr f) { return apply(op_nabla(std::move(v)), std::move(f)); }

OpPtr trace(OpPtr v) {
  expect(v, Sort::Vec, "tr");
  if (v->degree < 1) throw DegreeError("tr: the trace of a vector field (degree 0) is undefined");
  return form_node(K::Trace, v->degree - 1, v->depth, {v});
}

OpPtr flat(OpPtr v) {
  expect(v, Sort::Vec, "flat");
  expect_degree(v, 0, "flat");
  return form_node(K::Flat, 1, v->depth, {v});
}

OpPtr apply(OpPtr op, OpPtr f) {
  expect(op, Sort::Op, "apply");
  expect(f, Sort::Form, "apply");
  return form_node(K::Apply, op->degree + f->degree, std::max(op->own_depth, op->in_depth + f->depth), {op, f});
}

OpPtr sharp(OpPtr f) {
  expect(f, Sort::Form, "sharp");
  if (f->degree < 1) throw DegreeError("sharp: needs a form of degree >= 1");
  return vec_node(K::Sharp, f->degree - 1, f->depth, {f});
}

OpPtr nabla_form(OpPtr f) {
  expect(f, Sort::Form, "nablaF");
  return vec_node(K::NablaForm, f->degree, std::max(f->depth + 1, 1), {f});
}

OpPtr diamond(OpPtr f, int variant) {
  expect(f, Sort::Form, "diamond");
  if (f->degree < 1) throw DegreeError("diamond: needs a form of degree >= 1");
  switch (variant) {
    case 0: return add(d_nabla(sharp(f)), nabla_form(f));
    case 1: return add(scale(2.0, d_nabla(sharp(f))), sharp(d(f)));
    case 2: return sub(scale(2.0, nabla_form(f)), sharp(d(f)));
  }
  throw DegreeError("diamond: variant must be 0, 1 or 2");
}

OpPtr d_nabla(OpPtr v) {
  expect(v, Sort::Vec, "dnabla");
  return vec_node(K::DNabla, v->degree + 1, std::max(v->depth + 1, 1), {v});
}

OpPtr compose(OpPtr a, OpPtr b) {
  if (a && a->is_op()) {
    expect(b, Sort::Op, "comp");
    return op_node(K::OpCompose, a->degree + b->degree, a->in_depth + b->in_depth,
                   std::max(a->own_depth, a->in_depth + b->own_depth), {a, b});
  }
  expect(a, Sort::Vec, "comp");
  expect(b, Sort::Vec, "comp");
  expect_degree(a, 1, "comp");
  return vec_node(K::Compose, b->degree, std::max(a->depth, b->depth), {a, b});
}

OpPtr lie_metric(OpPtr v, LieMetricForm form) {
  expect(v, Sort::Vec, "lieg");
  expect_degree(v, 0, "lieg");
  return vec_node(form == LieMetricForm::Standard ? K::LieMetric : K::LieMetricPrinted, 1,
                  std::max(v->depth + 1, 1), {v});
}

OpPtr curvature_wedge(OpPtr v) {
  expect(v, Sort::Vec, "curv");
  return vec_node(K::CurvatureWedge, v->degree + 2, std::max(v->depth, 2), {v});
}

OpPtr nijenhuis(OpPtr v) {
  expect(v, Sort::Vec, "nijenhuis");
  expect_degree(v, 1, "nijenhuis");
  return vec_node(K::Nijenhuis, 2, v->depth + 1, {v});
}

OpPtr op_d() { return op_node(K::OpD, 1, 1, 0, {}); }
OpPtr op_delta() { return op_node(K::OpDelta, -1, 1, 1, {}); }
OpPtr op_delta_rev() { return op_node(K::OpDeltaRev, -1, 1, 1, {}); }

OpPtr op_eps(OpPtr f) {
  expect(f, Sort::Form, "eps");
  return op_node(K::OpEps, f->degree, 0, f->depth, {f});
}

OpPtr op_interior(OpPtr v) {
  expect(v, Sort::Vec, "i");
  return op_node(K::OpInterior, v->degree - 1, 0, v->depth, {v});
}

OpPtr op_lie(OpPtr v) {
  expect(v, Sort::Vec, "lie");
  return op_node(K::OpLie, v->degree, 1, v->depth + 1, {v});
}

OpPtr op_nabla(OpPtr v) {
  expect(v, Sort::Vec, "nabla");
  return op_node(K::OpNabla, v->degree, 1, std::max(v->depth + 1, 1), {v});
}

namespace {
OpPtr commutator(K kind, OpPtr a, OpPtr b, const char* where) {
  expect(a, Sort::Op, where);
  expect(b, Sort::Op, where);
  const int own = std::max({a->own_depth, a->in_depth + b->own_depth, b->own_depth, b->in_depth + a->own_depth});
  return op_node(kind, a->degree + b->degree, a->in_depth + b->in_depth, own, {a, b});
}

void expect_same(const OpPtr& a, const OpPtr& b, const char* where) {
  if (!a || !b) throw TypeError(std::string(where) + ": missing argument");
  if (a->sort != b->sort) {
    throw TypeError(std::string(where) + ": cannot combine a " + sort_name(a->sort) + " with a " +
                    sort_name(b->sort));
  }
  if (a->degree != b->degree) {
    throw DegreeError(std::string(where) + ": degrees " + std::to_string(a->degree) + " and " +
                      std::to_string(b->degree) + " differ");
  }
}

OpPtr linear(K kind, std::vector<OpPtr> args, double c = 0.0) {
  const OpPtr& a = args[0];
  OpExpr n = node(kind, a->sort, a->degree);
  n.number = c;
  for (const auto& x : args) {
    n.depth = std::max(n.depth, x->depth);
    n.in_depth = std::max(n.in_depth, x->in_depth);
    n.own_depth = std::max(n.own_depth, x->own_depth);
  }
  n.args = std::move(args);
  return make(std::move(n));
}
}  // namespace

OpPtr comm(OpPtr a, OpPtr b) { return commutator(K::OpComm, std::move(a), std::move(b), "comm"); }
OpPtr acomm(OpPtr a, OpPtr b) { return commutator(K::OpAcomm, std::move(a), std::move(b), "acomm"); }

OpPtr add(OpPtr a, OpPtr b) {
  expect_same(a, b, "add");
  return linear(K::Add, {a, b});
}

OpPtr sub(OpPtr a, OpPtr b) {
  expect_same(a, b, "sub");
  return linear(K::Sub, {a, b});
}

OpPtr neg(OpPtr a) {
  if (!a) throw TypeError("neg: missing argument");
  return linear(K::Neg, {a});
}

OpPtr scale(double c, OpPtr a) {
  if (!a) throw TypeError("scale: missing argument");
  return linear(K::Scale, {a}, c);
}

}  // namespace ops

// ---------------------------------------------------------------------------
// Lazy sources

struct Evaluator::FormSrc {
  int degree = 0;
  std::function<JetForm(int)> compute;
  std::map<int, JetForm> memo;

  const JetForm& get(int m) {
    auto it = memo.lower_bound(m);
    if (it != memo.end()) {
      if (it->first == m) return it->second;
      return memo.emplace(m, truncate(it->second, m)).first->second;
    }
    JetForm v = compute(m);
    return memo.emplace(m, std::move(v)).first->second;
  }
};

struct Evaluator::VecSrc {
  int degree = 0;
  std::function<JetVecForm(int)> compute;
  std::map<int, JetVecForm> memo;

  const JetVecForm& get(int m) {
    auto it = memo.lower_bound(m);
    if (it != memo.end()) {
      if (it->first == m) return it->second;
      return memo.emplace(m, truncate(it->second, m)).first->second;
    }
    JetVecForm v = compute(m);
    return memo.emplace(m, std::move(v)).first->second;
  }
};

namespace {

using FS = std::shared_ptr<Evaluator::FormSrc>;
using VS = std::shared_ptr<Evaluator::VecSrc>;

FS fsource(int degree, std::function<JetForm(int)> f) {
  auto s = std::make_shared<Evaluator::FormSrc>();
  s->degree = degree;
  s->compute = std::move(f);
  return s;
}

VS vsource(int degree, std::function<JetVecForm(int)> f) {
  auto s = std::make_shared<Evaluator::VecSrc>();
  s->degree = degree;
  s->compute = std::move(f);
  return s;
}

FS src_d(const FS& in) {
  return fsource(in->degree + 1, [in](int m) { return ext_d(in->get(m + 1)); });
}

FS src_delta(ChartPoint* cp, const FS& in, FrameOrder how) {
  return fsource(in->degree - 1, [cp, in, how](int m) {
    const JetForm& w = in->get(m + 1);
    if (w.degree() == 0 || w.empty()) return JetForm(cp->dim(), w.degree() - 1, cp->zero(m));
    return codiff(w, cp->frame(m, how), cp->christoffel(m));
  });
}

FS src_wedge(const FS& a, const FS& b) {
  return fsource(a->degree + b->degree, [a, b](int m) { return wedge(a->get(m), b->get(m)); });
}

FS src_interior(const VS& v, const FS& f) {
  return fsource(v->degree + f->degree - 1, [v, f](int m) { return interior(v->get(m), f->get(m)); });
}

FS src_lin(std::vector<std::pair<double, FS>> terms) {
  const int degree = terms[0].second->degree;
  return fsource(degree, [terms](int m) {
    JetForm out = terms[0].second->get(m) * terms[0].first;
    for (std::size_t i = 1; i < terms.size(); ++i) out += terms[i].second->get(m) * terms[i].first;
    return out;
  });
}

VS vsrc_lin(std::vector<std::pair<double, VS>> terms) {
  const int degree = terms[0].second->degree;
  return vsource(degree, [terms](int m) {
    JetVecForm out = terms[0].second->get(m) * terms[0].first;
    for (std::size_t i = 1; i < terms.size(); ++i) out += terms[i].second->get(m) * terms[i].first;
    return out;
  });
}

VS vsrc_dnabla(ChartPoint* cp, const VS& v) {
  return vsource(v->degree + 1, [cp, v](int m) { return d_nabla(v->get(m + 1), cp->christoffel(m)); });
}

/// L_V = i_V d - (-1)^{p-1} d i_V
FS src_lie(const VS& v, const FS& in) {
  FS a = src_interior(v, src_d(in));
  FS b = src_d(src_interior(v, in));
  return src_lin({{1.0, a}, {-parity_sign(v->degree - 1), b}});
}

std::vector<std::pair<double, FS>> lin_terms(const OpExpr& e, std::vector<FS> xs) {
  switch (e.kind) {
    case K::Add: return {{1.0, xs[0]}, {1.0, xs[1]}};
    case K::Sub: return {{1.0, xs[0]}, {-1.0, xs[1]}};
    case K::Neg: return {{-1.0, xs[0]}};
    case K::Scale: return {{e.number, xs[0]}};
    default: break;
  }
  throw TypeError("not a linear combination");
}

std::vector<std::pair<double, VS>> lin_terms(const OpExpr& e, std::vector<VS> xs) {
  switch (e.kind) {
    case K::Add: return {{1.0, xs[0]}, {1.0, xs[1]}};
    case K::Sub: return {{1.0, xs[0]}, {-1.0, xs[1]}};
    case K::Neg: return {{-1.0, xs[0]}};
    case K::Scale: return {{e.number, xs[0]}};
    default: break;
  }
  throw TypeError("not a linear combination");
}

}  // namespace

Evaluator::Evaluator(ChartPoint& cp) : cp_(&cp) {}
Evaluator::~Evaluator() = default;

const JetForm& Evaluator::form(const OpPtr& e, int order) {
  expect(e, Sort::Form, "evaluate");
  if (order + e->depth > cp_->jet_cap()) {
    throw JetCapExceeded("evaluating at order " + std::to_string(order) + " needs derivative depth " +
                         std::to_string(order + e->depth) + " beyond the jet cap " +
                         std::to_string(cp_->jet_cap()));
  }
  return fsrc(e)->get(order);
}

const JetVecForm& Evaluator::vec(const OpPtr& e, int order) {
  expect(e, Sort::Vec, "evaluate");
  if (order + e->depth > cp_->jet_cap()) {
    throw JetCapExceeded("evaluating at order " + std::to_string(order) + " needs derivative depth " +
                         std::to_string(order + e->depth) + " beyond the jet cap " +
                         std::to_string(cp_->jet_cap()));
  }
  return vsrc(e)->get(order);
}

AltValue Evaluator::form_value(const OpPtr& e) { return to_value(form(e, 0)); }
VecAltValue Evaluator::vec_value(const OpPtr& e) { return to_value(vec(e, 0)); }

std::shared_ptr<Evaluator::FormSrc> Evaluator::fsrc(const OpPtr& e) {
  if (auto it = forms_.find(e.get()); it != forms_.end()) return it->second;
  ChartPoint* cp = cp_;
  const int n = cp->dim();
  FS s;
  switch (e->kind) {
    case K::FormLeaf: {
      if (e->form->dim != n) throw ShapeMismatch("form '" + e->name + "' has the wrong dimension");
      auto f = e->form;
      s = fsource(e->degree, [cp, f](int m) { return cp->form(*f, m); });
      break;
    }
    case K::Number: {
      const double c = e->number;
      s = fsource(0, [cp, n, c](int m) {
        JetForm out(n, 0, cp->zero(m));
        out[0] = cp->constant(c, m);
        return out;
      });
      break;
    }
    case K::ZeroForm: {
      const int k = e->degree;
      s = fsource(k, [cp, n, k](int m) { return JetForm(n, k, cp->zero(m)); });
      break;
    }
    case K::D: s = src_d(fsrc(e->args[0])); break;
    case K::Delta: s = src_delta(cp, fsrc(e->args[0]), FrameOrder::Ascending); break;
    case K::DeltaRev: s = src_delta(cp, fsrc(e->args[0]), FrameOrder::Descending); break;
    case K::Wedge: s = src_wedge(fsrc(e->args[0]), fsrc(e->args[1])); break;
    case K::Interior: s = src_interior(vsrc(e->args[0]), fsrc(e->args[1])); break;
    case K::Trace: {
      VS v = vsrc(e->args[0]);
      s = fsource(e->degree, [v](int m) { return trace(v->get(m)); });
      break;
    }
    case K::Flat: {
      VS v = vsrc(e->args[0]);
      s = fsource(1, [cp, v](int m) { return flat(v->get(m), cp->metric(m)); });
      break;
    }
    case K::Apply: s = applied(e->args[0], fsrc(e->args[1])); break;
    case K::Add:
    case K::Sub:
    case K::Neg:
    case K::Scale: {
      std::vector<FS> xs;
      for (const auto& a : e->args) xs.push_back(fsrc(a));
      s = src_lin(lin_terms(*e, std::move(xs)));
      break;
    }
    default: throw TypeError("node is not a form");
  }
  keep_.push_back(e);
  forms_.emplace(e.get(), s);
  return s;
}

std::shared_ptr<Evaluator::VecSrc> Evaluator::vsrc(const OpPtr& e) {
  if (auto it = vecs_.find(e.get()); it != vecs_.end()) return it->second;
  ChartPoint* cp = cp_;
  const int n = cp->dim();
  VS s;
  switch (e->kind) {
    case K::VecLeaf: {
      if (e->vec->dim != n) throw ShapeMismatch("field '" + e->name + "' has the wrong dimension");
      auto f = e->vec;
      s = vsource(e->degree, [cp, f](int m) { return cp->vec_form(*f, m); });
      break;
    }
    case K::Identity:
      s = vsource(1, [cp, n](int m) { return identity_endomorphism(n, cp->zero(m), cp->constant(1.0, m)); });
      break;
    case K::ZeroVec: {
      const int k = e->degree;
      s = vsource(k, [cp, n, k](int m) { return JetVecForm(n, k, cp->zero(m)); });
      break;
    }
    case K::Sharp: {
      FS f = fsrc(e->args[0]);
      s = vsource(e->degree, [cp, f](int m) {
        return sharp(f->get(m), std::span<const Jet>(cp->metric_inv(m)));
      });
      break;
    }
    case K::NablaForm: {
      FS f = fsrc(e->args[0]);
      s = vsource(e->degree, [cp, f](int m) {
        return omega_nabla(f->get(m + 1), cp->christoffel(m), cp->metric_inv(m));
      });
      break;
    }
    case K::DNabla: s = vsrc_dnabla(cp, vsrc(e->args[0])); break;
    case K::WedgeVec: {
      FS f = fsrc(e->args[0]);
      VS v = vsrc(e->args[1]);
      s = vsource(e->degree, [f, v](int m) { return wedge(f->get(m), v->get(m)); });
      break;
    }
    case K::Compose: {
      VS a = vsrc(e->args[0]);
      VS b = vsrc(e->args[1]);
      s = vsource(e->degree, [a, b](int m) { return compose(a->get(m), b->get(m)); });
      break;
    }
    case K::LieMetric:
    case K::LieMetricPrinted: {
      VS v = vsrc(e->args[0]);
      const LieMetricForm form = e->kind == K::LieMetric ? LieMetricForm::Standard : LieMetricForm::Printed;
      s = vsource(1, [cp, v, form](int m) {
        return lie_metric_sharp(v->get(m + 1), cp->metric(m), cp->metric_inv(m), cp->christoffel(m), form);
      });
      break;
    }
    case K::CurvatureWedge: {
      VS v = vsrc(e->args[0]);
      s = vsource(e->degree, [cp, v](int m) { return curvature_wedge(v->get(m), cp->curvature(m)); });
      break;
    }
    case K::Nijenhuis: {
      VS v = vsrc(e->args[0]);
      s = vsource(2, [v](int m) { return nijenhuis(v->get(m + 1)); });
      break;
    }
    case K::Add:
    case K::Sub:
    case K::Neg:
    case K::Scale: {
      std::vector<VS> xs;
      for (const auto& a : e->args) xs.push_back(vsrc(a));
      s = vsrc_lin(lin_terms(*e, std::move(xs)));
      break;
    }
    default: throw TypeError("node is not a vector-valued form");
  }
  keep_.push_back(e);
  vecs_.emplace(e.get(), s);
  return s;
}

std::shared_ptr<Evaluator::FormSrc> Evaluator::applied(const OpPtr& op, const std::shared_ptr<FormSrc>& in) {
  const auto key = std::make_pair(op.get(), in.get());
  if (auto it = applied_.find(key); it != applied_.end()) return it->second;
  ChartPoint* cp = cp_;
  FS s;
  switch (op->kind) {
    case K::OpD: s = src_d(in); break;
    case K::OpDelta: s = src_delta(cp, in, FrameOrder::Ascending); break;
    case K::OpDeltaRev: s = src_delta(cp, in, FrameOrder::Descending); break;
    case K::OpEps: s = src_wedge(fsrc(op->args[0]), in); break;
    case K::OpInterior: s = src_interior(vsrc(op->args[0]), in); break;
    case K::OpLie: s = src_lie(vsrc(op->args[0]), in); break;
    case K::OpNabla: {
      VS v = vsrc(op->args[0]);
      FS lie = src_lie(v, in);
      FS i = src_interior(vsrc_dnabla(cp, v), in);
      s = src_lin({{1.0, lie}, {-parity_sign(v->degree), i}});
      break;
    }
    case K::OpComm:
    case K::OpAcomm: {
      const OpPtr& A = op->args[0];
      const OpPtr& B = op->args[1];
      FS ab = applied(A, applied(B, in));
      FS ba = applied(B, applied(A, in));
      const double sign = op->kind == K::OpAcomm ? 1.0 : -parity_sign(A->degree * B->degree);
      s = src_lin({{1.0, ab}, {sign, ba}});
      break;
    }
    case K::OpCompose: s = applied(op->args[0], applied(op->args[1], in)); break;
    case K::Add:
    case K::Sub:
    case K::Neg:
    case K::Scale: {
      std::vector<FS> xs;
      for (const auto& a : op->args) xs.push_back(applied(a, in));
      s = src_lin(lin_terms(*op, std::move(xs)));
      break;
    }
    default: throw TypeError("node is not an operator");
  }
  keep_.push_back(op);
  applied_.emplace(key, s);
  return s;
}

AltValue to_value(const JetForm& w) {
  return w.map([](const Jet& j) { return j.value(); });
}

VecAltValue to_value(const JetVecForm& w) {
  return w.map([](const Jet& j) { return j.value(); });
}

// ---------------------------------------------------------------------------
// Point-level helpers

namespace {

template <class F>
auto at_point(const Geometry& g, std::span<const double> p, F&& f) {
  ChartPoint cp(g, std::vector<double>(p.begin(), p.end()));
  Evaluator ev(cp);
  return f(ev);
}

}  // namespace

AltValue ext_d(const FormField& w, const Geometry& g, std::span<const double> p) {
  return at_point(g, p, [&](Evaluator& ev) { return ev.form_value(ops::d(ops::form("w", w))); });
}

AltValue nabla_form(std::span<const double> x, const FormField& w, const Geometry& g, std::span<const double> p) {
  if (static_cast<int>(x.size()) != g.dim) throw ShapeMismatch("direction has the wrong dimension");
  ChartPoint cp(g, std::vector<double>(p.begin(), p.end()));
  const JetForm& wj = cp.form(w, 1);
  const auto& gamma = cp.christoffel(0);
  AltValue out(g.dim, w.degree, 0.0);
  for (int a = 0; a < g.dim; ++a) {
    if (x[a] != 0.0) out += to_value(cov_deriv(a, wj, gamma)) * x[a];
  }
  return out;
}

AltValue codiff(const FormField& w, const Geometry& g, std::span<const double> p, FrameOrder how) {
  return at_point(g, p, [&](Evaluator& ev) {
    auto f = ops::form("w", w);
    return ev.form_value(how == FrameOrder::Ascending ? ops::delta(f) : ops::delta_rev(f));
  });
}

VecAltValue d_nabla(const VecFormField& phi, const Geometry& g, std::span<const double> p) {
  return at_point(g, p, [&](Evaluator& ev) { return ev.vec_value(ops::d_nabla(ops::vec("phi", phi))); });
}

AltValue lie_vec(const VecFormField& phi, const FormField& w, const Geometry& g, std::span<const double> p) {
  return at_point(g, p,
                  [&](Evaluator& ev) { return ev.form_value(ops::lie(ops::vec("phi", phi), ops::form("w", w))); });
}

AltValue nabla_vec(const VecFormField& phi, const FormField& w, const Geometry& g, std::span<const double> p) {
  return at_point(
      g, p, [&](Evaluator& ev) { return ev.form_value(ops::nabla(ops::vec("phi", phi), ops::form("w", w))); });
}

VecAltValue sharp_field(const FormField& w, const Geometry& g, std::span<const double> p) {
  return at_point(g, p, [&](Evaluator& ev) { return ev.vec_value(ops::sharp(ops::form("w", w))); });
}

VecAltValue omega_nabla(const FormField& w, const Geometry& g, std::span<const double> p) {
  return at_point(g, p, [&](Evaluator& ev) { return ev.vec_value(ops::nabla_form(ops::form("w", w))); });
}

VecAltValue omega_diamond(const FormField& w, const Geometry& g, std::span<const double> p, int variant) {
  return at_point(g, p, [&](Evaluator& ev) { return ev.vec_value(ops::diamond(ops::form("w", w), variant)); });
}

AltValue graded_comm(const OpPtr& a, const OpPtr& b, const FormField& input, const Geometry& g,
                     std::span<const double> p, bool anti) {
  return at_point(g, p, [&](Evaluator& ev) {
    auto op = anti ? ops::acomm(a, b) : ops::comm(a, b);
    return ev.form_value(ops::apply(op, ops::form("input", input)));
  });
}

VecAltValue nijenhuis(const VecFormField& t, const Geometry& g, std::span<const double> p) {
  return at_point(g, p, [&](Evaluator& ev) { return ev.vec_value(ops::nijenhuis(ops::vec("T", t))); });
}

// ---------------------------------------------------------------------------
// Frolicher-Nijenhuis decomposition

namespace {

/// Quadratic polynomial coefficients, fixed seed: deterministic probes.
FormField probe_form(const Geometry& g, int k, SplitMix64& rng) {
  const int n = g.dim;
  FormField f(n, k);
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

double max_abs(const AltValue& a) {
  double s = 0.0;
  for (double v : a.coeffs()) s = std::max(s, std::abs(v));
  return s;
}

/// Largest |a - b| relative to max(|a|, |b|, 1).
double rel_err(const AltValue& a, const AltValue& b) {
  const double scale = std::max({max_abs(a), max_abs(b), 1.0});
  return max_abs(a - b) / scale;
}

constexpr double kFnTol = 1e-8;

}  // namespace

FnDecomposition fn_decompose(Evaluator& ev, const OpPtr& D) {
  expect(D, Sort::Op, "fn_decompose");
  ChartPoint& cp = ev.point();
  const Geometry& g = cp.geometry();
  const int n = g.dim;
  const int p = D->degree;
  const int needed = 1 + std::max(D->own_depth, D->in_depth);
  if (needed > cp.jet_cap()) {
    throw JetCapExceeded("decomposition needs derivative depth " + std::to_string(needed) +
                         " beyond the jet cap " + std::to_string(cp.jet_cap()));
  }

  SplitMix64 rng(fnv1a("fn_decompose"));
  {
    auto f = ops::form("f", probe_form(g, 0, rng));
    auto a = ops::form("alpha", probe_form(g, 1, rng));
    auto b = ops::form("beta", probe_form(g, 1, rng));
    auto Dx = [&](const OpPtr& x) { return ops::apply(D, x); };
    const std::pair<OpPtr, OpPtr> products[] = {
        {Dx(ops::wedge(f, a)), ops::add(ops::wedge(Dx(f), a), ops::wedge(f, Dx(a)))},
        {Dx(ops::wedge(a, b)), ops::add(ops::wedge(Dx(a), b), ops::scale(parity_sign(p), ops::wedge(a, Dx(b))))},
    };
    for (const auto& [lhs, rhs] : products) {
      const double err = rel_err(ev.form_value(lhs), ev.form_value(rhs));
      if (err > kFnTol) {
        throw NotADerivation("Leibniz rule fails on a sampled product (relative error " + std::to_string(err) + ")");
      }
    }
  }

  std::vector<JetForm> phi1;
  std::vector<AltValue> psi;
  for (int c = 0; c < n; ++c) {
    FormField xc(n, 0);
    xc.coeffs[0] = Expr::variable(c, g.coords[c]);
    FormField dxc(n, 1);
    dxc.coeffs[IndexMask{1} << c] = Expr::number(1.0);
    const JetForm& ph = ev.form(ops::apply(D, ops::form(g.coords[c], xc)), 1);
    JetForm ps = ev.form(ops::apply(D, ops::form("d" + g.coords[c], dxc)), 0);
    if (!ps.empty()) ps -= ext_d(ph) * parity_sign(p);
    phi1.push_back(ph);
    psi.push_back(to_value(ps));
  }
  JetVecForm phi_jet(phi1);
  FnDecomposition out{to_value(phi_jet), VecAltValue(std::move(psi))};

  // D = L_phi + i_psi on a probe form.
  auto gamma = ops::form("gamma", probe_form(g, std::min(2, n), rng));
  const AltValue lhs = ev.form_value(ops::apply(D, gamma));
  const JetForm& g1 = ev.form(gamma, 1);
  const JetForm g0 = truncate(g1, 0);
  const JetVecForm phi0 = truncate(phi_jet, 0);
  JetForm lie = interior(phi0, ext_d(g1));
  lie -= ext_d(interior(phi_jet, g1)) * parity_sign(p - 1);
  const AltValue rhs = to_value(lie) + interior(out.psi, to_value(g0));
  const double err = rel_err(lhs, rhs);
  if (err > kFnTol) {
    throw ReconstructionMismatch("L_phi + i_psi differs from D on a probe form (relative error " +
                                 std::to_string(err) + ")");
  }
  return out;
}

FnDecomposition fn_decompose(const OpPtr& D, const Geometry& g, std::span<const double> p) {
  return at_point(g, p, [&](Evaluator& ev) { return fn_decompose(ev, D); });
}

}  // namespace excal

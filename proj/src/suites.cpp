// Built-in verification suites.
//
// Every check compares an operator composition against a closed form built
// from separately evaluated ingredients. Random inputs are quadratic
// polynomials (trigonometric on the torus); seeds derive from the run seed and
// the check id, so a check samples the same data whatever else runs.

#include <algorithm>
#include <cmath>
#include <map>

#include "excal/catalog.hpp"
#include "excal/errors.hpp"
#include "excal/splitmix.hpp"
#include "excal/verifier.hpp"

namespace excal {

namespace {

const std::vector<std::string> kMain = {"euclidean(3)",   "sphere2",     "flat_kahler(1)",   "flat_kahler(2)",
                                        "hopf_lck",       "sasakian_s3", "flat_cokahler(1)", "flat_cokahler(2)"};

std::vector<std::string> structural_geometries() {
  auto out = kMain;
  out.insert(out.begin() + 1, "flat_torus(2)");
  return out;
}

int dim_of(const std::string& geom) { return builtin(geom)->geometry.dim; }

std::string sgn(int e) { return (e % 2 == 0) ? "1" : "-1"; }
std::string num(int v) { return std::to_string(v); }

struct In {
  std::string name;
  Sort sort;
  int degree;
  int max_poly_degree = 2;
};

In F(std::string name, int k) { return {std::move(name), Sort::Form, k}; }
In V(std::string name, int k) { return {std::move(name), Sort::Vec, k}; }

class Builder {
 public:
  Builder(std::string suite, const SuiteOptions& opts, std::vector<IdentityCheck>& out)
      : suite_(std::move(suite)), opts_(opts), out_(out) {}

  IdentityCheck& add(const std::string& geom, const std::string& tag, std::string lhs, std::string rhs,
                     const std::vector<In>& inputs = {}) {
    IdentityCheck c;
    c.id = suite_ + "/" + geom + (tag.empty() ? "" : "/" + tag);
    c.geometry = geom;
    SplitMix64 s(opts_.seed ^ fnv1a(c.id.c_str()));
    c.point_seed = s.next();
    const FormKind kind = geom.rfind("flat_torus", 0) == 0 ? FormKind::Trig : FormKind::Poly;
    for (const In& in : inputs) {
      InputSpec spec;
      spec.name = in.name;
      spec.sort = in.sort;
      spec.degree = in.degree;
      spec.seed = s.next();
      spec.kind = in.max_poly_degree == 0 ? FormKind::Poly : kind;
      spec.max_poly_degree = in.max_poly_degree;
      c.inputs.push_back(spec);
    }
    c.lhs = std::move(lhs);
    c.rhs = std::move(rhs);
    out_.push_back(std::move(c));
    return out_.back();
  }

 private:
  std::string suite_;
  const SuiteOptions& opts_;
  std::vector<IdentityCheck>& out_;
};

std::string tag(std::initializer_list<std::pair<const char*, int>> parts) {
  std::string s;
  for (const auto& [name, k] : parts) s += name + std::to_string(k);
  return s;
}

// ---------------------------------------------------------------------------
// Algebraic identities

void fn_contraction(Builder& b) {
  // tr(w ^ P) = (-1)^k w ^ tr(P) + (-1)^{(k+1)p} i_P w
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 0; k <= n; ++k) {
      for (int p = 1; p + k <= n; ++p) {
        b.add(g, tag({{"w", k}, {"P", p}}), "tr(wedge(w, P))",
              "add(scale(" + sgn(k) + ", wedge(w, tr(P))), scale(" + sgn((k + 1) * p) + ", i(P, w)))",
              {F("w", k), V("P", p)});
      }
    }
  }
}

void omegaiphi(Builder& b) {
  // w ^ i_P b = i_{w ^ P} b
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 1; k <= n; ++k) {
      for (int p = 0; p + k <= n; ++p) {
        for (int q = 0; q <= n; ++q) {
          if (q + p - 1 < 0 || q + p + k - 1 > n) continue;
          b.add(g, tag({{"w", k}, {"P", p}, {"b", q}}), "wedge(w, i(P, b))", "i(wedgev(w, P), b)",
                {F("w", k), V("P", p), F("b", q)});
        }
      }
    }
  }
}

void lie_wedge(Builder& b) {
  // w ^ L_P b = L_{w ^ P} b - (-1)^{p+k} i_{dw ^ P} b
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 0; k <= n; ++k) {
      for (int p = 0; p + k <= n; ++p) {
        for (int q = 0; q <= n; ++q) {
          if (q + p + k > n) continue;
          std::string rhs = "lie(wedgev(w, P), b)";
          if (k + p + 1 <= n) rhs = "sub(" + rhs + ", scale(" + sgn(p + k) + ", i(wedgev(d(w), P), b)))";
          b.add(g, tag({{"w", k}, {"P", p}, {"b", q}}), "wedge(w, lie(P, b))", rhs,
                {F("w", k), V("P", p), F("b", q)});
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Differential identities

void dsquared(Builder& b) {
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 0; k + 2 <= n; ++k) b.add(g, tag({{"w", k}}), "d(d(w))", "zero(" + num(k + 2) + ")", {F("w", k)});
  }
}

void deltasquared(Builder& b) {
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 2; k <= n; ++k) {
      b.add(g, tag({{"w", k}}), "delta(delta(w))", "zero(" + num(k - 2) + ")", {F("w", k)});
    }
  }
}

void frame_independence(Builder& b) {
  // Gram-Schmidt in ascending versus descending coordinate order.
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 1; k <= n; ++k) b.add(g, tag({{"w", k}}), "delta(w)", "delta_rev(w)", {F("w", k)});
  }
}

void curvature_dnabla2(Builder& b) {
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int p = 0; p + 2 <= n; ++p) b.add(g, tag({{"P", p}}), "dnabla(dnabla(P))", "curv(P)", {V("P", p)});
  }
}

void omegacov(Builder& b) {
  // d^nabla(w#) + (dw)# = w^nabla
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 1; k <= n; ++k) {
      const std::string lhs = k < n ? "add(dnabla(sharp(w)), sharp(d(w)))" : "dnabla(sharp(w))";
      b.add(g, tag({{"w", k}}), lhs, "nablaF(w)", {F("w", k)});
    }
  }
}

void diamond_consistency(Builder& b) {
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 1; k <= n; ++k) {
      for (auto [x, y] : {std::pair{0, 1}, {1, 2}, {0, 2}}) {
        b.add(g, tag({{"w", k}}) + "/v" + num(x) + "v" + num(y), "diamond" + num(x) + "(w)",
              "diamond" + num(y) + "(w)", {F("w", k)});
      }
    }
  }
}

void delta_trace(Builder& b) {
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 1; k <= n; ++k) {
      b.add(g, tag({{"w", k}}) + "/diamond", "scale(-0.5, tr(diamond(w)))", "delta(w)", {F("w", k)});
      b.add(g, tag({{"w", k}}) + "/nabla", "tr(nablaF(w))", "neg(delta(w))", {F("w", k)});
      if (k >= 2) b.add(g, tag({{"w", k}}) + "/sharp", "tr(sharp(w))", "zero(" + num(k - 2) + ")", {F("w", k)});
    }
  }
}

void omegacovphi(Builder& b) {
  // w ^ nabla_P b = nabla_{w ^ P} b
  for (const auto& g : structural_geometries()) {
    const int n = dim_of(g);
    for (int k = 1; k <= n; ++k) {
      for (int p = 0; p + k + 1 <= n; ++p) {
        for (int q = 0; q + p + k <= n; ++q) {
          b.add(g, "covphi/" + tag({{"w", k}, {"P", p}, {"b", q}}), "wedge(w, nabla(P, b))", "nabla(wedgev(w, P), b)",
                {F("w", k), V("P", p), F("b", q)});
        }
      }
    }
  }
}

// The structural suite groups w ^ nabla_P = nabla_{w ^ P} with omegacov.
void omegacov_all(Builder& b) {
  omegacov(b);
  omegacovphi(b);
}

// ---------------------------------------------------------------------------
// The commutator [delta, eps_w]

void main_form(Builder& b, bool lie_form) {
  for (const auto& g : kMain) {
    const int n = dim_of(g);
    for (int p = 1; p <= std::min(3, n); ++p) {
      for (int q = 0; q <= n; ++q) {
        const std::string rhs =
            lie_form ? "add(wedge(delta(w), b), neg(lie(sharp(w), b)), scale(" + sgn(p + 1) + ", i(diamond(w), b)))"
                     : "add(wedge(delta(w), b), neg(nabla(sharp(w), b)), scale(" + sgn(p + 1) +
                           ", i(nablaF(w), b)))";
        b.add(g, tag({{"w", p}, {"b", q}}), "comm(delta, eps(w), b)", rhs, {F("w", p), F("b", q)});
      }
    }
  }
}

// Rotation about the x3 axis.
OpPtr euclidean_rotation() {
  return ops::vec("K",
                  VecFormField::vector({-Expr::variable(1, "x2"), Expr::variable(0, "x1"), Expr::number(0)}));
}

void goldberg(Builder& b) {
  const std::string lhs = "add(acomm(delta, eps(flat(X)), b), lie(X, b))";
  const std::string rhs = "add(wedge(delta(flat(X)), b), i(lieg(X), b))";
  for (const std::string g : {"euclidean(3)", "sphere2"}) {
    const int n = dim_of(g);
    for (int q = 0; q <= n; ++q) b.add(g, tag({{"b", q}}), lhs, rhs, {V("X", 0), F("b", q)});
    b.add(g, "eta-diamond", "diamond(flat(X))", "lieg(X)", {V("X", 0)});
    // The metric term as printed, g(nabla_Y xi, Z) + g(xi, nabla_Z xi), does not
    // close the identity for a generic field.
    auto& printed = b.add(g, "printed-liexi", lhs, "add(wedge(delta(flat(X)), b), i(lieg_printed(X), b))",
                          {V("X", 0), F("b", 1)});
    printed.expected_fail = true;
  }
  // Killing witnesses: rotations.
  const std::vector<std::pair<std::string, OpPtr>> killing = {{"euclidean(3)", euclidean_rotation()},
                                                              {"sphere2", nullptr}};
  for (const auto& [g, k] : killing) {
    const int n = dim_of(g);
    auto bind = [&, k = k](IdentityCheck& c) {
      if (k) c.bindings.push_back({"K", k});
    };
    const std::string K = k ? "K" : "xi";
    for (int q = 0; q <= n; ++q) {
      std::string l = lhs, r = rhs;
      for (auto* s : {&l, &r}) {
        for (std::size_t pos; (pos = s->find('X')) != std::string::npos;) s->replace(pos, 1, K);
      }
      bind(b.add(g, "killing/" + tag({{"b", q}}), l, r, {F("b", q)}));
    }
    bind(b.add(g, "killing/delta-eta", "delta(flat(" + K + "))", "zero(0)"));
    bind(b.add(g, "killing/lieg", "lieg(" + K + ")", "zerov(1)"));
  }
}

void fn_decompose_roundtrip(Builder& b) {
  for (auto [p, label] : {std::pair{1, "P1Q2"}, {2, "P2Q3"}}) {
    for (int i = 1; i <= 10; ++i) {
      auto& c = b.add("euclidean(3)", std::string(label) + "/" + num(i), "", "", {V("P", p), V("Q", p + 1)});
      c.tol = {1e-9, 0.0};
      c.native = [](const OpEnv& env) -> NativeSides {
        OpPtr P = *env.find("P"), Q = *env.find("Q");
        OpPtr D = ops::add(ops::op_lie(P), ops::op_interior(Q));
        return [P, Q, D](Evaluator& ev) {
          FnDecomposition fd = fn_decompose(ev, D);
          std::vector<double> got = flatten(fd.phi), want = flatten(ev.vec_value(P));
          auto g2 = flatten(fd.psi), w2 = flatten(ev.vec_value(Q));
          got.insert(got.end(), g2.begin(), g2.end());
          want.insert(want.end(), w2.begin(), w2.end());
          return SidePair{got, want};
        };
      };
    }
  }
}

void parallel_anticommute(Builder& b) {
  const std::string residual = "add(comm(delta, eps(w), b), lie(sharp(w), b))";
  auto zero_for = [](int p, int q) { return "zero(" + num(p + q - 1) + ")"; };
  // Constant-coefficient forms are parallel on flat charts.
  for (const std::string g : {"euclidean(3)", "flat_torus(2)"}) {
    const int n = dim_of(g);
    for (int p = 2; p <= n; ++p) {
      for (int q = 0; q <= n; ++q) {
        In w = F("w", p);
        w.max_poly_degree = 0;
        b.add(g, tag({{"w", p}, {"b", q}}), residual, zero_for(p, q), {w, F("b", q)});
      }
    }
  }
  // Fundamental forms of the flat Kahler and co-Kahler entries.
  for (const std::string g : {"flat_kahler(1)", "flat_kahler(2)", "flat_cokahler(1)", "flat_cokahler(2)"}) {
    const int n = dim_of(g);
    const std::string w = g.rfind("flat_kahler", 0) == 0 ? "Omega" : "Phi";
    std::string r = residual;
    for (std::size_t pos; (pos = r.find("(w)")) != std::string::npos;) r.replace(pos, 3, "(" + w + ")");
    for (int q = 0; q <= n; ++q) b.add(g, w + "/" + tag({{"b", q}}), r, zero_for(2, q), {F("b", q)});
  }
}

void killing_anticommute(Builder& b) {
  for (const auto& [g, k] : std::vector<std::pair<std::string, OpPtr>>{{"euclidean(3)", euclidean_rotation()},
                                                                       {"sphere2", nullptr}}) {
    const int n = dim_of(g);
    const std::string K = k ? "K" : "xi";
    for (int q = 0; q <= n; ++q) {
      auto& c = b.add(g, tag({{"b", q}}), "add(comm(delta, eps(flat(" + K + ")), b), lie(" + K + ", b))",
                      "zero(" + num(q) + ")", {F("b", q)});
      if (k) c.bindings.push_back({"K", k});
    }
  }
}

void killing_negative(Builder& b) {
  // d/dtheta on the sphere moves along meridians and stretches the parallels.
  auto& c = b.add("sphere2", "d-theta", "add(comm(delta, eps(flat(K)), b), lie(K, b))", "zero(1)", {F("b", 1)});
  c.bindings.push_back({"K", ops::vec("K", VecFormField::vector({Expr::number(1), Expr::number(0)}))});
  c.expected_fail = true;
}

void parallel_negative(Builder& b) {
  // dx^dy + x dy^dz: closed, but its coefficients are not constant.
  FormField w(3, 2);
  const int xy[] = {0, 1}, yz[] = {1, 2};
  w.set(xy, Expr::number(1));
  w.set(yz, Expr::variable(0, "x1"));
  auto& c = b.add("euclidean(3)", "dxdy-plus-x-dydz", "add(comm(delta, eps(w), b), lie(sharp(w), b))", "zero(2)",
                  {F("b", 1)});
  c.bindings.push_back({"w", ops::form("w", w)});
  c.expected_fail = true;
}

// ---------------------------------------------------------------------------
// Special geometries

void kahler(Builder& b) {
  for (const std::string g : {"flat_kahler(1)", "flat_kahler(2)"}) {
    const int n = dim_of(g);
    for (int q = 0; q <= n; ++q) {
      b.add(g, tag({{"b", q}}), "comm(delta, eps(Omega), b)", "neg(lie(J, b))", {F("b", q)});
    }
  }
}

void lck(Builder& b) {
  // [delta, eps_Omega] b = (q - n) eta ^ b - L_J b + Omega ^ i_{theta#} b, n = 1.
  const std::string g = "hopf_lck";
  for (int q = 0; q <= 4; ++q) {
    std::string rhs = "add(scale(" + num(q - 1) + ", wedge(eta, b)), neg(lie(J, b))";
    if (q >= 1) rhs += ", wedge(Omega, i(sharp(theta), b))";
    rhs += ")";
    b.add(g, tag({{"b", q}}), "comm(delta, eps(Omega), b)", rhs, {F("b", q)});
  }
}

void lck_constants(Builder& b) {
  const std::string g = "hopf_lck";
  b.add(g, "tr-eta-id", "tr(wedgev(eta, Id))", "scale(-3, eta)");
  b.add(g, "tr-theta-J", "tr(wedgev(theta, J))", "eta");
  b.add(g, "delta-Omega", "delta(Omega)", "neg(eta)");
  b.add(g, "Omega-diamond", "diamond(Omega)", "sub(neg(wedgev(eta, Id)), wedgev(Omega, sharp(theta)))");
}

const char* kA = "A := neg(comp(phi, dnabla(xi))); ";

void quasi_sasakian(Builder& b) {
  // [delta, eps_Phi] = -Tr(A) eps_eta - L_phi + 2 eps_eta i_A
  for (const std::string g : {"sasakian_s3", "flat_cokahler(1)", "flat_cokahler(2)"}) {
    const int n = dim_of(g);
    for (int q = 0; q <= n; ++q) {
      b.add(g, tag({{"b", q}}), "comm(delta, eps(Phi), b)",
            std::string(kA) + "add(neg(wedge(tr(A), wedge(eta, b))), neg(lie(phi, b)), scale(2, wedge(eta, i(A, b))))",
            {F("b", q)});
    }
  }
}

void sasakian(Builder& b) {
  // [delta, eps_Phi] = 2n eps_eta - L_phi - 2 eps_eta i_Id, n = 1.
  const std::string g = "sasakian_s3";
  for (int q = 0; q <= 3; ++q) {
    b.add(g, tag({{"b", q}}), "comm(delta, eps(Phi), b)",
          "add(scale(2, wedge(eta, b)), neg(lie(phi, b)), scale(-2, wedge(eta, i(Id, b))))", {F("b", q)});
  }
}

void sasakian_constants(Builder& b) {
  const std::string g = "sasakian_s3";
  b.add(g, "A", std::string(kA) + "A", "add(neg(Id), wedgev(eta, xi))");
  b.add(g, "trace-A", std::string(kA) + "tr(A)", "-2");
  b.add(g, "delta-Phi", "delta(Phi)", std::string(kA) + "neg(wedge(tr(A), eta))");
  b.add(g, "delta-Phi-value", "delta(Phi)", "scale(2, eta)");
  b.add(g, "Phi-diamond", "diamond(Phi)", std::string(kA) + "scale(-2, wedgev(eta, A))");
}

void cokahler(Builder& b) {
  for (const std::string g : {"flat_cokahler(1)", "flat_cokahler(2)"}) {
    const int n = dim_of(g);
    for (int q = 0; q <= n; ++q) {
      b.add(g, tag({{"b", q}}), "comm(delta, eps(Phi), b)", "neg(lie(phi, b))", {F("b", q)});
    }
  }
}

void kanemaki(Builder& b) {
  const std::string g = "sasakian_s3";
  // (nabla_a phi)(d_c) = eta(d_c) A d_a - g(A d_a, d_c) xi, all a, c.
  auto& rel = b.add(g, "nabla-phi", "", "");
  rel.native = [](const OpEnv& env) -> NativeSides {
    OpPtr phi = *env.find("phi"), xi = *env.find("xi"), eta = *env.find("eta");
    OpPtr A = parse_op(std::string(kA) + "A", env);
    return [phi, xi, eta, A](Evaluator& ev) {
      ChartPoint& cp = ev.point();
      const int n = cp.dim();
      const auto& gamma = cp.christoffel(0);
      const auto& gm = cp.metric(0);
      const JetVecForm& P = ev.vec(phi, 1);
      const VecAltValue Av = ev.vec_value(A);
      const VecAltValue xv = ev.vec_value(xi);
      const AltValue ev_eta = ev.form_value(eta);
      auto a_of = [&](int b, int c) { return Av[b].at(IndexMask(1) << c); };  // A^b_c
      std::vector<double> lhs, rhs;
      for (int a = 0; a < n; ++a) {
        const VecAltValue nab = to_value(cov_deriv(a, P, gamma));
        for (int c = 0; c < n; ++c) {
          double gac = 0;
          for (int d = 0; d < n; ++d) gac += gm[d * n + c].value() * a_of(d, a);
          for (int bb = 0; bb < n; ++bb) {
            lhs.push_back(nab[bb].at(IndexMask(1) << c));
            rhs.push_back(ev_eta.at(IndexMask(1) << c) * a_of(bb, a) - gac * xv[bb].at(0));
          }
        }
      }
      return SidePair{lhs, rhs};
    };
  };
  // g(A d_a, d_c) = g(d_a, A d_c).
  auto& sym = b.add(g, "A-symmetric", "", "");
  sym.native = [](const OpEnv& env) -> NativeSides {
    OpPtr A = parse_op(std::string(kA) + "A", env);
    return [A](Evaluator& ev) {
      ChartPoint& cp = ev.point();
      const int n = cp.dim();
      const auto& gm = cp.metric(0);
      const VecAltValue Av = ev.vec_value(A);
      std::vector<double> lhs, rhs;
      for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) {
          double l = 0, r = 0;
          for (int d = 0; d < n; ++d) {
            l += gm[d * n + c].value() * Av[d].at(IndexMask(1) << a);
            r += gm[a * n + d].value() * Av[d].at(IndexMask(1) << c);
          }
          lhs.push_back(l);
          rhs.push_back(r);
        }
      }
      return SidePair{lhs, rhs};
    };
  };
  b.add(g, "dnabla-phi", "dnabla(phi)", std::string(kA) + "neg(wedgev(eta, A))");
}

using SuiteFn = void (*)(Builder&, const SuiteOptions&);

template <void (*F)(Builder&)>
void plain(Builder& b, const SuiteOptions&) {
  F(b);
}

template <bool LieForm>
void main_suite(Builder& b, const SuiteOptions&) {
  main_form(b, LieForm);
}

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"fn-contraction", plain<fn_contraction>},
      {"omegaiphi", plain<omegaiphi>},
      {"lie-wedge", plain<lie_wedge>},
      {"dsquared", plain<dsquared>},
      {"deltasquared", plain<deltasquared>},
      {"frame-independence", plain<frame_independence>},
      {"curvature-dnabla2", plain<curvature_dnabla2>},
      {"omegacov", plain<omegacov_all>},
      {"diamond-consistency", plain<diamond_consistency>},
      {"delta-trace", plain<delta_trace>},
      {"main-covariant", main_suite<false>},
      {"main-lie", main_suite<true>},
      {"goldberg", plain<goldberg>},
      {"fn-decompose-roundtrip", plain<fn_decompose_roundtrip>},
      {"parallel-anticommute", plain<parallel_anticommute>},
      {"killing-anticommute", plain<killing_anticommute>},
      {"killing-negative", plain<killing_negative>},
      {"parallel-negative", plain<parallel_negative>},
      {"kahler", plain<kahler>},
      {"lck", plain<lck>},
      {"lck-constants", plain<lck_constants>},
      {"quasi-sasakian", plain<quasi_sasakian>},
      {"sasakian", plain<sasakian>},
      {"sasakian-constants", plain<sasakian_constants>},
      {"cokahler", plain<cokahler>},
      {"kanemaki", plain<kanemaki>},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<IdentityCheck> suite_checks(const std::vector<std::string>& names, const SuiteOptions& opts) {
  std::vector<std::string> wanted;
  for (const auto& n : names) {
    if (n == "all") {
      wanted.insert(wanted.end(), suite_names().begin(), suite_names().end());
      continue;
    }
    const auto& all = suite_names();
    if (std::find(all.begin(), all.end(), n) == all.end()) throw UnknownSuite("unknown suite '" + n + "'");
    wanted.push_back(n);
  }
  std::vector<IdentityCheck> out;
  for (const auto& n : wanted) {
    for (const auto& [name, fn] : registry()) {
      if (name != n) continue;
      Builder b(name, opts, out);
      fn(b, opts);
    }
  }
  for (auto& c : out) apply_options(c, opts);
  return out;
}

}  // namespace excal

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "excal/errors.hpp"
#include "excal/oplang.hpp"
#include "excal/operators.hpp"
#include "support/fixtures.hpp"

using namespace excal;
using namespace excal::testing;

namespace {

struct At {
  ChartPoint cp;
  Evaluator ev;
  OpEnv env;
  At(const Geometry& g, std::vector<double> p) : cp(g, std::move(p)), ev(cp) {}

  AltValue form(const std::string& text) { return ev.form_value(parse_op(text, env)); }
  VecAltValue vec(const std::string& text) { return ev.vec_value(parse_op(text, env)); }
  void bind(const std::string& name, const FormField& f) { env.bind(name, ops::form(name, f)); }
  void bind(const std::string& name, const VecFormField& f) { env.bind(name, ops::vec(name, f)); }
};

const double kTol = 1e-10;

VecFormField endo(const Geometry& g, const std::vector<std::vector<std::string>>& m) {
  std::vector<std::vector<Expr>> e;
  for (const auto& r : m) {
    e.emplace_back();
    for (const auto& s : r) e.back().push_back(parse_expr(s, g.coords));
  }
  return VecFormField::endomorphism(e);
}

VecFormField vector_field(const Geometry& g, const std::vector<std::string>& v) {
  std::vector<Expr> e;
  for (const auto& s : v) e.push_back(parse_expr(s, g.coords));
  return VecFormField::vector(e);
}

}  // namespace

TEST_CASE("exterior derivative examples") {
  Geometry g = flat_chart(2);
  CHECK(ext_d(form_of(g, 1, {{"2", "x"}}), g, std::vector<double>{0.3, 0.7}).at(IndexMask{3}) == 1.0);

  AltValue df = ext_d(form_of(g, 0, {{"", "x^2*y"}}), g, std::vector<double>{1, 2});
  CHECK(df[0] == doctest::Approx(4));
  CHECK(df[1] == doctest::Approx(1));

  AltValue dc = ext_d(form_of(g, 1, {{"1", "3"}, {"2", "-2"}}), g, std::vector<double>{0.1, 0.2});
  CHECK(dc[0] == 0.0);
}

TEST_CASE("covariant derivative examples") {
  Geometry g = flat_chart(2);
  std::vector<double> ex{1, 0};
  AltValue v = nabla_form(ex, form_of(g, 1, {{"2", "x"}}), g, std::vector<double>{0.4, -0.2});
  CHECK(v[0] == doctest::Approx(0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(1));

  AltValue c = nabla_form(ex, form_of(g, 2, {{"1,2", "5"}}), g, std::vector<double>{0.4, -0.2});
  CHECK(c[0] == 0.0);

  Geometry s = sphere_chart();
  AltValue w = nabla_form(ex, form_of(s, 1, {{"2", "1"}}), s, std::vector<double>{1.0, 2.0});
  CHECK(w[0] == doctest::Approx(0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(-std::cos(1.0) / std::sin(1.0)).epsilon(1e-13));
}

TEST_CASE("codifferential examples") {
  Geometry g = flat_chart(1);
  AltValue v = codiff(form_of(g, 1, {{"1", "x^2"}}), g, std::vector<double>{3});
  CHECK(v[0] == doctest::Approx(-6).epsilon(1e-14));

  Geometry f3 = flat_chart(3);
  AltValue c = codiff(form_of(f3, 2, {{"1,2", "2"}, {"2,3", "-1"}}), f3, std::vector<double>{0.1, 0.2, 0.3});
  CHECK(max_abs(c) == 0.0);

  // Flat divergence oracle: delta(sum f_i dx^i) = -sum d_i f_i.
  AltValue dv = codiff(form_of(f3, 1, {{"1", "x*y"}, {"2", "y^2*z"}, {"3", "sin(z)"}}), f3,
                       std::vector<double>{0.5, -1, 2});
  CHECK(dv[0] == doctest::Approx(-(-1.0 + 2 * -1.0 * 2.0 + std::cos(2.0))).epsilon(1e-13));

  // Sphere: delta(f dtheta) = -(1/sin) d_theta(sin f); f = theta gives -(1 + theta cot theta).
  Geometry s = sphere_chart();
  AltValue ds = codiff(form_of(s, 1, {{"1", "theta"}}), s, std::vector<double>{1.2, 0.5});
  CHECK(ds[0] == doctest::Approx(-(1 + 1.2 * std::cos(1.2) / std::sin(1.2))).epsilon(1e-13));

  // Degree 0: the empty zero of degree -1.
  CHECK(codiff(form_of(s, 0, {{"", "theta"}}), s, std::vector<double>{1.2, 0.5}).empty());
}

TEST_CASE("d_nabla examples") {
  Geometry g = flat_chart(2);
  VecAltValue v = d_nabla(vector_field(g, {"0", "x"}), g, std::vector<double>{0.3, 0.1});
  CHECK(v[0][0] == 0.0);
  CHECK(v[0][1] == 0.0);
  CHECK(v[1].at(IndexMask{1}) == doctest::Approx(1));
  CHECK(v[1].at(IndexMask{2}) == 0.0);

  VecAltValue c = d_nabla(endo(g, {{"1", "2"}, {"-3", "4"}}), g, std::vector<double>{0.3, 0.1});
  CHECK(max_abs(c[0]) + max_abs(c[1]) == 0.0);

  Geometry s = sphere_chart();
  At at(s, {0.9, 1.3});
  VecAltValue id = at.vec("dnabla(Id)");
  CHECK(max_abs(id[0]) < kTol);
  CHECK(max_abs(id[1]) < kTol);
}

TEST_CASE("Lie derivative examples") {
  Geometry g = flat_chart(2);
  std::vector<double> p{0.6, -0.4};
  AltValue a = lie_vec(vector_field(g, {"1", "0"}), form_of(g, 1, {{"2", "x"}}), g, p);
  CHECK(a[0] == doctest::Approx(0).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(1));

  AltValue b = lie_vec(endo(g, {{"0", "-1"}, {"1", "0"}}), form_of(g, 0, {{"", "x"}}), g, p);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(-1));

  // L_Id = d on forms of every degree.
  Geometry w = warped_chart();
  SplitMix64 rng(11);
  At at(w, {0.2, -0.3, 0.5});
  for (int k = 0; k <= 3; ++k) {
    at.bind("w" + std::to_string(k), poly_form(w, k, rng));
    const std::string name = "w" + std::to_string(k);
    AltValue l = at.form("lie(Id, " + name + ")");
    AltValue d = at.form("d(" + name + ")");
    CHECK(max_diff(l, d) < kTol);
  }
}

TEST_CASE("covariant derivative along tangent-valued forms") {
  Geometry w = warped_chart();
  SplitMix64 rng(12);
  At at(w, {0.1, 0.4, -0.2});
  at.bind("X", poly_vec(w, 0, rng));
  at.bind("b", poly_form(w, 2, rng));
  at.bind("o", poly_form(w, 1, rng));
  at.bind("P", poly_vec(w, 1, rng));

  // nabla_X as a tangent-valued 0-form equals the directional covariant derivative.
  std::vector<double> x = flatten(at.vec("X"));
  AltValue direct = nabla_form(x, *at.env.find("b")->get()->form, w, at.cp.point());
  CHECK(max_diff(at.form("nabla(X, b)"), direct) < kTol);

  // omega ^ nabla_phi = nabla_{omega ^ phi}
  CHECK(max_diff(at.form("wedge(o, nabla(P, b))"), at.form("nabla(wedgev(o, P), b)")) < kTol);

  Geometry f = flat_chart(2);
  At c(f, {0.1, 0.2});
  c.bind("P", endo(f, {{"1", "2"}, {"3", "4"}}));
  c.bind("b", form_of(f, 1, {{"1", "2"}, {"2", "-1"}}));
  CHECK(max_abs(c.form("nabla(P, b)")) == 0.0);
}

TEST_CASE("sharp, omega-nabla and diamond") {
  Geometry g = flat_chart(4);
  FormField Omega = form_of(g, 2, {{"1,2", "-1"}, {"3,4", "-1"}});
  VecAltValue J = sharp_field(Omega, g, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  // J d1 = d2, J d3 = d4.
  CHECK(J[1].at(IndexMask{1}) == 1.0);
  CHECK(J[0].at(IndexMask{2}) == -1.0);
  CHECK(J[3].at(IndexMask{4}) == 1.0);
  CHECK(J[2].at(IndexMask{8}) == -1.0);
  CHECK(J[0].at(IndexMask{1}) == 0.0);

  VecAltValue on = omega_nabla(Omega, g, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  for (int b = 0; b < 4; ++b) CHECK(max_abs(on[b]) == 0.0);
  for (int v = 0; v < 3; ++v) {
    VecAltValue dm = omega_diamond(Omega, g, std::vector<double>{0.1, 0.2, 0.3, 0.4}, v);
    for (int b = 0; b < 4; ++b) CHECK(max_abs(dm[b]) == 0.0);
  }

  Geometry s = sphere_chart();
  SplitMix64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    At at(s, {rng.uniform(0.5, 2.5), rng.uniform(0.5, 5.5)});
    at.bind("w", poly_form(s, 1, rng));
    at.bind("u", poly_form(s, 2, rng));
    for (const char* w : {"w", "u"}) {
      const std::string W = w;
      CHECK(max_diff(at.form("tr(nablaF(" + W + "))"), at.form("neg(delta(" + W + "))")) < kTol);
      VecAltValue d0 = at.vec("diamond0(" + W + ")");
      CHECK(max_diff(d0, at.vec("diamond1(" + W + ")")) < kTol);
      CHECK(max_diff(d0, at.vec("diamond2(" + W + ")")) < kTol);
      CHECK(max_diff(at.form("delta(" + W + ")"), at.form("scale(-0.5, tr(diamond(" + W + ")))")) < kTol);
    }
  }
}

TEST_CASE("graded commutators") {
  Geometry w = warped_chart();
  SplitMix64 rng(14);
  At at(w, {-0.3, 0.2, 0.6});
  at.bind("b", poly_form(w, 1, rng));
  CHECK(max_abs(at.form("comm(d, d, b)")) < kTol);
  CHECK(max_diff(at.form("comm(d, d, b)"), at.form("scale(2, d(d(b)))")) < kTol);

  Geometry f = flat_chart(3);
  At c(f, {0.1, 0.2, 0.3});
  c.bind("w", form_of(f, 2, {{"1,2", "1"}, {"1,3", "2"}}));
  c.bind("b", form_of(f, 1, {{"1", "0.5"}, {"3", "-1"}}));
  CHECK(max_abs(c.form("comm(delta, eps(w), b)")) == 0.0);

  Geometry k = flat_chart(4);
  At kh(k, {0.3, -0.1, 0.4, 0.2});
  kh.bind("Omega", form_of(k, 2, {{"1,2", "-1"}, {"3,4", "-1"}}));
  kh.bind("J", endo(k, {{"0", "-1", "0", "0"}, {"1", "0", "0", "0"}, {"0", "0", "0", "-1"}, {"0", "0", "1", "0"}}));
  for (int deg = 0; deg <= 4; ++deg) {
    kh.bind("b" + std::to_string(deg), poly_form(k, deg, rng));
    const std::string b = "b" + std::to_string(deg);
    AltValue lhs = kh.form("comm(delta, eps(Omega), " + b + ")");
    AltValue rhs = kh.form("neg(lie(J, " + b + "))");
    CHECK(max_diff(lhs, rhs) < kTol);
  }

  // Explicit-formula check with the point-level helper.
  AltValue direct = graded_comm(ops::op_d(), ops::op_d(), poly_form(w, 2, rng), w, std::vector<double>{0.1, 0.1, 0.1},
                                true);
  CHECK(max_abs(direct) < kTol);
}

TEST_CASE("d squared and delta squared vanish") {
  SplitMix64 rng(15);
  for (const Geometry& g : {sphere_chart(), warped_chart()}) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> p;
      for (const auto& iv : g.domain) p.push_back(rng.uniform(iv.lo + 0.1 * (iv.hi - iv.lo), iv.hi - 0.1 * (iv.hi - iv.lo)));
      At at(g, p);
      for (int k = 0; k <= g.dim; ++k) {
        const std::string b = "b" + std::to_string(k);
        at.bind(b, poly_form(g, k, rng));
        AltValue dd = at.form("d(d(" + b + "))");
        AltValue ee = at.form("delta(delta(" + b + "))");
        CHECK(max_abs(dd) < kTol);
        CHECK(max_abs(ee) < 1e-9);
        CHECK(max_diff(at.form("delta(" + b + ")"), at.form("delta_rev(" + b + ")")) < kTol);
      }
    }
  }
}

TEST_CASE("Nijenhuis torsion") {
  Geometry g = flat_chart(2);
  VecAltValue n = nijenhuis(endo(g, {{"0", "-1"}, {"1", "0"}}), g, std::vector<double>{0.2, 0.3});
  CHECK(max_abs(n[0]) + max_abs(n[1]) == 0.0);

  // T = x d_y (x) dx + ... ; hand value for T = [[0, x], [0, 0]] (T d_y = x d_x):
  // N(d_x, d_y) = [T d_x, T d_y] - T[T d_x, d_y] - T[d_x, T d_y] = -T(d_x) = 0.
  VecAltValue m = nijenhuis(endo(g, {{"0", "x"}, {"0", "0"}}), g, std::vector<double>{0.2, 0.3});
  CHECK(max_abs(m[0]) + max_abs(m[1]) == 0.0);

  // T = [[y, 0], [0, 0]] (T d_x = y d_x): N(d_x, d_y) = -T[T d_x, d_y] = -T(-d_x) = y d_x.
  VecAltValue r = nijenhuis(endo(g, {{"y", "0"}, {"0", "0"}}), g, std::vector<double>{0.2, 0.3});
  CHECK(r[0][0] == doctest::Approx(0.3));
  CHECK(r[1][0] == 0.0);
}

TEST_CASE("Frolicher-Nijenhuis decomposition") {
  Geometry w = warped_chart();
  SplitMix64 rng(16);
  std::vector<double> p{0.2, 0.1, -0.4};
  ChartPoint cp(w, p);
  Evaluator ev(cp);

  VecFormField X = poly_vec(w, 0, rng);
  auto Xn = ops::vec("X", X);
  FnDecomposition lx = fn_decompose(ev, ops::op_lie(Xn));
  CHECK(max_diff(lx.phi, ev.vec_value(Xn)) < kTol);
  CHECK(max_diff(lx.psi, VecAltValue(3, 1, 0.0)) < kTol);

  auto Psi = ops::vec("Psi", poly_vec(w, 2, rng));
  FnDecomposition ip = fn_decompose(ev, ops::op_interior(Psi));
  CHECK(max_diff(ip.phi, VecAltValue(3, 1, 0.0)) < kTol);
  CHECK(max_diff(ip.psi, ev.vec_value(Psi)) < kTol);

  for (int deg = 1; deg <= 3; ++deg) {
    auto om = ops::form("w", poly_form(w, deg, rng));
    auto D = ops::sub(ops::comm(ops::op_delta(), ops::op_eps(om)), ops::op_eps(ops::delta(om)));
    FnDecomposition fd = fn_decompose(ev, D);
    VecAltValue sh = ev.vec_value(ops::sharp(om));
    VecAltValue dm = ev.vec_value(ops::diamond(om));
    CHECK(max_diff(fd.phi, sh * -1.0) < 1e-9);
    CHECK(max_diff(fd.psi, dm * (deg % 2 ? 1.0 : -1.0)) < 1e-9);
  }

  CHECK_THROWS_AS(fn_decompose(ev, ops::op_delta()), NotADerivation);
}

TEST_CASE("jet cap is enforced before evaluation") {
  Geometry g = flat_chart(2);
  At at(g, {0.1, 0.2});
  at.bind("b", form_of(g, 0, {{"", "x^5"}}));
  CHECK(max_abs(at.form("d(d(d(d(b))))")) == 0.0);
  CHECK_THROWS_AS(at.form("delta(delta(delta(delta(delta(b)))))"), JetCapExceeded);
  OpPtr deep = parse_op("comm(delta, comm(delta, comm(delta, comm(delta, d))), b)", at.env);
  CHECK(deep->depth == 5);
  CHECK_THROWS_AS(at.ev.form_value(deep), JetCapExceeded);
}

TEST_CASE("lower orders are truncations of higher ones") {
  Geometry s = sphere_chart();
  SplitMix64 rng(17);
  At at(s, {1.1, 0.7});
  at.bind("w", poly_form(s, 1, rng));
  OpPtr e = parse_op("delta(wedge(w, d(w)))", at.env);
  const JetForm hi = at.ev.form(e, 2);
  Evaluator fresh(at.cp);
  const JetForm lo = fresh.form(e, 0);
  REQUIRE(hi.size() == lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) CHECK(hi[i].value() == doctest::Approx(lo[i].value()).epsilon(1e-14));
}

TEST_CASE("operator language") {
  Geometry g = flat_chart(3);
  OpEnv env;
  env.bind("w", ops::form("w", form_of(g, 2, {{"1,2", "x"}})));
  env.bind("b", ops::form("b", form_of(g, 1, {{"3", "y"}})));
  env.bind("V", ops::vec("V", VecFormField(3, 1)));

  OpPtr e = parse_op("comm(delta, eps(w), b)", env);
  CHECK(e->sort == Sort::Form);
  CHECK(e->degree == 2);
  CHECK(e->depth == 1);
  CHECK(parse_op("delta", env)->degree == -1);
  CHECK(parse_op("lie(V)", env)->degree == 1);
  CHECK(parse_op("i(V)", env)->degree == 0);
  CHECK(parse_op("sharp(w)", env)->degree == 1);
  CHECK(parse_op("A := eps(w); comm(A, d, b)", env)->degree == 4);
  CHECK(parse_op("scale(-0.5, b)", env)->number == -0.5);

  CHECK_THROWS_AS(parse_op("add(w, b)", env), DegreeError);
  CHECK_THROWS_AS(parse_op("sharp(V)", env), TypeError);
  CHECK_THROWS_AS(parse_op("tr(sharp(b))", env), DegreeError);
  CHECK_THROWS_AS(parse_op("lie(b, w)", env), TypeError);
  CHECK_THROWS_AS(parse_op("comm(d, b)", env), TypeError);
  CHECK_THROWS_AS(parse_op("i(V, w, b)", env), ArityError);
  CHECK_THROWS_AS(parse_op("eps", env), ArityError);
  CHECK_THROWS_AS(parse_op("w(b)", env), TypeError);
  CHECK_THROWS_AS(parse_op("d := w; d", env), SyntaxError);
  CHECK_THROWS_AS(env.bind("delta", ops::number(1)), ConfigError);
  try {
    parse_op("wedge(w, q)", env);
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& err) {
    CHECK(std::string(err.what()).find("(bytes 9..10)") != std::string::npos);
  }
  try {
    parse_op("d(w,", env);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& err) {
    CHECK(err.offset() == 4);
  }
  try {
    parse_op("d(w) x", env);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& err) {
    CHECK(err.offset() == 5);
  }

  for (const char* src : {"comm(delta, eps(w), b)", "scale(2, d(b))", "tr(wedgev(b, V))", "acomm(d, i(V))",
                          "add(b, neg(b), sub(b, b))", "diamond1(w)", "comp(V, V)", "comp(d, delta)"}) {
    OpPtr a = parse_op(src, env);
    OpPtr b = parse_op(to_string(a), env);
    CHECK(to_string(b) == to_string(a));
  }
}

TEST_CASE("environment from geometry structures") {
  Json j = {{"dim", 2},
            {"coords", {"x", "y"}},
            {"metric", rows({{"1", "0"}, {"0", "1"}})},
            {"structures", {{"J", rows({{"0", "-1"}, {"1", "0"}})}, {"xi", {"1", "0"}}, {"eta", {"1", "0"}}}},
            {"forms", {{"Omega", {{"degree", 2}, {"coeffs", {{"1,2", "-1"}}}}}}}};
  Geometry g = geometry_from_json(j);
  OpEnv env = OpEnv::from_geometry(g);
  REQUIRE(env.find("J"));
  CHECK((*env.find("J"))->degree == 1);
  CHECK((*env.find("xi"))->degree == 0);
  CHECK((*env.find("eta"))->sort == Sort::Form);
  ChartPoint cp(g, {0.1, 0.2});
  Evaluator ev(cp);
  VecAltValue diff = ev.vec_value(parse_op("sub(sharp(Omega), J)", env));
  CHECK(max_abs(diff[0]) + max_abs(diff[1]) == 0.0);
}

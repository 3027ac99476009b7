#include <cmath>
#include <numbers>

#include "doctest.h"
#include "excal/errors.hpp"
#include "excal/geometry.hpp"
#include "excal/splitmix.hpp"
#include "support/symbolic.hpp"

using namespace excal;
using excal::testing::close;

namespace {

Geometry make(const Json& j) { return geometry_from_json(j); }

// Nested initializer lists of string pairs would otherwise read as objects.
Json mat(std::initializer_list<std::initializer_list<const char*>> rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(Json(std::vector<std::string>(r.begin(), r.end())));
  return out;
}

Geometry flat(int n) {
  Json m = Json::array();
  Json coords = Json::array();
  for (int i = 0; i < n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < n; ++j) row.push_back(i == j ? "1" : "0");
    m.push_back(row);
    coords.push_back("x" + std::to_string(i + 1));
  }
  return make({{"dim", n}, {"coords", coords}, {"metric", m}});
}

Geometry hopf() {
  const char* c = "1/(x1^2+x2^2+x3^2+x4^2)";
  Json m = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 4; ++j) row.push_back(i == j ? c : "0");
    m.push_back(row);
  }
  return make({{"dim", 4},
               {"coords", {"x1", "x2", "x3", "x4"}},
               {"metric", m},
               {"domain", {{-3, 3}, {-3, 3}, {-3, 3}, {-3, 3}}},
               {"exclude", "x1^2+x2^2+x3^2+x4^2 - 0.04 > 0"}});
}

Geometry sphere2() {
  return make({{"dim", 2},
               {"coords", {"theta", "phi"}},
               {"metric", mat({{"1", "0"}, {"0", "sin(theta)^2"}})},
               {"domain", {{0.3, 2.8}, {0.1, 6.0}}}});
}

Geometry conformal2() {
  return make({{"dim", 2},
               {"coords", {"x", "y"}},
               {"metric", mat({{"exp(2*x)", "0"}, {"0", "exp(2*x)"}})}});
}

}  // namespace

TEST_CASE("metric_at") {
  Geometry e = flat(3);
  std::vector<double> p{0.1, 0.2, 0.3};
  auto mj = metric_at(e, p, 2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(mj.g[i * 3 + j].value() == (i == j));
      CHECK(mj.g[i * 3 + j].is_constant());
      CHECK(mj.g_inv[i * 3 + j].value() == (i == j));
    }
  }

  // Hopf chart at r = 2: g = 0.25 Id, d_1 g_11 = -2 x1 / r^4.
  Geometry h = hopf();
  std::vector<double> q{2, 0, 0, 0};
  auto hj = metric_at(h, q, 2);
  CHECK(hj.g[0].value() == doctest::Approx(0.25));
  CHECK(hj.g_inv[0].value() == doctest::Approx(4));
  CHECK(hj.g[5].partial({1, 0, 0, 0}) == doctest::Approx(-2.0 * 2 / 16));
  CHECK(hj.g[0].partial({0, 1, 0, 0}) == doctest::Approx(0));
  // g^{11} = r^2: d_1 = 2 x1 = 4, d_1 d_1 = 2
  CHECK(hj.g_inv[0].partial({1, 0, 0, 0}) == doctest::Approx(4));
  CHECK(hj.g_inv[0].partial({2, 0, 0, 0}) == doctest::Approx(2));
  CHECK(hj.g_inv[0].partial({0, 2, 0, 0}) == doctest::Approx(2));

  Geometry s = sphere2();
  std::vector<double> eq{std::numbers::pi / 2, 1.0};
  auto sj = metric_at(s, eq, 0);
  CHECK(sj.g[3].value() == doctest::Approx(1));
  CHECK(sj.g[1].value() == 0);

  std::vector<double> origin{0.01, 0, 0, 0};
  CHECK_THROWS_AS(metric_at(h, origin, 1), PointExcluded);
}

TEST_CASE("g times g_inv is the identity at every order") {
  Geometry g = make({{"dim", 3},
                     {"coords", {"a", "b", "c"}},
                     {"metric", mat({{"2+sin(a)", "0.3*b", "0"}, {"0.3*b", "3+a*c", "0.1"}, {"0", "0.1", "exp(b)"}})}});
  for (const auto& p : sample_points(g, 10, 4)) {
    auto mj = metric_at(g, p, 4);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Jet s = Jet(3, 4);
        for (int k = 0; k < 3; ++k) s += mj.g[i * 3 + k] * mj.g_inv[k * 3 + j];
        for (std::size_t t = 0; t < s.taylor().size(); ++t) {
          CHECK(std::abs(s.taylor()[t] - (t == 0 && i == j ? 1.0 : 0.0)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("metric validation") {
  Geometry sing = make({{"dim", 2}, {"coords", {"x", "y"}}, {"metric", mat({{"1", "1"}, {"1", "1"}})}});
  std::vector<double> p{0, 0};
  CHECK_THROWS_AS(metric_at(sing, p, 0), SingularMetric);
  Geometry indef = make({{"dim", 2}, {"coords", {"x", "y"}}, {"metric", mat({{"1", "0"}, {"0", "-1"}})}});
  CHECK_THROWS_AS(metric_at(indef, p, 0), SingularMetric);
  Geometry asym = make({{"dim", 2}, {"coords", {"x", "y"}}, {"metric", mat({{"1", "x"}, {"0", "1"}})}});
  std::vector<double> q{0.5, 0};
  CHECK_THROWS_AS(metric_at(asym, q, 0), SingularMetric);
}

TEST_CASE("Christoffel symbols") {
  Geometry e = flat(3);
  std::vector<double> p{0.1, 0.2, 0.3};
  for (const auto& c : christoffel(e, p, 1)) {
    for (double t : c.taylor()) CHECK(t == 0);
  }

  Geometry s = sphere2();
  std::vector<double> q{1.0, 2.0};
  auto G = christoffel(s, q, 0);
  // [(k * n + i) * n + j]
  CHECK(G[(0 * 2 + 1) * 2 + 1].value() == doctest::Approx(-std::sin(1.0) * std::cos(1.0)));
  CHECK(G[(1 * 2 + 0) * 2 + 1].value() == doctest::Approx(std::cos(1.0) / std::sin(1.0)));
  CHECK(G[(1 * 2 + 1) * 2 + 0].value() == doctest::Approx(std::cos(1.0) / std::sin(1.0)));
  CHECK(G[0].value() == 0);

  Geometry c = conformal2();
  std::vector<double> r{0.3, -0.2};
  auto H = christoffel(c, r, 0);
  CHECK(H[(0 * 2 + 0) * 2 + 0].value() == doctest::Approx(1));
  CHECK(H[(0 * 2 + 1) * 2 + 1].value() == doctest::Approx(-1));
  CHECK(H[(1 * 2 + 0) * 2 + 1].value() == doctest::Approx(1));
  CHECK(H[(1 * 2 + 1) * 2 + 1].value() == doctest::Approx(0));
}

TEST_CASE("metric compatibility and torsion-freeness") {
  for (Geometry g : {hopf(), sphere2(), conformal2()}) {
    const int n = g.dim;
    for (const auto& p : sample_points(g, 20, 7)) {
      ChartPoint cp(g, p);
      const auto& gm = cp.metric(2);
      const auto& G = cp.christoffel(1);
      for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            CHECK(G[(i * n + a) * n + b].taylor()[0] == G[(i * n + b) * n + a].taylor()[0]);
            // d_i g_ab = g(nabla_i d_a, d_b) + g(d_a, nabla_i d_b)
            Jet lhs = gm[a * n + b].derivative(i);
            Jet rhs(n, 1);
            for (int c = 0; c < n; ++c) {
              rhs += G[(c * n + i) * n + a] * gm[c * n + b].truncated(1);
              rhs += G[(c * n + i) * n + b] * gm[a * n + c].truncated(1);
            }
            for (std::size_t t = 0; t < lhs.taylor().size(); ++t) {
              CHECK(close(lhs.taylor()[t], rhs.taylor()[t], 1e-12, 1e-9));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("orthonormal frames") {
  Geometry e = flat(3);
  std::vector<double> p{0.1, 0.2, 0.3};
  auto F = orthonormal_frame(e, p);
  for (int t = 0; t < 3; ++t) {
    for (int a = 0; a < 3; ++a) CHECK(F[t][a] == (t == a));
  }

  Geometry d = make({{"dim", 2}, {"coords", {"x", "y"}}, {"metric", mat({{"4", "0"}, {"0", "9"}})}});
  std::vector<double> q{0, 0};
  auto D = orthonormal_frame(d, q);
  CHECK(D[0][0] == doctest::Approx(0.5));
  CHECK(D[0][1] == 0);
  CHECK(D[1][1] == doctest::Approx(1.0 / 3.0));

  Geometry h = hopf();
  std::vector<double> r{0, 2, 0, 0};
  auto H = orthonormal_frame(h, r);
  for (int t = 0; t < 4; ++t) {
    for (int a = 0; a < 4; ++a) CHECK(H[t][a] == doctest::Approx(t == a ? 2.0 : 0.0));
  }

  Geometry g = make({{"dim", 3},
                     {"coords", {"a", "b", "c"}},
                     {"metric", mat({{"2+sin(a)", "0.3*b", "0"}, {"0.3*b", "3+a*c", "0.1"}, {"0", "0.1", "exp(b)"}})}});
  for (auto how : {FrameOrder::Ascending, FrameOrder::Descending}) {
    for (const auto& pt : sample_points(g, 5, 9)) {
      ChartPoint cp(g, pt);
      const auto& X = cp.frame(2, how);
      const auto& gm = cp.metric(2);
      for (int s = 0; s < 3; ++s) {
        for (int t = 0; t < 3; ++t) {
          Jet ip(3, 2);
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) ip += gm[a * 3 + b] * X[s][a] * X[t][b];
          }
          // orthonormal to every order, not only at the point
          for (std::size_t k = 0; k < ip.taylor().size(); ++k) {
            CHECK(std::abs(ip.taylor()[k] - (k == 0 && s == t ? 1.0 : 0.0)) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("curvature") {
  std::vector<double> p{0.1, 0.2, 0.3};
  for (double r : curvature(flat(3), p)) CHECK(r == 0);

  // Round sphere: sectional curvature 1.
  Geometry s = sphere2();
  for (const auto& q : sample_points(s, 10, 3)) {
    ChartPoint cp(s, q);
    const auto& R = cp.curvature(0);
    const auto& X = cp.frame(0);
    const auto& g = cp.metric(0);
    // g(R(X,Y)Y, X)
    double sec = 0;
    const int n = 2;
    for (int l = 0; l < n; ++l) {
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            double rv = R[((l * n + k) * n + i) * n + j].value();
            for (int m = 0; m < n; ++m) {
              sec += rv * X[0][i].value() * X[1][j].value() * X[1][k].value() * g[l * n + m].value() *
                     X[0][m].value();
            }
          }
        }
      }
    }
    CHECK(sec == doctest::Approx(1).epsilon(1e-12));
  }

  // Conformally flat e^{2f} delta with f = x: Gaussian curvature
  // K = -e^{-2f} (f_xx + f_yy) = 0. Use f = x^2/2 for a nonzero value:
  // K = -e^{-x^2}, and R^x_{yxy} = K g_yy = -1.
  Geometry c = make({{"dim", 2}, {"coords", {"x", "y"}}, {"metric", mat({{"exp(x^2)", "0"}, {"0", "exp(x^2)"}})}});
  std::vector<double> q{0.4, -0.3};
  auto R = curvature(c, q);
  CHECK(R[((0 * 2 + 1) * 2 + 0) * 2 + 1] == doctest::Approx(-1));
  CHECK(R[((0 * 2 + 1) * 2 + 1) * 2 + 0] == doctest::Approx(1));
  auto R0 = curvature(conformal2(), q);
  for (double r : R0) CHECK(std::abs(r) < 1e-14);
}

TEST_CASE("config round trip") {
  Json doc = {{"schema", "excal-config v1"},
              {"dim", 2},
              {"coords", {"u", "v"}},
              {"metric", mat({{"1+u^2", "0"}, {"0", "exp(v)"}})},
              {"domain", {{-1, 1}, {0, 2}}},
              {"exclude", "u^2 + v^2 - 0.01"},
              {"structures", {{"xi", {"1", "0"}}, {"J", mat({{"0", "-1"}, {"1", "0"}})}}},
              {"forms", {{"w", {{"degree", 1}, {"coeffs", {{"2", "u*v"}, {"1", "sin(u)"}}}}},
                         {"f", {{"degree", 0}, {"coeffs", {{"", "3"}}}}}}}};
  Geometry g = geometry_from_json(doc);
  CHECK(g.dim == 2);
  REQUIRE(g.exclude.has_value());
  REQUIRE(g.find_form("w") != nullptr);
  CHECK(g.find_form("w")->coeffs.size() == 2);
  Json out = geometry_to_json(g);
  Geometry g2 = geometry_from_json(out);
  CHECK(geometry_to_json(g2) == out);
  CHECK(out["forms"]["w"]["coeffs"].begin().key() == "1");
  CHECK(out["exclude"] == "u^2 + v^2 - 0.01");
}

TEST_CASE("config errors name the field") {
  auto expect = [](Json j, const char* needle) {
    try {
      geometry_from_json(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      INFO(e.what());
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect({{"dim", 2}, {"coords", {"x"}}, {"metric", mat({{"1"}})}}, "coords");
  expect({{"dim", 1}, {"coords", {"x"}}, {"metric", mat({{"q"}})}}, "metric[0][0]");
  expect({{"dim", 1}, {"coords", {"x"}}, {"metric", mat({{"1 +"}})}}, "SyntaxError");
  expect({{"dim", 1}, {"coords", {"x"}}, {"metric", mat({{"1"}})}, {"forms", {{"w", {{"degree", 1}, {"coeffs", {{"2", "1"}}}}}}}},
         "forms.w");
  expect({{"dim", 2}, {"coords", {"x", "y"}}, {"metric", mat({{"1", "0"}, {"0", "1"}})},
          {"forms", {{"w", {{"degree", 2}, {"coeffs", {{"2,1", "1"}}}}}}}},
         "strictly increasing");
  expect({{"schema", "excal-config v9"}, {"dim", 1}, {"coords", {"x"}}, {"metric", mat({{"1"}})}}, "schema");
  expect({{"dim", 1}, {"coords", {"x"}}, {"metric", mat({{"1"}})}, {"structures", {{"K", {"1"}}}}}, "structures.K");
}

TEST_CASE("sampling is seeded and respects the exclusion") {
  Geometry h = hopf();
  auto a = sample_points(h, 20, 42);
  auto b = sample_points(h, 20, 42);
  CHECK(a == b);
  for (const auto& p : a) {
    double r2 = 0;
    for (double x : p) r2 += x * x;
    CHECK(r2 > 0.04);
    CHECK(h.in_box(p));
  }
  CHECK(sample_points(h, 20, 43) != a);

  Geometry never = make({{"dim", 1}, {"coords", {"x"}}, {"metric", mat({{"1"}})}, {"exclude", "-1"}});
  CHECK_THROWS_AS(sample_points(never, 1, 1), ConfigError);
}

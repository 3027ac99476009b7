#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "excal/alt_algebra.hpp"
#include "excal/splitmix.hpp"

using namespace excal;

namespace {

AltValue random_form(SplitMix64& rng, int n, int k) {
  AltValue a(n, k, 0.0);
  for (auto& c : a.coeffs()) c = rng.uniform(-1, 1);
  return a;
}

VecAltValue random_vec_form(SplitMix64& rng, int n, int k) {
  VecAltValue a(n, k, 0.0);
  for (int b = 0; b < n; ++b) a[b] = random_form(rng, n, k);
  return a;
}

std::vector<std::vector<double>> random_vectors(SplitMix64& rng, int n, int count) {
  std::vector<std::vector<double>> vs(count, std::vector<double>(n));
  for (auto& v : vs) {
    for (auto& x : v) x = rng.uniform(-1, 1);
  }
  return vs;
}

AltValue basis1(int n, int i, double c = 1.0) {
  AltValue a(n, 1, 0.0);
  a.at(IndexMask{1} << i) = c;
  return a;
}

double max_abs_diff(const AltValue& a, const AltValue& b) {
  REQUIRE(a.degree() == b.degree());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

int perm_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
  }
  return inv % 2 ? -1 : 1;
}

// (a ^ b)(v) from the shuffle-sum definition using only apply().
double wedge_oracle(const AltValue& a, const AltValue& b, std::span<const std::vector<double>> vs) {
  const int ka = a.degree();
  const int m = static_cast<int>(vs.size());
  std::vector<int> sel(m, 0);
  std::fill(sel.begin(), sel.begin() + ka, 1);
  double total = 0;
  do {
    std::vector<int> perm;
    for (int i = 0; i < m; ++i) {
      if (sel[i]) perm.push_back(i);
    }
    for (int i = 0; i < m; ++i) {
      if (!sel[i]) perm.push_back(i);
    }
    std::vector<std::vector<double>> va, vb;
    for (int i = 0; i < ka; ++i) va.push_back(vs[perm[i]]);
    for (int i = ka; i < m; ++i) vb.push_back(vs[perm[i]]);
    total += perm_sign(perm) * excal::apply(a, va) * excal::apply(b, vb);
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return total;
}

}  // namespace

TEST_CASE("wedge examples") {
  AltValue w = wedge(basis1(2, 0), basis1(2, 1));
  CHECK(w.at(IndexMask{0b11}) == 1);

  SplitMix64 rng(1);
  for (int k : {1, 3}) {
    AltValue a = random_form(rng, 5, k);
    AltValue aa = wedge(a, a);
    for (double c : aa.coeffs()) CHECK(std::abs(c) < 1e-15);
  }

  AltValue s = basis1(2, 0) + basis1(2, 1);
  AltValue d = basis1(2, 0) - basis1(2, 1);
  CHECK(wedge(s, d).at(IndexMask{0b11}) == -2);

  AltValue big = wedge(random_form(rng, 3, 2), random_form(rng, 3, 2));
  CHECK(big.empty());
  CHECK(big.degree() == 4);
}

TEST_CASE("wedge agrees with the shuffle-sum oracle and is associative") {
  SplitMix64 rng(2);
  for (int n = 1; n <= 5; ++n) {
    for (int ka = 0; ka <= n; ++ka) {
      for (int kb = 0; ka + kb <= n; ++kb) {
        AltValue a = random_form(rng, n, ka);
        AltValue b = random_form(rng, n, kb);
        AltValue w = wedge(a, b);
        auto vs = random_vectors(rng, n, ka + kb);
        CHECK(std::abs(excal::apply(w, vs) - wedge_oracle(a, b, vs)) < 1e-12);
        // graded commutativity
        AltValue ba = wedge(b, a);
        if ((ka * kb) % 2) ba *= -1.0;
        CHECK(max_abs_diff(w, ba) < 1e-14);
      }
    }
  }
  AltValue a = random_form(rng, 5, 1), b = random_form(rng, 5, 2), c = random_form(rng, 5, 2);
  CHECK(max_abs_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-14);
}

TEST_CASE("wedge with a vector-valued form") {
  SplitMix64 rng(3);
  VecAltValue phi = random_vec_form(rng, 3, 1);
  AltValue one(3, 0, 0.0);
  one[0] = 1;
  VecAltValue r = wedge(one, phi);
  for (int b = 0; b < 3; ++b) CHECK(max_abs_diff(r[b], phi[b]) == 0);

  VecAltValue id = identity_endomorphism<double>(2, 0.0, 1.0);
  VecAltValue eid = wedge(basis1(2, 0), id);
  CHECK(eid[0].at(IndexMask{0b11}) == 0);
  CHECK(eid[1].at(IndexMask{0b11}) == 1);
}

TEST_CASE("interior product examples") {
  VecAltValue X = VecAltValue(2, 0, 0.0);
  X[0][0] = 1;
  CHECK(interior(X, basis1(2, 0))[0] == 1);

  // J(d_x) = d_y, J(d_y) = -d_x
  VecAltValue J(2, 1, 0.0);
  J[1].at(IndexMask{1}) = 1;
  J[0].at(IndexMask{2}) = -1;
  AltValue ij = interior(J, basis1(2, 0));
  CHECK(ij.at(IndexMask{1}) == 0);
  CHECK(ij.at(IndexMask{2}) == -1);

  SplitMix64 rng(4);
  AltValue w = random_form(rng, 3, 2);
  AltValue iw = interior(identity_endomorphism<double>(3, 0.0, 1.0), w);
  CHECK(max_abs_diff(iw, 2.0 * w) < 1e-15);

  // i_phi annihilates functions
  AltValue f(3, 0, 0.0);
  f[0] = 2;
  AltValue zf = interior(random_vec_form(rng, 3, 2), f);
  for (double c : zf.coeffs()) CHECK(c == 0);
}

TEST_CASE("interior product agrees with the literal shuffle sum") {
  SplitMix64 rng(5);
  for (int n = 1; n <= 5; ++n) {
    for (int p = 0; p <= n; ++p) {
      for (int k = 1; k <= n; ++k) {
        if (p + k - 1 > n) continue;
        VecAltValue phi = random_vec_form(rng, n, p);
        AltValue w = random_form(rng, n, k);
        AltValue r = interior(phi, w);
        auto vs = random_vectors(rng, n, p + k - 1);
        CHECK(std::abs(excal::apply(r, vs) - interior_oracle(phi, w, vs)) < 1e-12);
      }
    }
  }
}

TEST_CASE("trace") {
  CHECK(trace(identity_endomorphism<double>(4, 0.0, 1.0))[0] == 4);

  AltValue eta = basis1(3, 2);
  AltValue t = trace(wedge(eta, identity_endomorphism<double>(3, 0.0, 1.0)));
  CHECK(t.at(IndexMask{0b100}) == -2);
  CHECK(t.at(IndexMask{0b001}) == 0);

  SplitMix64 rng(6);
  for (int k = 1; k <= 3; ++k) {
    AltValue w = random_form(rng, 4, k);
    VecAltValue X = random_vec_form(rng, 4, 0);
    // w ^ X has components X^b w
    VecAltValue wx(4, k, 0.0);
    for (int b = 0; b < 4; ++b) wx[b] = w * X[b][0];
    CHECK(max_abs_diff(trace(wx), interior(X, w)) < 1e-14);
  }
  CHECK_THROWS_AS(trace(random_vec_form(rng, 3, 0)), DegreeError);
}

TEST_CASE("sharp") {
  std::vector<double> flat{1, 0, 0, 1};
  VecAltValue s = sharp<double>(basis1(2, 0), flat);
  CHECK(s[0][0] == 1);
  CHECK(s[1][0] == 0);

  AltValue dxdy(2, 2, 0.0);
  dxdy[0] = 1;
  // sum_a (i_{d_a} w) ^ d_a: component x is dy, component y is -dx
  VecAltValue s2 = sharp<double>(dxdy, flat);
  CHECK(s2[0].at(IndexMask{2}) == 1);
  CHECK(s2[1].at(IndexMask{1}) == -1);

  SplitMix64 rng(7);
  for (int k = 2; k <= 4; ++k) {
    AltValue w = random_form(rng, 4, k);
    // a symmetric positive-definite inverse metric
    std::vector<double> A(16), G(16, 0.0);
    for (auto& x : A) x = rng.uniform(-1, 1);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int m = 0; m < 4; ++m) G[i * 4 + j] += A[i * 4 + m] * A[j * 4 + m];
      }
      G[i * 4 + i] += 1;
    }
    AltValue t = trace(sharp<double>(w, G));
    for (double c : t.coeffs()) CHECK(std::abs(c) < 1e-13);
  }
  CHECK_THROWS_AS(sharp<double>(AltValue(2, 0, 0.0), flat), DegreeError);
}

TEST_CASE("apply") {
  AltValue dxdy(2, 2, 0.0);
  dxdy[0] = 1;
  std::vector<std::vector<double>> xy{{1, 0}, {0, 1}}, yx{{0, 1}, {1, 0}};
  CHECK(excal::apply(dxdy, xy) == 1);
  CHECK(excal::apply(dxdy, yx) == -1);

  SplitMix64 rng(8);
  AltValue w = random_form(rng, 4, 3);
  auto vs = random_vectors(rng, 4, 2);
  vs.push_back(vs[0]);
  CHECK(std::abs(excal::apply(w, vs)) < 1e-15);
  CHECK_THROWS_AS(excal::apply(w, std::span(vs).first(2)), ArityError);

  // from_evaluator inverts apply
  AltValue back = from_evaluator(4, 3, [&](auto b) { return excal::apply(w, b); });
  CHECK(max_abs_diff(back, w) == 0);
}

TEST_CASE("wedge then interior: omega ^ i_phi beta = i_{omega ^ phi} beta") {
  SplitMix64 rng(9);
  for (int n = 2; n <= 5; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int p = 0; p <= n; ++p) {
        for (int q = 1; q <= n; ++q) {
          if (k + p + q - 1 > n) continue;
          AltValue w = random_form(rng, n, k);
          VecAltValue phi = random_vec_form(rng, n, p);
          AltValue beta = random_form(rng, n, q);
          AltValue lhs = wedge(w, interior(phi, beta));
          AltValue rhs = interior(wedge(w, phi), beta);
          CHECK(max_abs_diff(lhs, rhs) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("contraction of a wedge") {
  // tr(w ^ phi) = (-1)^k w ^ tr(phi) + (-1)^{(k+1)p} i_phi w
  SplitMix64 rng(10);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (int p = 0; k + p <= n; ++p) {
        if (k + p == 0) continue;
        AltValue w = random_form(rng, n, k);
        VecAltValue phi = random_vec_form(rng, n, p);
        AltValue lhs = trace(wedge(w, phi));
        AltValue rhs = interior(phi, w);
        if (((k + 1) * p) % 2) rhs *= -1.0;
        if (p >= 1) {
          AltValue t = wedge(w, trace(phi));
          if (k % 2) t *= -1.0;
          rhs += t;
        }
        INFO("n=", n, " k=", k, " p=", p);
        CHECK(max_abs_diff(lhs, rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("i_phi is injective on forms of degrees 1 and 2") {
  for (int n = 2; n <= 4; ++n) {
    for (int p = 0; p <= n - 1; ++p) {
      // The map phi -> (i_phi on basis 1-forms and 2-forms) is linear; build its
      // matrix column by column over a basis of vector-valued p-forms and check
      // full column rank by Gaussian elimination.
      const int cols = n * static_cast<int>(binomial(n, p));
      std::vector<std::vector<double>> M;
      for (int c = 0; c < cols; ++c) {
        VecAltValue e(n, p, 0.0);
        e[c / static_cast<int>(binomial(n, p))][c % binomial(n, p)] = 1;
        std::vector<double> col;
        for (int deg = 1; deg <= 2; ++deg) {
          for (std::size_t i = 0; i < static_cast<std::size_t>(binomial(n, deg)); ++i) {
            AltValue b(n, deg, 0.0);
            b[i] = 1;
            AltValue r = interior(e, b);
            for (double v : r.coeffs()) col.push_back(v);
          }
        }
        M.push_back(col);
      }
      const int rows = static_cast<int>(M[0].size());
      int rank = 0;
      std::vector<bool> used(rows, false);
      for (int c = 0; c < cols; ++c) {
        int piv = -1;
        for (int r = 0; r < rows; ++r) {
          if (!used[r] && std::abs(M[c][r]) > 1e-12) {
            piv = r;
            break;
          }
        }
        if (piv < 0) continue;
        used[piv] = true;
        ++rank;
        for (int c2 = c + 1; c2 < cols; ++c2) {
          double f = M[c2][piv] / M[c][piv];
          for (int r = 0; r < rows; ++r) M[c2][r] -= f * M[c][r];
        }
      }
      CHECK(rank == cols);
    }
  }
}

TEST_CASE("i_X i_X = 0") {
  SplitMix64 rng(12);
  for (int k = 2; k <= 5; ++k) {
    VecAltValue X = random_vec_form(rng, 5, 0);
    AltValue w = random_form(rng, 5, k);
    AltValue r = interior(X, interior(X, w));
    for (double c : r.coeffs()) CHECK(std::abs(c) < 1e-14);
  }
}

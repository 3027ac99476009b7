#include "excal/random_form.hpp"

#include <string>

#include "excal/errors.hpp"
#include "excal/splitmix.hpp"

namespace excal {

namespace {

// Monomials of total degree <= d in n variables, graded then lexicographic.
void monomials(int n, int d, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  for (int deg = 0; deg <= d; ++deg) {
    // Non-decreasing variable lists of length deg.
    cur.assign(deg, 0);
    if (deg == 0) {
      out.push_back({});
      continue;
    }
    while (true) {
      out.push_back(cur);
      int i = deg - 1;
      while (i >= 0 && cur[i] == n - 1) --i;
      if (i < 0) break;
      ++cur[i];
      for (int j = i + 1; j < deg; ++j) cur[j] = cur[i];
    }
  }
}

Expr coefficient(const Geometry& g, SplitMix64& rng, FormKind kind, int max_degree) {
  const int n = g.dim;
  auto var = [&](int i) { return Expr::variable(i, g.coords[i]); };
  Expr e = Expr::number(rng.uniform(-1, 1));
  if (kind == FormKind::Trig) {
    for (int i = 0; i < n; ++i) {
      e = e + Expr::number(rng.uniform(-1, 1)) * Expr::call("sin", {var(i)});
      e = e + Expr::number(rng.uniform(-1, 1)) * Expr::call("cos", {var(i)});
    }
    return e;
  }
  std::vector<std::vector<int>> mons;
  monomials(n, max_degree, mons);
  for (std::size_t m = 1; m < mons.size(); ++m) {
    Expr term = Expr::number(rng.uniform(-1, 1));
    for (int v : mons[m]) term = term * var(v);
    e = e + term;
  }
  return e;
}

void fill(const Geometry& g, FormField& f, SplitMix64& rng, FormKind kind, int max_degree) {
  for (IndexMask m : TupleTable::get(g.dim).masks(f.degree)) f.coeffs[m] = coefficient(g, rng, kind, max_degree);
}

void check_degree(const Geometry& g, int k) {
  if (k < 0 || k > g.dim) {
    throw DegreeError("random form of degree " + std::to_string(k) + " on a chart of dimension " +
                      std::to_string(g.dim));
  }
}

}  // namespace

FormField random_form(const Geometry& g, int k, std::uint64_t seed, FormKind kind, int max_poly_degree) {
  check_degree(g, k);
  FormField f(g.dim, k);
  SplitMix64 rng(seed);
  fill(g, f, rng, kind, max_poly_degree);
  return f;
}

VecFormField random_vec(const Geometry& g, int k, std::uint64_t seed, FormKind kind, int max_poly_degree) {
  check_degree(g, k);
  VecFormField v(g.dim, k);
  SplitMix64 rng(seed);
  for (auto& c : v.comps) fill(g, c, rng, kind, max_poly_degree);
  return v;
}

const char* kind_name(FormKind k) { return k == FormKind::Trig ? "trig" : "poly"; }

}  // namespace excal

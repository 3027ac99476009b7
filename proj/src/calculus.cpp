#include "excal/calculus.hpp"

namespace excal {

namespace {

JetForm zero_form(int n, int k, int order) { return JetForm(n, k, Jet(n, order)); }
JetVecForm zero_vec(int n, int k, int order) { return JetVecForm(n, k, Jet(n, order)); }

const Jet& gam(const std::vector<Jet>& G, int n, int k, int i, int j) { return G[(k * n + i) * n + j]; }

}  // namespace

JetForm truncate(const JetForm& w, int order) {
  return w.map([order](const Jet& j) { return j.truncated(order); });
}

JetVecForm truncate(const JetVecForm& w, int order) {
  return w.map([order](const Jet& j) { return j.truncated(order); });
}

JetForm partial(const JetForm& w, int a) {
  return w.map([a](const Jet& j) { return j.derivative(a); });
}

JetForm ext_d(const JetForm& w) {
  const int n = w.dim();
  const int m = jet_order(w) - 1;
  if (m < 0) throw OrderExceeded("exterior derivative needs a jet of order >= 1");
  JetForm out = zero_form(n, w.degree() + 1, m);
  if (out.empty() || w.empty()) return out;
  const auto& wm = w.masks();
  for (std::size_t i = 0; i < wm.size(); ++i) {
    const Jet& c = w[i];
    if (c.is_constant()) continue;
    for (int a = 0; a < n; ++a) {
      const IndexMask bit = IndexMask{1} << a;
      if (wm[i] & bit) continue;
      // dx^a ^ dx^I = (-1)^{#I below a} dx^{I u a}
      const bool neg = std::popcount(wm[i] & (bit - 1)) & 1;
      Jet t = c.derivative(a);
      if (neg) {
        out.at(wm[i] | bit) -= t;
      } else {
        out.at(wm[i] | bit) += t;
      }
    }
  }
  return out;
}

JetVecForm connection_endomorphism(int a, const std::vector<Jet>& gamma, int n, int order) {
  JetVecForm out = zero_vec(n, 1, order);
  for (int c = 0; c < n; ++c) {
    for (int b = 0; b < n; ++b) out[c].at(IndexMask{1} << b) = gam(gamma, n, c, a, b).truncated(order);
  }
  return out;
}

JetForm cov_deriv(int a, const JetForm& w, const std::vector<Jet>& gamma) {
  const int n = w.dim();
  const int m = jet_order(w) - 1;
  JetForm out = partial(w, a);
  if (out.empty() || w.degree() == 0) return out;
  out -= interior(connection_endomorphism(a, gamma, n, m), truncate(w, m));
  return out;
}

JetVecForm cov_deriv(int a, const JetVecForm& phi, const std::vector<Jet>& gamma) {
  const int n = phi.dim();
  const int m = jet_order(phi) - 1;
  std::vector<JetForm> comps;
  comps.reserve(n);
  for (int b = 0; b < n; ++b) comps.push_back(cov_deriv(a, phi[b], gamma));
  JetVecForm out(std::move(comps));
  if (phi.empty()) return out;
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      const Jet& G = gam(gamma, n, b, a, c);
      if (G.is_constant() && G.value() == 0.0) continue;
      out[b] += truncate(phi[c], m).scaled(G.truncated(m));
    }
  }
  return out;
}

JetForm codiff(const JetForm& w, const std::vector<std::vector<Jet>>& frame, const std::vector<Jet>& gamma) {
  const int n = w.dim();
  const int m = jet_order(w) - 1;
  JetForm out = zero_form(n, w.degree() - 1, m);
  if (out.empty() || w.empty()) return out;
  std::vector<JetForm> nab;
  nab.reserve(n);
  for (int a = 0; a < n; ++a) nab.push_back(cov_deriv(a, w, gamma));
  for (const auto& X : frame) {
    JetForm v = zero_form(n, w.degree(), m);
    for (int a = 0; a < n; ++a) v += nab[a].scaled(X[a].truncated(m));
    for (int b = 0; b < n; ++b) out -= interior_basis(b, v).scaled(X[b].truncated(m));
  }
  return out;
}

JetVecForm d_nabla(const JetVecForm& phi, const std::vector<Jet>& gamma) {
  const int n = phi.dim();
  const int m = jet_order(phi) - 1;
  JetVecForm out = zero_vec(n, phi.degree() + 1, m);
  if (out.empty() || phi.empty()) return out;
  for (int a = 0; a < n; ++a) {
    JetForm dxa = zero_form(n, 1, m);
    dxa.at(IndexMask{1} << a) = Jet::constant(1.0, n, m);
    out += wedge(dxa, cov_deriv(a, phi, gamma));
  }
  return out;
}

JetVecForm omega_nabla(const JetForm& w, const std::vector<Jet>& gamma, const std::vector<Jet>& g_inv) {
  const int n = w.dim();
  const int m = jet_order(w) - 1;
  JetVecForm out = zero_vec(n, w.degree(), m);
  if (w.empty()) return out;
  for (int a = 0; a < n; ++a) {
    JetForm nab = cov_deriv(a, w, gamma);
    for (int b = 0; b < n; ++b) out[b] += nab.scaled(g_inv[a * n + b].truncated(m));
  }
  return out;
}

JetForm flat(const JetVecForm& x, const std::vector<Jet>& g) {
  if (x.degree() != 0) throw DegreeError("flat needs a vector field (degree 0)");
  const int n = x.dim();
  const int m = jet_order(x);
  JetForm out = zero_form(n, 1, m);
  for (int a = 0; a < n; ++a) {
    Jet s(n, m);
    for (int b = 0; b < n; ++b) s += g[a * n + b].truncated(m) * x[b][0];
    out.at(IndexMask{1} << a) = std::move(s);
  }
  return out;
}

JetVecForm lie_metric_sharp(const JetVecForm& xi, const std::vector<Jet>& g, const std::vector<Jet>& g_inv,
                            const std::vector<Jet>& gamma, LieMetricForm form) {
  if (xi.degree() != 0) throw DegreeError("L_xi g needs a vector field (degree 0)");
  const int n = xi.dim();
  const int m = jet_order(xi) - 1;
  // nx[a * n + d] = nabla_a xi^d
  std::vector<Jet> nx;
  nx.reserve(n * n);
  for (int a = 0; a < n; ++a) {
    for (int d = 0; d < n; ++d) {
      Jet s = xi[d][0].derivative(a);
      for (int e = 0; e < n; ++e) s += gam(gamma, n, d, a, e).truncated(m) * xi[e][0].truncated(m);
      nx.push_back(std::move(s));
    }
  }
  auto G = [&](int a, int b) { return g[a * n + b].truncated(m); };
  // L[a * n + c] = (L_xi g)(d_a, d_c)
  std::vector<Jet> L(n * n, Jet(n, m));
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      Jet s(n, m);
      for (int d = 0; d < n; ++d) s += G(d, c) * nx[a * n + d];
      if (form == LieMetricForm::Standard) {
        for (int d = 0; d < n; ++d) s += G(a, d) * nx[c * n + d];
      } else {
        for (int d = 0; d < n; ++d) {
          for (int e = 0; e < n; ++e) s += G(d, e) * xi[d][0].truncated(m) * nx[c * n + e];
        }
      }
      L[a * n + c] = std::move(s);
    }
  }
  JetVecForm out = zero_vec(n, 1, m);
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      Jet s(n, m);
      for (int a = 0; a < n; ++a) s += g_inv[a * n + b].truncated(m) * L[a * n + c];
      out[b].at(IndexMask{1} << c) = std::move(s);
    }
  }
  return out;
}

JetVecForm curvature_wedge(const JetVecForm& phi, const std::vector<Jet>& riemann) {
  const int n = phi.dim();
  const int m = jet_order(phi);
  JetVecForm out = zero_vec(n, phi.degree() + 2, m);
  if (out.empty() || phi.empty()) return out;
  auto R = [&](int l, int k, int i, int j) -> const Jet& { return riemann[((l * n + k) * n + i) * n + j]; };
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      JetForm rf = zero_form(n, 2, m);
      bool any = false;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const Jet& r = R(l, k, i, j);
          if (r.is_constant() && r.value() == 0.0) continue;
          rf.at((IndexMask{1} << i) | (IndexMask{1} << j)) = r.truncated(m);
          any = true;
        }
      }
      if (any) out[l] += wedge(rf, phi[k]);
    }
  }
  return out;
}

JetVecForm nijenhuis(const JetVecForm& t) {
  if (t.degree() != 1) throw DegreeError("Nijenhuis torsion needs an endomorphism (degree 1)");
  const int n = t.dim();
  const int m = jet_order(t) - 1;
  // T^a_i = coefficient of d_a in T(d_i)
  auto T = [&](int a, int i) { return t[a].at(IndexMask{1} << i).truncated(m); };
  auto dT = [&](int v, int a, int i) { return t[a].at(IndexMask{1} << i).derivative(v); };
  JetVecForm out = zero_vec(n, 2, m);
  if (out.empty()) return out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const IndexMask ij = (IndexMask{1} << i) | (IndexMask{1} << j);
      for (int c = 0; c < n; ++c) {
        Jet s(n, m);
        for (int a = 0; a < n; ++a) s += T(a, i) * dT(a, c, j) - T(a, j) * dT(a, c, i);
        for (int e = 0; e < n; ++e) s += T(c, e) * (dT(j, e, i) - dT(i, e, j));
        out[c].at(ij) = std::move(s);
      }
    }
  }
  return out;
}

}  // namespace excal

#pragma once

// Pointwise differential operators on jet-valued forms.
//
// Each function consumes jets of some order and returns jets of a stated
// (usually lower) order. Christoffel symbols use the layout of
// ChartPoint::christoffel, Gamma^k_{ij} at [(k * n + i) * n + j], and
// curvature the layout of ChartPoint::curvature.

#include <vector>

#include "excal/geometry.hpp"

namespace excal {

/// Jet order carried by a form (also for empty, out-of-range degrees).
inline int jet_order(const JetForm& w) { return w.zero().order(); }
inline int jet_order(const JetVecForm& w) { return w.zero().order(); }

JetForm truncate(const JetForm& w, int order);
JetVecForm truncate(const JetVecForm& w, int order);

/// Coefficientwise d/dx_a, one order lower.
JetForm partial(const JetForm& w, int a);

/// Exterior derivative; input at order m + 1, output at order m.
JetForm ext_d(const JetForm& w);

/// The endomorphism-valued 1-form Gamma_a with (Gamma_a)^c = sum_b Gamma^c_{ab} dx^b,
/// so that nabla_{d_a} d_b = Gamma_a(d_b).
JetVecForm connection_endomorphism(int a, const std::vector<Jet>& gamma, int n, int order);

/// nabla_{d_a} w = d_a w - i_{Gamma_a} w. Input at m + 1, Christoffel at >= m.
JetForm cov_deriv(int a, const JetForm& w, const std::vector<Jet>& gamma);

/// nabla_{d_a} phi for a tangent-valued form: the form part as above plus
/// Gamma^b_{ac} phi^c on the vector part.
JetVecForm cov_deriv(int a, const JetVecForm& phi, const std::vector<Jet>& gamma);

/// delta w = -sum_t i_{X_t} nabla_{X_t} w for an orthonormal frame X_t.
/// Input at m + 1, frame and Christoffel at >= m.
JetForm codiff(const JetForm& w, const std::vector<std::vector<Jet>>& frame, const std::vector<Jet>& gamma);

/// d^nabla phi = sum_a dx^a ^ nabla_{d_a} phi. Input at m + 1.
JetVecForm d_nabla(const JetVecForm& phi, const std::vector<Jet>& gamma);

/// omega^nabla = sum_{a,b} g^{ab} (nabla_{d_a} omega) ^ d_b. Input at m + 1.
JetVecForm omega_nabla(const JetForm& w, const std::vector<Jet>& gamma, const std::vector<Jet>& g_inv);

/// The metric dual 1-form g(X, .) of a vector field.
JetForm flat(const JetVecForm& x, const std::vector<Jet>& g);

enum class LieMetricForm {
  Standard,  // (L_xi g)(Y, Z) = g(nabla_Y xi, Z) + g(Y, nabla_Z xi)
  Printed,   // g(nabla_Y xi, Z) + g(xi, nabla_Z xi)
};

/// (L_xi g)^#: the endomorphism Y -> sum_t (L_xi g)(X_t, Y) X_t. Input at m + 1.
JetVecForm lie_metric_sharp(const JetVecForm& xi, const std::vector<Jet>& g, const std::vector<Jet>& g_inv,
                            const std::vector<Jet>& gamma, LieMetricForm form = LieMetricForm::Standard);

/// sum_{sigma in Sh(2,p)} (-1)^sigma R(Y_s1, Y_s2) phi(...), realised as
/// sum_k R^l_k ^ phi^k with the curvature 2-forms R^l_k.
JetVecForm curvature_wedge(const JetVecForm& phi, const std::vector<Jet>& riemann);

/// Nijenhuis torsion N_T(X, Y) = [TX, TY] - T[TX, Y] - T[X, TY] + T^2[X, Y]
/// of an endomorphism field, as a tangent-valued 2-form. Input at m + 1.
JetVecForm nijenhuis(const JetVecForm& t);

}  // namespace excal

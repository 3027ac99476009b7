#pragma once

// Seeded random form fields for identity checks.

#include <cstdint>

#include "excal/geometry.hpp"

namespace excal {

enum class FormKind { Poly, Trig };

/// Coefficients drawn uniformly from [-1, 1] by splitmix64, in a fixed order.
/// Poly: every monomial of total degree <= max_poly_degree. Trig:
/// c + sum_i (a_i sin x_i + b_i cos x_i). Throws DegreeError unless 0 <= k <= n.
FormField random_form(const Geometry& g, int k, std::uint64_t seed, FormKind kind = FormKind::Poly,
                      int max_poly_degree = 2);

/// Each tangent component is an independent random form from one stream.
VecFormField random_vec(const Geometry& g, int k, std::uint64_t seed, FormKind kind = FormKind::Poly,
                        int max_poly_degree = 2);

const char* kind_name(FormKind k);

}  // namespace excal
